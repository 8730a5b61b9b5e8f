#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "stefan/expr.hpp"

namespace stefan {

/// A scalar function of (x, t). Space-only data ignore t, time-only data ignore x.
using Field = std::function<double(double x, double t)>;

inline Field as_field(const Expr& e) {
    return [e](double x, double t) { return e.eval(x, t); };
}

inline Field constant_field(double c) {
    return [c](double, double) { return c; };
}

/// Input data or configuration rejected before any solve.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace stefan
