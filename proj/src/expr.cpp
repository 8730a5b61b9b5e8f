#include "stefan/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

namespace stefan {

namespace detail {

enum class Kind { Number, VarX, VarT, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Func { Sin, Cos, Exp, Sqrt, Abs, Tanh, Min, Max };

struct Node {
    Kind kind = Kind::Number;
    double value = 0.0;
    Func func = Func::Sin;
    std::vector<std::shared_ptr<const Node>> args;
};

}  // namespace detail

namespace {

using detail::Func;
using detail::Kind;
using detail::Node;
using NodePtr = std::shared_ptr<const Node>;

struct FuncInfo {
    const char* name;
    Func func;
    int arity;
};

constexpr std::array<FuncInfo, 8> kFunctions{{
    {"sin", Func::Sin, 1},
    {"cos", Func::Cos, 1},
    {"exp", Func::Exp, 1},
    {"sqrt", Func::Sqrt, 1},
    {"abs", Func::Abs, 1},
    {"tanh", Func::Tanh, 1},
    {"min", Func::Min, 2},
    {"max", Func::Max, 2},
}};

const char* func_name(Func f) {
    for (const auto& info : kFunctions)
        if (info.func == f) return info.name;
    return "?";
}

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string text;
    double number = 0.0;
};

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.'))
                ++i;
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
                if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                    i = j;
                    while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
                }
            }
            std::string text(src.substr(start, i - start));
            char* end = nullptr;
            const double v = std::strtod(text.c_str(), &end);
            if (end != text.c_str() + text.size()) throw ParseError("malformed number '" + text + "'", start);
            out.push_back({Tok::Number, start, text, v});
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
            out.push_back({Tok::Ident, start, std::string(src.substr(start, i - start))});
            continue;
        }
        Tok kind;
        switch (c) {
            case '+': kind = Tok::Plus; break;
            case '-': kind = Tok::Minus; break;
            case '*': kind = Tok::Star; break;
            case '/': kind = Tok::Slash; break;
            case '^': kind = Tok::Caret; break;
            case '(': kind = Tok::LParen; break;
            case ')': kind = Tok::RParen; break;
            case ',': kind = Tok::Comma; break;
            default: throw ParseError(std::string("unexpected character '") + c + "'", start);
        }
        out.push_back({kind, start, std::string(1, c)});
        ++i;
    }
    out.push_back({Tok::End, src.size(), ""});
    return out;
}

// Binding powers: + - 10, * / 20, unary minus 30, ^ 40 (right associative).
constexpr int kUnaryBp = 30;

int infix_bp(Tok t) {
    switch (t) {
        case Tok::Plus:
        case Tok::Minus: return 10;
        case Tok::Star:
        case Tok::Slash: return 20;
        case Tok::Caret: return 40;
        default: return -1;
    }
}

NodePtr make(Kind kind, std::vector<NodePtr> args = {}) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->args = std::move(args);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view src) : tokens_(tokenize(src)) {}

    NodePtr parse_all() {
        NodePtr root = parse(0);
        if (peek().kind != Tok::End) throw ParseError("unexpected token '" + peek().text + "'", peek().offset);
        return root;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_++]; }

    void expect(Tok kind, const char* what) {
        if (peek().kind != kind) {
            const std::string got = peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'";
            throw ParseError(std::string("expected ") + what + ", got " + got, peek().offset);
        }
        ++pos_;
    }

    NodePtr parse(int min_bp) {
        NodePtr lhs = parse_prefix();
        for (;;) {
            const Tok op = peek().kind;
            const int bp = infix_bp(op);
            if (bp < 0 || bp <= min_bp) break;
            next();
            // Right associativity for ^: parse the right side one level lower.
            const int rbp = op == Tok::Caret ? bp - 1 : bp;
            NodePtr rhs = parse(rbp);
            Kind kind = Kind::Add;
            switch (op) {
                case Tok::Plus: kind = Kind::Add; break;
                case Tok::Minus: kind = Kind::Sub; break;
                case Tok::Star: kind = Kind::Mul; break;
                case Tok::Slash: kind = Kind::Div; break;
                case Tok::Caret: kind = Kind::Pow; break;
                default: break;
            }
            lhs = make(kind, {lhs, rhs});
        }
        return lhs;
    }

    NodePtr parse_prefix() {
        const Token& tok = next();
        switch (tok.kind) {
            case Tok::Number: {
                auto n = std::make_shared<Node>();
                n->kind = Kind::Number;
                n->value = tok.number;
                return n;
            }
            case Tok::Minus: return make(Kind::Neg, {parse(kUnaryBp)});
            case Tok::LParen: {
                NodePtr inner = parse(0);
                expect(Tok::RParen, "')'");
                return inner;
            }
            case Tok::Ident: return parse_ident(tok);
            case Tok::End: throw ParseError("unexpected end of input", tok.offset);
            default: throw ParseError("unexpected token '" + tok.text + "'", tok.offset);
        }
    }

    NodePtr parse_ident(const Token& tok) {
        if (tok.text == "x") return make(Kind::VarX);
        if (tok.text == "t") return make(Kind::VarT);
        for (const auto& info : kFunctions) {
            if (tok.text != info.name) continue;
            expect(Tok::LParen, "'(' after function name");
            std::vector<NodePtr> args;
            if (peek().kind != Tok::RParen) {
                args.push_back(parse(0));
                while (peek().kind == Tok::Comma) {
                    next();
                    args.push_back(parse(0));
                }
            }
            const std::size_t close = peek().offset;
            expect(Tok::RParen, "')'");
            if (static_cast<int>(args.size()) != info.arity)
                throw ParseError(std::string(info.name) + " expects " + std::to_string(info.arity) +
                                     " argument(s), got " + std::to_string(args.size()),
                                 close);
            auto n = std::make_shared<Node>();
            n->kind = Kind::Call;
            n->func = info.func;
            n->args = std::move(args);
            return n;
        }
        throw ParseError("unknown identifier '" + tok.text + "'", tok.offset);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string print_node(const Node& n) {
    switch (n.kind) {
        case Kind::Number: {
            // Literals are non-negative by construction; constant() may store negatives.
            const std::string s = format_number(n.value);
            return n.value < 0 ? "(" + s + ")" : s;
        }
        case Kind::VarX: return "x";
        case Kind::VarT: return "t";
        case Kind::Neg: return "(-" + print_node(*n.args[0]) + ")";
        case Kind::Call: {
            std::string s = std::string(func_name(n.func)) + "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) s += ", ";
                s += print_node(*n.args[i]);
            }
            return s + ")";
        }
        default: break;
    }
    const char* op = "+";
    switch (n.kind) {
        case Kind::Sub: op = "-"; break;
        case Kind::Mul: op = "*"; break;
        case Kind::Div: op = "/"; break;
        case Kind::Pow: op = "^"; break;
        default: break;
    }
    return "(" + print_node(*n.args[0]) + " " + op + " " + print_node(*n.args[1]) + ")";
}

double eval_node(const Node& n, double x, double t) {
    switch (n.kind) {
        case Kind::Number: return n.value;
        case Kind::VarX: return x;
        case Kind::VarT: return t;
        case Kind::Neg: return -eval_node(*n.args[0], x, t);
        case Kind::Add: return eval_node(*n.args[0], x, t) + eval_node(*n.args[1], x, t);
        case Kind::Sub: return eval_node(*n.args[0], x, t) - eval_node(*n.args[1], x, t);
        case Kind::Mul: return eval_node(*n.args[0], x, t) * eval_node(*n.args[1], x, t);
        case Kind::Div: {
            const double num = eval_node(*n.args[0], x, t);
            const double den = eval_node(*n.args[1], x, t);
            if (den == 0.0) throw EvalError("division by zero", print_node(n));
            return num / den;
        }
        case Kind::Pow: return std::pow(eval_node(*n.args[0], x, t), eval_node(*n.args[1], x, t));
        case Kind::Call: {
            const double a = eval_node(*n.args[0], x, t);
            switch (n.func) {
                case Func::Sin: return std::sin(a);
                case Func::Cos: return std::cos(a);
                case Func::Exp: return std::exp(a);
                case Func::Sqrt:
                    if (a < 0.0) throw EvalError("sqrt of negative value", print_node(n));
                    return std::sqrt(a);
                case Func::Abs: return std::fabs(a);
                case Func::Tanh: return std::tanh(a);
                case Func::Min: return std::fmin(a, eval_node(*n.args[1], x, t));
                case Func::Max: return std::fmax(a, eval_node(*n.args[1], x, t));
            }
        }
    }
    return 0.0;
}

void scan_vars(const Node& n, bool& ux, bool& ut) {
    if (n.kind == Kind::VarX) ux = true;
    if (n.kind == Kind::VarT) ut = true;
    for (const auto& a : n.args) scan_vars(*a, ux, ut);
}

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const detail::Node> root) : root_(std::move(root)) {
    scan_vars(*root_, uses_x_, uses_t_);
}

Expr Expr::parse(std::string_view source) {
    bool blank = true;
    for (char c : source)
        if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) throw ParseError("empty expression", 0);
    return Expr(Parser(source).parse_all());
}

Expr Expr::constant(double value) {
    auto n = std::make_shared<detail::Node>();
    n->kind = Kind::Number;
    n->value = value;
    return Expr(std::move(n));
}

double Expr::eval(double x, double t) const { return eval_node(*root_, x, t); }

std::string Expr::print() const { return print_node(*root_); }

}  // namespace stefan
