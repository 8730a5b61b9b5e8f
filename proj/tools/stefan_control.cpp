#include <iostream>

#include "CLI11.hpp"
#include "stefan/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Multiphase Stefan problem solver and boundary flux optimiser"};
    app.set_version_flag("--version", stefan::cli::kVersion);

    std::string command, config;
    stefan::cli::Flags flags;
    std::uint64_t seed = 0;
    app.add_option("command", command, "solve | optimize | refine | verify")
        ->required()
        ->check(CLI::IsMember({"solve", "optimize", "refine", "verify"}));
    app.add_option("--config", config, "problem configuration file")->required();
    app.add_option("--out", flags.out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", flags.threads, "worker thread cap")->capture_default_str()->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "seed for random initial controls");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : stefan::cli::InvalidInput;
    }
    if (*seed_opt) flags.seed = seed;
    return stefan::cli::run(command, config, flags, std::cout, std::cerr);
}
