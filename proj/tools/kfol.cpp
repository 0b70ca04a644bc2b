#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kfol/app.hpp"

int main(int argc, char** argv) {
    CLI::App app{"k-surface foliations of convex-core complements"};
    app.require_subcommand(1);

    std::string config;
    auto* run = app.add_subcommand("run", "run the command named in a config file");
    run->add_option("config", config, "config file")->required();

    std::string suite, report;
    kfol::VerifyOptions opt;
    auto* verify = app.add_subcommand("verify", "run an acceptance suite");
    verify->add_option("suite", suite, "riccati | bounds | fuchsian | continuation | wedge | foliation")->required();
    verify->add_option("--dt", opt.dt, "continuation step")->check(CLI::PositiveNumber);
    verify->add_option("--report", report, "report file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kfol::kExitOk : kfol::kExitInvalidConfig;
    }
    if (*run) return kfol::run_file(config, std::cout, std::cerr);
    return kfol::run_verify(suite, opt, report, std::cout, std::cerr);
}
