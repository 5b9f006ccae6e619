#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "chaoskit/config.hpp"
#include "chaoskit/csv.hpp"
#include "chaoskit/density_field.hpp"
#include "chaoskit/experiments.hpp"
#include "chaoskit/mean_field.hpp"

namespace {

int cmd_run(const std::string& config_path) {
    chaoskit::ExperimentConfig config = chaoskit::load_config(config_path);
    int code = chaoskit::run_experiment(config);
    std::cout << (code == 0 ? "PASS" : "FAIL") << ": " << config.experiment << " -> "
              << config.output_dir << "/summary.csv\n";
    return code;
}

int cmd_check(const std::string& suite) {
    chaoskit::ExperimentConfig config = chaoskit::builtin_config(suite);
    int code = chaoskit::run_experiment(config);
    std::cout << (code == 0 ? "PASS" : "FAIL") << ": " << config.experiment << " -> "
              << config.output_dir << "/summary.csv\n";
    return code;
}

int cmd_pde(const std::string& config_path) {
    chaoskit::ExperimentConfig config = chaoskit::load_config(config_path);
    config.experiment = "pde_only";
    return chaoskit::run_experiment(config);
}

int cmd_ldp(const std::string& config_path) {
    chaoskit::ExperimentConfig config = chaoskit::load_config(config_path);
    config.experiment = "ldp_suite";
    return chaoskit::run_experiment(config);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chaoskit - particle reaction-diffusion simulator and verification harness"};
    app.require_subcommand(1);

    std::string run_config, pde_config, ldp_config, suite;
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", run_config, "config file")->required();
    auto* check = app.add_subcommand("check", "run a built-in suite "
                                              "(mass_action|chaos|pde|ldp|operators)");
    check->add_option("suite", suite, "suite name")->required();
    auto* pde = app.add_subcommand("pde", "solve the mean-field system for a config");
    pde->add_option("config", pde_config, "config file")->required();
    auto* ldp = app.add_subcommand("ldp", "run the large-deviation checks for a config");
    ldp->add_option("config", ldp_config, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(run_config);
        if (check->parsed()) return cmd_check(suite);
        if (pde->parsed()) return cmd_pde(pde_config);
        if (ldp->parsed()) return cmd_ldp(ldp_config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
