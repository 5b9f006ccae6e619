#pragma once

#include <string>
#include <vector>

#include "chaoskit/config.hpp"
#include "chaoskit/density_field.hpp"

namespace chaoskit {

struct CriterionResult {
    std::string id;
    std::string description;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct ExperimentResult {
    std::vector<CriterionResult> criteria;
    bool all_pass() const {
        for (const auto& c : criteria)
            if (!c.pass) return false;
        return true;
    }
};

/// Average of the per-run histograms at the last record of each run.
DensityField ensemble_mean_histogram(const std::vector<SimResult>& runs);

/// Block-averages a field onto a coarser grid (grid sizes must divide).
DensityField coarsen_field(const DensityField& fine, int coarse_m);

/// Least-squares slope of log(y) on log(x) with its standard error.
struct SlopeFit {
    double slope = 0.0;
    double stderr_ = 0.0;
};
SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Named experiment suites. Each writes its CSV artifacts plus summary.csv
/// and the resolved config echo into config.output_dir.
ExperimentResult run_mass_action_match(const ExperimentConfig& config);
ExperimentResult run_chaos_scaling(const ExperimentConfig& config);
ExperimentResult run_pde_suite(const ExperimentConfig& config);
ExperimentResult run_ldp_suite(const ExperimentConfig& config);
ExperimentResult run_operator_suite(const ExperimentConfig& config);

/// Dispatch on config.experiment; returns the process exit code
/// (0 pass, 1 criterion failure).
int run_experiment(const ExperimentConfig& config);

/// Built-in desk-scale config for a named suite.
ExperimentConfig builtin_config(const std::string& suite);

}  // namespace chaoskit
