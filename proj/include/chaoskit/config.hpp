#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chaoskit/density_field.hpp"
#include "chaoskit/network.hpp"
#include "chaoskit/particle_system.hpp"

namespace chaoskit {

/// Declarative description of one experiment, read from a flat
/// "key = value" file with dotted section prefixes. Unknown keys are
/// rejected. Defaults: sim.dt=1e-3, pde.M=64, sim.runs=16.
struct ExperimentConfig {
    std::string experiment;            // mass_action_match | chaos_scaling | ldp_suite
                                       // | operator_suite | pde_only
    std::string network_text;          // resolved CRN source (inline or file contents)
    std::vector<double> sigma;         // per species, broadcast from one value
    std::string init_profile = "uniform";  // uniform | cosine | point | file
    std::vector<double> init_masses;   // per species; default: equal split
    double init_cos_amplitude = 0.5;
    std::vector<double> init_cos_phases;
    int init_point_species = 1;
    std::size_t init_point_cell = 0;
    std::string init_file;             // field CSV when init_profile == "file"
    std::vector<std::size_t> n_list = {1024};
    int runs = 16;
    double dt = 1e-3;
    bool dt_bound_override = false;
    double t_final = 0.5;
    std::vector<double> record_times;  // default: {0, t_final}
    int histogram_bins = 32;
    bool snapshots = false;
    int grid_size = 64;                // pde.M
    int dim = 1;
    std::uint64_t seed = 1;
    std::string output_dir;            // default: out_<experiment>
    std::string pair_path = "auto";    // auto | naive | celllist
    // ldp suite knobs
    int ldp_grid = 64;
    int ldp_trials = 100000;
    std::vector<int> ldp_n_list = {2, 8, 64, 256};
    int ldp_k_max = 6;
    int ldp_moment_n = 64;

    ReactionNetwork network() const { return parse_network(network_text); }
    DiffusionSpec diffusion(int n_species) const;
    DensityField initial_field(int n_species) const;
    PairPath path() const;

    /// The step-size bound dt * n_r * |Phi|_inf <= 0.1 for this network.
    void validate_against(const ReactionNetwork& net) const;

    /// Canonical echo of every resolved key.
    std::string echo() const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = "");
ExperimentConfig load_config(const std::string& path);

}  // namespace chaoskit
