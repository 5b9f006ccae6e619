#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chaoskit/density_field.hpp"
#include "chaoskit/mean_field.hpp"
#include "chaoskit/network.hpp"
#include "chaoskit/rng.hpp"

namespace chaoskit {

/// State of the N-particle jump-diffusion system: wrapped positions on the
/// unit torus, 1-based type labels, the simulation clock, and the run's
/// random stream. N is conserved for the lifetime of a simulation.
struct ParticleState {
    int dim = 1;
    int n_species = 1;
    std::vector<double> pos;    // N*dim, row per particle, always in [0,1)
    std::vector<int> types;     // N entries in 1..n_species
    double time = 0.0;
    Rng rng;                    // sequential per-run stream
    std::uint64_t stream_seed = 0;  // keys the order-independent pair uniforms
    std::uint64_t step_count = 0;

    std::size_t size() const { return types.size(); }
    std::span<const double> position(std::size_t i) const {
        return {pos.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
};

/// Candidate-pair enumeration strategy for the reaction substep.
///  Naive     - reference path, tests every type-matched ordered pair.
///  CellList  - neighbor cells for compactly supported kernels (bit-identical
///              to Naive); falls back to Naive per reaction otherwise.
///  Auto      - CellList for compact kernels, plus an exact aggregated
///              binomial draw for spatially constant kernels.
enum class PairPath { Auto, Naive, CellList };

struct StepOptions {
    PairPath path = PairPath::Auto;
    bool dt_bound_override = false;  // skip the dt * n_r * linf <= 0.1 check
};

struct StepStats {
    std::uint64_t candidates_tested = 0;
    std::uint64_t firings = 0;        // candidates that passed the probability draw
    std::uint64_t applied = 0;        // firings actually applied
    std::uint64_t stale_rejected = 0; // firings dropped because a participant changed
};

/// N i.i.d. draws from rho0: the (species, cell) pair is drawn by mass, the
/// position uniformly within the cell. rho0 must be normalized to 1e-8.
ParticleState sample_initial(const DensityField& rho0, std::size_t n, std::uint64_t seed);

/// Instantaneous firing rate of reaction r on the ordered pair (i, j):
/// (1/N) * chi_r(type_i, type_j) * Phi_r(x_i - x_j). The type indicator is
/// order sensitive: (type_i, type_j) must equal the reaction input exactly.
double pair_rate(const ParticleState& state, const ReactionNetwork& net, std::size_t i,
                 std::size_t j, int reaction_index);

/// One splitting step: independent Gaussian moves (std sigma(type)*sqrt(dt)
/// per coordinate, wrapped), then reaction firings with rates frozen at the
/// post-move positions and pre-step types. Each ordered candidate (r,i,j)
/// fires independently with probability 1-exp(-rate*dt); firings apply in a
/// uniformly random order and are rejected if either participant already
/// changed type within this step. Requires dt * n_r * ||Phi||_inf <= 0.1.
void step(ParticleState& state, const ReactionNetwork& net, const DiffusionSpec& diff,
          double dt, const StepOptions& opts = {}, StepStats* stats = nullptr);

/// Per-species particle counts normalized as grid densities; the returned
/// field integrates to 1.
DensityField empirical_histogram(const ParticleState& state, int bins_per_dim);

std::vector<long> species_counts(const ParticleState& state);

struct SimRecord {
    double time = 0.0;
    std::vector<long> counts;                    // per species
    std::optional<DensityField> histogram;       // when histogram_bins > 0
    std::optional<ParticleState> snapshot;       // when snapshots requested
};

struct SimOptions {
    double dt = 1e-3;
    double t_final = 1.0;
    std::vector<double> record_times;  // default: {0, t_final}
    int histogram_bins = 0;
    bool snapshots = false;
    StepOptions step;
};

struct SimResult {
    std::vector<SimRecord> records;
    StepStats stats;
};

/// Runs one trajectory to t_final, recording at the requested times (snapped
/// to step boundaries). Fully deterministic given the seed.
SimResult simulate_run(const ReactionNetwork& net, const DiffusionSpec& diff,
                       const DensityField& rho0, std::size_t n, std::uint64_t seed,
                       const SimOptions& opts);

/// Independent runs with per-run derived seeds (root seed + run index),
/// executed on up to `threads` workers and merged in run order. threads = 0
/// picks hardware concurrency capped by the CHAOSKIT_THREADS variable.
std::vector<SimResult> simulate_ensemble(const ReactionNetwork& net, const DiffusionSpec& diff,
                                         const DensityField& rho0, std::size_t n,
                                         std::uint64_t root_seed, int runs,
                                         const SimOptions& opts, int threads = 0);

/// Worker count: explicit value, else hardware concurrency, capped by the
/// CHAOSKIT_THREADS environment variable when set.
int resolve_threads(int requested);

}  // namespace chaoskit
