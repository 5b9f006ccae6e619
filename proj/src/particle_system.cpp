#include "chaoskit/particle_system.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <thread>

#include "chaoskit/torus.hpp"

namespace chaoskit {

ParticleState sample_initial(const DensityField& rho0, std::size_t n, std::uint64_t seed) {
    if (std::abs(rho0.total_mass() - 1.0) > 1e-8)
        throw std::invalid_argument("sample_initial: rho0 is not normalized");
    if (rho0.min_value() < 0.0)
        throw std::invalid_argument("sample_initial: rho0 has negative density");

    // cumulative mass over (species, cell)
    const std::size_t cells = rho0.cells();
    const int ns = rho0.n_species();
    std::vector<double> cum(static_cast<std::size_t>(ns) * cells);
    double acc = 0.0;
    for (int s = 0; s < ns; ++s) {
        const auto& g = rho0.grid(s + 1);
        for (std::size_t c = 0; c < cells; ++c) {
            acc += g[c] * rho0.cell_volume();
            cum[static_cast<std::size_t>(s) * cells + c] = acc;
        }
    }

    ParticleState st;
    st.dim = rho0.dim();
    st.n_species = ns;
    st.types.resize(n);
    st.pos.resize(n * static_cast<std::size_t>(st.dim));
    st.stream_seed = derive_seed(seed, 0x706169727376ULL);
    st.rng.seed(seed);

    const int m = rho0.grid_size();
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        double u = uni(st.rng) * acc;
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        std::size_t flat = std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
        st.types[i] = static_cast<int>(flat / cells) + 1;
        std::size_t cell = flat % cells;
        // uniform position within the cell, per coordinate
        std::size_t rem = cell;
        for (int a = st.dim - 1; a >= 0; --a) {
            std::size_t idx = rem % static_cast<std::size_t>(m);
            rem /= static_cast<std::size_t>(m);
            st.pos[i * static_cast<std::size_t>(st.dim) + static_cast<std::size_t>(a)] =
                wrap_unit((static_cast<double>(idx) + uni(st.rng)) / static_cast<double>(m));
        }
    }
    return st;
}

double pair_rate(const ParticleState& state, const ReactionNetwork& net, std::size_t i,
                 std::size_t j, int reaction_index) {
    if (i == j) throw std::invalid_argument("pair_rate: i and j must be distinct");
    const Reaction& r = net.reactions().at(static_cast<std::size_t>(reaction_index));
    if (state.types[i] != r.in_a || state.types[j] != r.in_b) return 0.0;
    double phi = net.kernel_of(r).eval_dist_sq(
        min_image_dist_sq(state.position(i), state.position(j)));
    return phi / static_cast<double>(state.size());
}

namespace {

struct Candidate {
    int reaction;
    std::uint32_t i, j;
    bool operator<(const Candidate& o) const {
        if (reaction != o.reaction) return reaction < o.reaction;
        if (i != o.i) return i < o.i;
        return j < o.j;
    }
};

// Success probability of a candidate with kernel value phi.
inline double fire_prob(double phi, double n, double dt) {
    return -std::expm1(-phi / n * dt);
}

void diffusion_substep(ParticleState& st, const DiffusionSpec& diff, double dt) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sqrt_dt = std::sqrt(dt);
    const std::size_t d = static_cast<std::size_t>(st.dim);
    for (std::size_t i = 0; i < st.size(); ++i) {
        double sigma = diff.of(st.types[i]);
        if (sigma == 0.0) continue;
        for (std::size_t a = 0; a < d; ++a) {
            double& x = st.pos[i * d + a];
            x = wrap_unit(x + sigma * sqrt_dt * normal(st.rng));
        }
    }
}

// Firing probability precomputed once per reaction when the kernel takes a
// single nonzero value (tophat on its support, constant everywhere); zero
// means the kernel varies and the probability is computed per pair.
inline double flat_fire_prob(const Kernel& kernel, double n, double dt) {
    if (kernel.shape == KernelShape::Gaussian) return 0.0;
    return fire_prob(kernel.linf_norm(), n, dt);
}

// Candidate tests shared by the naive and cell-list paths. The accept
// decision depends only on (stream_seed, step, reaction, i, j), never on
// enumeration order, which is what makes the two paths bit-identical.
inline void test_candidate(const ParticleState& st, const Kernel& kernel, double flat_p,
                           int ri, std::uint32_t i, std::uint32_t j, double dt,
                           std::vector<Candidate>& out, StepStats& stats) {
    ++stats.candidates_tested;
    double phi = kernel.eval_dist_sq(min_image_dist_sq(st.position(i), st.position(j)));
    if (phi <= 0.0) return;
    double p = flat_p > 0.0 ? flat_p : fire_prob(phi, static_cast<double>(st.size()), dt);
    double u = hash_uniform(pair_key(st.stream_seed, st.step_count,
                                     static_cast<std::uint64_t>(ri), i, j));
    if (u < p) out.push_back({ri, i, j});
}

std::vector<std::vector<std::uint32_t>> bin_by_type(const ParticleState& st) {
    std::vector<std::vector<std::uint32_t>> lists(static_cast<std::size_t>(st.n_species) + 1);
    for (std::size_t i = 0; i < st.size(); ++i)
        lists[static_cast<std::size_t>(st.types[i])].push_back(static_cast<std::uint32_t>(i));
    return lists;
}

void enumerate_naive(const ParticleState& st, const Kernel& kernel, int ri, const Reaction& r,
                     const std::vector<std::vector<std::uint32_t>>& by_type, double dt,
                     std::vector<Candidate>& out, StepStats& stats) {
    const double flat_p = flat_fire_prob(kernel, static_cast<double>(st.size()), dt);
    const auto& li = by_type[static_cast<std::size_t>(r.in_a)];
    const auto& lj = by_type[static_cast<std::size_t>(r.in_b)];
    for (std::uint32_t i : li)
        for (std::uint32_t j : lj) {
            if (i == j) continue;
            test_candidate(st, kernel, flat_p, ri, i, j, dt, out, stats);
        }
}

// Cell list over the j-side species with cell side >= the kernel radius.
void enumerate_cell_list(const ParticleState& st, const Kernel& kernel, int ri,
                         const Reaction& r,
                         const std::vector<std::vector<std::uint32_t>>& by_type, double dt,
                         std::vector<Candidate>& out, StepStats& stats) {
    const double radius = kernel.support_radius();
    const double flat_p = flat_fire_prob(kernel, static_cast<double>(st.size()), dt);
    const int ncells = std::max(1, static_cast<int>(std::floor(1.0 / radius)));
    if (ncells < 2) {  // support covers the torus; nothing to prune
        enumerate_naive(st, kernel, ri, r, by_type, dt, out, stats);
        return;
    }
    const std::size_t d = static_cast<std::size_t>(st.dim);
    const auto& lj = by_type[static_cast<std::size_t>(r.in_b)];

    auto cell_of = [&](std::uint32_t p) {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < d; ++a) {
            int c = static_cast<int>(st.pos[p * d + a] * ncells);
            c = std::min(c, ncells - 1);
            flat = flat * static_cast<std::size_t>(ncells) + static_cast<std::size_t>(c);
        }
        return flat;
    };

    std::size_t total_cells = 1;
    for (std::size_t a = 0; a < d; ++a) total_cells *= static_cast<std::size_t>(ncells);
    std::vector<std::vector<std::uint32_t>> bins(total_cells);
    for (std::uint32_t j : lj) bins[cell_of(j)].push_back(j);

    // neighbor offsets {-1,0,1} per axis, deduplicated modulo ncells
    std::vector<int> offsets;
    for (int o : {-1, 0, 1}) {
        int w = ((o % ncells) + ncells) % ncells;
        if (std::find(offsets.begin(), offsets.end(), w) == offsets.end()) offsets.push_back(w);
    }

    std::vector<std::size_t> neighbor_cells;
    std::vector<int> ci(d);
    for (std::uint32_t i : by_type[static_cast<std::size_t>(r.in_a)]) {
        for (std::size_t a = 0; a < d; ++a) {
            int c = static_cast<int>(st.pos[i * d + a] * ncells);
            ci[a] = std::min(c, ncells - 1);
        }
        neighbor_cells.clear();
        // cartesian product of per-axis neighbor indices
        std::size_t combos = 1;
        for (std::size_t a = 0; a < d; ++a) combos *= offsets.size();
        for (std::size_t q = 0; q < combos; ++q) {
            std::size_t rem = q, flat = 0;
            for (std::size_t a = 0; a < d; ++a) {
                int off = offsets[rem % offsets.size()];
                rem /= offsets.size();
                flat = flat * static_cast<std::size_t>(ncells) +
                       static_cast<std::size_t>((ci[a] + off) % ncells);
            }
            neighbor_cells.push_back(flat);
        }
        for (std::size_t cell : neighbor_cells)
            for (std::uint32_t j : bins[cell]) {
                if (i == j) continue;
                test_candidate(st, kernel, flat_p, ri, i, j, dt, out, stats);
            }
    }
}

// Exact aggregated draw for spatially constant kernels: every type-matched
// ordered pair shares the same success probability, so the number of firings
// is Binomial(#pairs, p) and the firing pairs are a uniform subset.
void enumerate_aggregate(ParticleState& st, const Kernel& kernel, int ri, const Reaction& r,
                         const std::vector<std::vector<std::uint32_t>>& by_type, double dt,
                         std::vector<Candidate>& out, StepStats& stats) {
    const auto& li = by_type[static_cast<std::size_t>(r.in_a)];
    const auto& lj = by_type[static_cast<std::size_t>(r.in_b)];
    const bool same = r.in_a == r.in_b;
    const std::uint64_t n_pairs = same
        ? static_cast<std::uint64_t>(li.size()) * (li.size() ? li.size() - 1 : 0)
        : static_cast<std::uint64_t>(li.size()) * lj.size();
    stats.candidates_tested += n_pairs;
    if (n_pairs == 0) return;
    double p = fire_prob(kernel.linf_norm(), static_cast<double>(st.size()), dt);
    if (p <= 0.0) return;

    std::binomial_distribution<std::uint64_t> binom(n_pairs, p);
    std::uint64_t k = binom(st.rng);
    std::uniform_int_distribution<std::uint64_t> pick(0, n_pairs - 1);
    std::set<std::uint64_t> chosen;
    while (chosen.size() < k) chosen.insert(pick(st.rng));
    for (std::uint64_t a : chosen) {
        std::uint32_t i, j;
        if (same) {
            std::uint64_t q = a / (li.size() - 1), rrem = a % (li.size() - 1);
            if (rrem >= q) ++rrem;
            i = li[q];
            j = li[rrem];
        } else {
            i = li[a / lj.size()];
            j = lj[a % lj.size()];
        }
        out.push_back({ri, i, j});
    }
}

}  // namespace

void step(ParticleState& st, const ReactionNetwork& net, const DiffusionSpec& diff, double dt,
          const StepOptions& opts, StepStats* stats_out) {
    if (dt <= 0.0) throw std::invalid_argument("step: dt must be > 0");
    if (!opts.dt_bound_override &&
        dt * static_cast<double>(net.n_reactions()) * net.total_linf() > 0.1 + 1e-15)
        throw std::invalid_argument(
            "step: dt violates the bound dt * n_r * |Phi|_inf <= 0.1");

    StepStats local;
    StepStats& stats = stats_out ? *stats_out : local;

    diffusion_substep(st, diff, dt);

    auto by_type = bin_by_type(st);
    std::vector<Candidate> firings;
    for (int ri = 0; ri < net.n_reactions(); ++ri) {
        const Reaction& r = net.reactions()[static_cast<std::size_t>(ri)];
        const Kernel& kernel = net.kernel_of(r);
        switch (opts.path) {
            case PairPath::Naive:
                enumerate_naive(st, kernel, ri, r, by_type, dt, firings, stats);
                break;
            case PairPath::CellList:
                if (kernel.compact_support())
                    enumerate_cell_list(st, kernel, ri, r, by_type, dt, firings, stats);
                else
                    enumerate_naive(st, kernel, ri, r, by_type, dt, firings, stats);
                break;
            case PairPath::Auto:
                if (kernel.shape == KernelShape::Constant)
                    enumerate_aggregate(st, kernel, ri, r, by_type, dt, firings, stats);
                else if (kernel.compact_support())
                    enumerate_cell_list(st, kernel, ri, r, by_type, dt, firings, stats);
                else
                    enumerate_naive(st, kernel, ri, r, by_type, dt, firings, stats);
                break;
        }
    }
    stats.firings += firings.size();

    // canonical order first so the shuffle consumes the stream identically
    // across enumeration paths, then a uniformly random processing order
    std::sort(firings.begin(), firings.end());
    std::shuffle(firings.begin(), firings.end(), st.rng);

    std::vector<char> participated(st.size(), 0);
    for (const Candidate& c : firings) {
        if (participated[c.i] || participated[c.j]) {
            ++stats.stale_rejected;
            continue;
        }
        const Reaction& r = net.reactions()[static_cast<std::size_t>(c.reaction)];
        st.types[c.i] = r.out_a;
        st.types[c.j] = r.out_b;
        participated[c.i] = participated[c.j] = 1;
        ++stats.applied;
    }

    st.time += dt;
    ++st.step_count;
}

DensityField empirical_histogram(const ParticleState& st, int bins_per_dim) {
    if (bins_per_dim < 1) throw std::invalid_argument("empirical_histogram: bins must be >= 1");
    DensityField f(st.dim, bins_per_dim, st.n_species, st.time);
    const double weight = 1.0 / (static_cast<double>(st.size()) * f.cell_volume());
    const std::size_t d = static_cast<std::size_t>(st.dim);
    std::vector<int> idx(d);
    for (std::size_t i = 0; i < st.size(); ++i) {
        for (std::size_t a = 0; a < d; ++a) {
            int b = static_cast<int>(st.pos[i * d + a] * bins_per_dim);
            idx[a] = std::min(b, bins_per_dim - 1);
        }
        f.grid(st.types[i])[f.flat_index(idx)] += weight;
    }
    return f;
}

std::vector<long> species_counts(const ParticleState& st) {
    std::vector<long> counts(static_cast<std::size_t>(st.n_species), 0);
    for (int t : st.types) ++counts[static_cast<std::size_t>(t - 1)];
    return counts;
}

SimResult simulate_run(const ReactionNetwork& net, const DiffusionSpec& diff,
                       const DensityField& rho0, std::size_t n, std::uint64_t seed,
                       const SimOptions& opts) {
    if (opts.dt <= 0.0) throw std::invalid_argument("simulate_run: dt must be > 0");
    ParticleState st = sample_initial(rho0, n, seed);

    const long n_steps = std::lround(opts.t_final / opts.dt);
    std::vector<double> rec = opts.record_times;
    if (rec.empty()) rec = {0.0, opts.t_final};
    std::vector<long> rec_steps;
    for (double t : rec) rec_steps.push_back(std::clamp(std::lround(t / opts.dt), 0L, n_steps));
    std::sort(rec_steps.begin(), rec_steps.end());
    rec_steps.erase(std::unique(rec_steps.begin(), rec_steps.end()), rec_steps.end());

    SimResult out;
    std::size_t next = 0;
    for (long s = 0; s <= n_steps; ++s) {
        if (next < rec_steps.size() && rec_steps[next] == s) {
            SimRecord r;
            r.time = st.time;
            r.counts = species_counts(st);
            if (opts.histogram_bins > 0) r.histogram = empirical_histogram(st, opts.histogram_bins);
            if (opts.snapshots) r.snapshot = st;
            out.records.push_back(std::move(r));
            ++next;
        }
        if (s < n_steps) step(st, net, diff, opts.dt, opts.step, &out.stats);
    }
    return out;
}

int resolve_threads(int requested) {
    int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    if (const char* env = std::getenv("CHAOSKIT_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) t = std::min(t, cap);
    }
    return t;
}

std::vector<SimResult> simulate_ensemble(const ReactionNetwork& net, const DiffusionSpec& diff,
                                         const DensityField& rho0, std::size_t n,
                                         std::uint64_t root_seed, int runs,
                                         const SimOptions& opts, int threads) {
    std::vector<SimResult> results(static_cast<std::size_t>(runs));
    const int workers = std::min(resolve_threads(threads), std::max(runs, 1));
    std::atomic<int> cursor{0};
    auto work = [&] {
        for (;;) {
            int run = cursor.fetch_add(1);
            if (run >= runs) return;
            results[static_cast<std::size_t>(run)] = simulate_run(
                net, diff, rho0, n, derive_seed(root_seed, static_cast<std::uint64_t>(run)),
                opts);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return results;
}

}  // namespace chaoskit
