#include "chaoskit/discrete_operators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "chaoskit/particle_system.hpp"
#include "chaoskit/rng.hpp"
#include "chaoskit/torus.hpp"

namespace chaoskit {

DiscreteStateSpace::DiscreteStateSpace(int dim, int grid_points, int n_species, int n_particles)
    : dim_(dim), m_(grid_points), n_species_(n_species), n_particles_(n_particles) {
    if (dim < 1 || grid_points < 1 || n_species < 1 || n_particles < 1)
        throw std::invalid_argument("DiscreteStateSpace: all sizes must be positive");
    cells_ = 1;
    for (int a = 0; a < dim; ++a) cells_ *= static_cast<std::size_t>(grid_points);
    single_ = cells_ * static_cast<std::size_t>(n_species);
    states_ = 1;
    pow_.resize(static_cast<std::size_t>(n_particles) + 1);
    pow_[0] = 1;
    for (int i = 0; i < n_particles; ++i) {
        if (states_ > 1000000 / single_)
            throw std::invalid_argument("DiscreteStateSpace: more than 10^6 states");
        states_ *= single_;
        pow_[static_cast<std::size_t>(i) + 1] = states_;
    }
    state_vol_ = 1.0;
    for (int i = 0; i < n_particles; ++i) state_vol_ /= static_cast<double>(cells_);
}

std::size_t DiscreteStateSpace::particle_state(std::size_t state, int i) const {
    return state / pow_[static_cast<std::size_t>(i)] % single_;
}

std::size_t DiscreteStateSpace::replace_particle_state(std::size_t state, int i,
                                                       std::size_t sub) const {
    std::size_t p = pow_[static_cast<std::size_t>(i)];
    std::size_t old = state / p % single_;
    return state + (sub - old) * p;
}

std::vector<double> DiscreteStateSpace::cell_center(std::size_t cell) const {
    std::vector<double> x(static_cast<std::size_t>(dim_));
    for (int a = dim_ - 1; a >= 0; --a) {
        x[static_cast<std::size_t>(a)] =
            (static_cast<double>(cell % static_cast<std::size_t>(m_)) + 0.5) /
            static_cast<double>(m_);
        cell /= static_cast<std::size_t>(m_);
    }
    return x;
}

std::vector<double> DiscreteStateSpace::permute(std::span<const double> v,
                                                const std::vector<int>& tau) const {
    if (v.size() != states_ || static_cast<int>(tau.size()) != n_particles_)
        throw std::invalid_argument("permute: size mismatch");
    std::vector<double> out(states_);
    std::vector<std::size_t> subs(static_cast<std::size_t>(n_particles_));
    for (std::size_t y = 0; y < states_; ++y) {
        for (int i = 0; i < n_particles_; ++i)
            subs[static_cast<std::size_t>(i)] = particle_state(y, i);
        std::size_t ty = 0;
        for (int i = n_particles_ - 1; i >= 0; --i)
            ty = ty * single_ + subs[static_cast<std::size_t>(tau[static_cast<std::size_t>(i)])];
        out[y] = v[ty];
    }
    return out;
}

namespace {

// Kernel values at all cell-center displacement indices.
std::vector<double> displacement_table(const DiscreteStateSpace& sp, const Kernel& k) {
    std::vector<double> tab(sp.cells());
    for (std::size_t c = 0; c < sp.cells(); ++c) {
        auto x = sp.cell_center(c);
        auto origin = sp.cell_center(0);
        for (std::size_t a = 0; a < x.size(); ++a) x[a] -= origin[a];
        tab[c] = k.eval(x);
    }
    return tab;
}

std::size_t displacement_index(const DiscreteStateSpace& sp, std::size_t cell_i,
                               std::size_t cell_j) {
    const std::size_t m = static_cast<std::size_t>(sp.grid_points());
    // per-axis (ci - cj) mod m, reassembled row-major
    std::size_t d[3] = {0, 0, 0};
    for (int a = sp.dim() - 1; a >= 0; --a) {
        d[a] = (cell_i % m + m - cell_j % m) % m;
        cell_i /= m;
        cell_j /= m;
    }
    std::size_t out = 0;
    for (int a = 0; a < sp.dim(); ++a) out = out * m + d[a];
    return out;
}

double sorted_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += t;
    return acc;
}

}  // namespace

std::vector<double> apply_jump_generator(const DiscreteStateSpace& sp,
                                         const ReactionNetwork& net,
                                         std::span<const double> phi) {
    if (phi.size() != sp.states())
        throw std::invalid_argument("apply_jump_generator: vector length mismatch");
    if (net.n_species() > sp.n_species())
        throw std::invalid_argument("apply_jump_generator: network species exceed the state space");
    const int np = sp.n_particles();
    const double inv_n = 1.0 / static_cast<double>(np);
    std::vector<std::vector<double>> tabs;
    for (const auto& r : net.reactions()) tabs.push_back(displacement_table(sp, net.kernel_of(r)));

    std::vector<double> out(sp.states(), 0.0);
    std::vector<double> terms;
    for (std::size_t y = 0; y < sp.states(); ++y) {
        terms.clear();
        for (int ri = 0; ri < net.n_reactions(); ++ri) {
            const Reaction& r = net.reactions()[static_cast<std::size_t>(ri)];
            for (int i = 0; i < np; ++i) {
                std::size_t si = sp.particle_state(y, i);
                if (sp.species_of(si) != r.in_a) continue;
                for (int j = 0; j < np; ++j) {
                    if (j == i) continue;
                    std::size_t sj = sp.particle_state(y, j);
                    if (sp.species_of(sj) != r.in_b) continue;
                    double phi_val = tabs[static_cast<std::size_t>(ri)][displacement_index(
                        sp, sp.cell_of(si), sp.cell_of(sj))];
                    if (phi_val == 0.0) continue;
                    std::size_t target = sp.replace_particle_state(
                        y, i, sp.sub_state(sp.cell_of(si), r.out_a));
                    target = sp.replace_particle_state(
                        target, j, sp.sub_state(sp.cell_of(sj), r.out_b));
                    terms.push_back(phi_val * (phi[target] - phi[y]));
                }
            }
        }
        out[y] = inv_n * sorted_sum(terms);
    }
    return out;
}

std::vector<double> apply_jump_adjoint(const DiscreteStateSpace& sp, const ReactionNetwork& net,
                                       std::span<const double> psi) {
    if (psi.size() != sp.states())
        throw std::invalid_argument("apply_jump_adjoint: vector length mismatch");
    if (net.n_species() > sp.n_species())
        throw std::invalid_argument("apply_jump_adjoint: network species exceed the state space");
    const int np = sp.n_particles();
    const double inv_n = 1.0 / static_cast<double>(np);
    std::vector<std::vector<double>> tabs;
    for (const auto& r : net.reactions()) tabs.push_back(displacement_table(sp, net.kernel_of(r)));

    std::vector<double> out(sp.states(), 0.0);
    std::vector<double> terms;
    for (std::size_t y = 0; y < sp.states(); ++y) {
        terms.clear();
        for (int ri = 0; ri < net.n_reactions(); ++ri) {
            const Reaction& r = net.reactions()[static_cast<std::size_t>(ri)];
            for (int i = 0; i < np; ++i) {
                std::size_t si = sp.particle_state(y, i);
                int spec_i = sp.species_of(si);
                bool in_plus_i = spec_i == r.out_a;
                bool in_minus_i = spec_i == r.in_a;
                if (!in_plus_i && !in_minus_i) continue;
                for (int j = 0; j < np; ++j) {
                    if (j == i) continue;
                    std::size_t sj = sp.particle_state(y, j);
                    int spec_j = sp.species_of(sj);
                    double acc = 0.0;
                    double phi_val = tabs[static_cast<std::size_t>(ri)][displacement_index(
                        sp, sp.cell_of(si), sp.cell_of(sj))];
                    if (phi_val == 0.0) continue;
                    if (in_plus_i && spec_j == r.out_b) {
                        std::size_t source = sp.replace_particle_state(
                            y, i, sp.sub_state(sp.cell_of(si), r.in_a));
                        source = sp.replace_particle_state(
                            source, j, sp.sub_state(sp.cell_of(sj), r.in_b));
                        acc += psi[source];
                    }
                    if (in_minus_i && spec_j == r.in_b) acc -= psi[y];
                    if (acc != 0.0) terms.push_back(phi_val * acc);
                }
            }
        }
        out[y] = inv_n * sorted_sum(terms);
    }
    return out;
}

double state_inner_product(const DiscreteStateSpace& sp, std::span<const double> a,
                           std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t y = 0; y < sp.states(); ++y) acc += a[y] * b[y];
    return acc * sp.state_volume();
}

std::vector<RateTriplet> forward_rate_matrix(const DiscreteStateSpace& sp,
                                             const ReactionNetwork& net) {
    if (net.n_species() > sp.n_species())
        throw std::invalid_argument("forward_rate_matrix: network species exceed the state space");
    const int np = sp.n_particles();
    const double inv_n = 1.0 / static_cast<double>(np);
    std::vector<std::vector<double>> tabs;
    for (const auto& r : net.reactions()) tabs.push_back(displacement_table(sp, net.kernel_of(r)));

    std::vector<RateTriplet> out;
    for (std::size_t y = 0; y < sp.states(); ++y) {
        double outflow = 0.0;
        for (int ri = 0; ri < net.n_reactions(); ++ri) {
            const Reaction& r = net.reactions()[static_cast<std::size_t>(ri)];
            for (int i = 0; i < np; ++i) {
                std::size_t si = sp.particle_state(y, i);
                if (sp.species_of(si) != r.in_a) continue;
                for (int j = 0; j < np; ++j) {
                    if (j == i) continue;
                    std::size_t sj = sp.particle_state(y, j);
                    if (sp.species_of(sj) != r.in_b) continue;
                    double rate = inv_n * tabs[static_cast<std::size_t>(ri)][displacement_index(
                                              sp, sp.cell_of(si), sp.cell_of(sj))];
                    if (rate == 0.0) continue;
                    std::size_t target = sp.replace_particle_state(
                        y, i, sp.sub_state(sp.cell_of(si), r.out_a));
                    target = sp.replace_particle_state(
                        target, j, sp.sub_state(sp.cell_of(sj), r.out_b));
                    out.push_back({target, y, rate});
                    outflow += rate;
                }
            }
        }
        if (outflow != 0.0) out.push_back({y, y, -outflow});
    }
    return out;
}

std::vector<double> apply_triplets(std::size_t n, const std::vector<RateTriplet>& m,
                                   std::span<const double> v) {
    std::vector<double> out(n, 0.0);
    for (const auto& t : m) out[t.row] += t.value * v[t.col];
    return out;
}

std::vector<double> triplet_column_sums(std::size_t n, const std::vector<RateTriplet>& m) {
    std::vector<double> out(n, 0.0);
    for (const auto& t : m) out[t.col] += t.value;
    return out;
}

DenseMatrix DenseMatrix::from_triplets(std::size_t n, const std::vector<RateTriplet>& t) {
    DenseMatrix m(n);
    for (const auto& e : t) m.at(e.row, e.col) += e.value;
    return m;
}

DenseMatrix DenseMatrix::multiply(const DenseMatrix& o) const {
    DenseMatrix out(n_);
    for (std::size_t r = 0; r < n_; ++r)
        for (std::size_t k = 0; k < n_; ++k) {
            double v = at(r, k);
            if (v == 0.0) continue;
            for (std::size_t c = 0; c < n_; ++c) out.at(r, c) += v * o.at(k, c);
        }
    return out;
}

std::vector<double> DenseMatrix::apply(std::span<const double> v) const {
    std::vector<double> out(n_, 0.0);
    for (std::size_t r = 0; r < n_; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < n_; ++c) acc += at(r, c) * v[c];
        out[r] = acc;
    }
    return out;
}

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

DenseMatrix DenseMatrix::exponential(double t) const {
    // scale so |A t / 2^s| is comfortably inside the Taylor radius
    double norm = max_abs() * static_cast<double>(n_) * std::abs(t);
    int s = 0;
    while (norm > 0.5 && s < 60) {
        norm *= 0.5;
        ++s;
    }
    const double scale = t / std::ldexp(1.0, s);

    DenseMatrix result(n_);
    for (std::size_t i = 0; i < n_; ++i) result.at(i, i) = 1.0;
    DenseMatrix term = result;
    for (int k = 1; k <= 24; ++k) {
        // term <- term * (A scale) / k
        DenseMatrix next(n_);
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t m = 0; m < n_; ++m) {
                double v = term.at(r, m);
                if (v == 0.0) continue;
                for (std::size_t c = 0; c < n_; ++c)
                    next.at(r, c) += v * at(m, c) * scale / static_cast<double>(k);
            }
        term = std::move(next);
        for (std::size_t i = 0; i < n_ * n_; ++i) result.a_[i] += term.a_[i];
        if (term.max_abs() < 1e-19) break;
    }
    for (int q = 0; q < s; ++q) result = result.multiply(result);
    return result;
}

DynkinResult dynkin_residual(const ReactionNetwork& net, const DiffusionSpec& diff,
                             const DensityField& rho0, std::size_t n_particles, double t_final,
                             double dt, int runs, std::uint64_t seed, const TypedObservable& obs,
                             int threads) {
    if (t_final < 0.0 || dt <= 0.0) throw std::invalid_argument("dynkin_residual: bad times");
    if (t_final > 0.1 + 1e-12)
        throw std::invalid_argument("dynkin_residual: t must be <= 0.1");
    const long n_steps = std::lround(t_final / dt);

    auto phi_bar = [&](const ParticleState& st) {
        double acc = 0.0;
        for (std::size_t i = 0; i < st.size(); ++i)
            acc += obs.value(st.position(i), st.types[i]);
        return acc / static_cast<double>(st.size());
    };
    // (Delta_N + S_N) applied to the empirical average of obs
    auto generator_on_mean = [&](const ParticleState& st) {
        const double n = static_cast<double>(st.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < st.size(); ++i) {
            double sigma = diff.of(st.types[i]);
            acc += 0.5 * sigma * sigma * obs.laplacian(st.position(i), st.types[i]) / n;
        }
        for (const auto& r : net.reactions()) {
            const Kernel& k = net.kernel_of(r);
            for (std::size_t i = 0; i < st.size(); ++i) {
                if (st.types[i] != r.in_a) continue;
                for (std::size_t j = 0; j < st.size(); ++j) {
                    if (i == j || st.types[j] != r.in_b) continue;
                    double phi = k.eval_dist_sq(
                        min_image_dist_sq(st.position(i), st.position(j)));
                    if (phi == 0.0) continue;
                    double jump = obs.value(st.position(i), r.out_a) -
                                  obs.value(st.position(i), st.types[i]) +
                                  obs.value(st.position(j), r.out_b) -
                                  obs.value(st.position(j), st.types[j]);
                    acc += phi * jump / (n * n);
                }
            }
        }
        return acc;
    };

    std::vector<double> residuals(static_cast<std::size_t>(runs));
    std::vector<double> finals(static_cast<std::size_t>(runs));
    std::atomic<int> cursor{0};
    auto work = [&] {
        for (;;) {
            int run = cursor.fetch_add(1);
            if (run >= runs) return;
            ParticleState st = sample_initial(
                rho0, n_particles, derive_seed(seed, static_cast<std::uint64_t>(run)));
            double phi0 = phi_bar(st);
            double integral = 0.0;
            for (long s = 0; s < n_steps; ++s) {
                integral += dt * generator_on_mean(st);
                step(st, net, diff, dt);
            }
            double phit = phi_bar(st);
            residuals[static_cast<std::size_t>(run)] = phit - phi0 - integral;
            finals[static_cast<std::size_t>(run)] = phit;
        }
    };
    const int workers = std::min(resolve_threads(threads), std::max(runs, 1));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    auto mean_ci = [&](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= std::max<double>(1.0, static_cast<double>(v.size() - 1));
        return std::pair{mean, 2.5758293035489 * std::sqrt(var / static_cast<double>(v.size()))};
    };
    DynkinResult out;
    std::tie(out.residual, out.ci99) = mean_ci(residuals);
    std::tie(out.mean_final, out.mean_final_ci99) = mean_ci(finals);
    return out;
}

}  // namespace chaoskit
