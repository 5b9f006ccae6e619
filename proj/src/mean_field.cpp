#include "chaoskit/mean_field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "chaoskit/spectral.hpp"
#include "chaoskit/torus.hpp"

namespace chaoskit {

namespace {

// Kernel values at all cell-center displacements delta/M, delta in Z_M^d.
std::vector<double> tabulate_kernel(const Kernel& k, int dim, int m) {
    std::size_t cells = 1;
    for (int a = 0; a < dim; ++a) cells *= static_cast<std::size_t>(m);
    std::vector<double> tab(cells);
    std::vector<double> dx(static_cast<std::size_t>(dim));
    for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rem = c;
        for (int a = dim - 1; a >= 0; --a) {
            dx[static_cast<std::size_t>(a)] =
                static_cast<double>(rem % static_cast<std::size_t>(m)) / static_cast<double>(m);
            rem /= static_cast<std::size_t>(m);
        }
        tab[c] = k.eval(dx);
    }
    return tab;
}

std::vector<double> convolve_direct(const std::vector<double>& tab,
                                    const std::vector<double>& u, int dim, int m,
                                    double cellvol) {
    const std::size_t cells = u.size();
    std::vector<double> out(cells, 0.0);
    // delta = c - c' per axis, modulo m
    std::vector<std::size_t> ci(static_cast<std::size_t>(dim)), cj(static_cast<std::size_t>(dim));
    for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rem = c;
        for (int a = dim - 1; a >= 0; --a) {
            ci[static_cast<std::size_t>(a)] = rem % static_cast<std::size_t>(m);
            rem /= static_cast<std::size_t>(m);
        }
        double acc = 0.0;
        for (std::size_t cp = 0; cp < cells; ++cp) {
            std::size_t rem2 = cp, delta = 0;
            for (int a = dim - 1; a >= 0; --a) {
                cj[static_cast<std::size_t>(a)] = rem2 % static_cast<std::size_t>(m);
                rem2 /= static_cast<std::size_t>(m);
            }
            for (int a = 0; a < dim; ++a) {
                std::size_t d = (ci[static_cast<std::size_t>(a)] + static_cast<std::size_t>(m) -
                                 cj[static_cast<std::size_t>(a)]) %
                                static_cast<std::size_t>(m);
                delta = delta * static_cast<std::size_t>(m) + d;
            }
            acc += tab[delta] * u[cp];
        }
        out[c] = acc * cellvol;
    }
    return out;
}

std::vector<double> convolve_transform(const std::vector<double>& tab,
                                       const std::vector<double>& u, int dim, int m,
                                       double cellvol) {
    const std::size_t cells = u.size();
    std::vector<std::complex<double>> fk(cells), fu(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        fk[c] = tab[c];
        fu[c] = u[c];
    }
    dft_nd(fk, dim, m, false);
    dft_nd(fu, dim, m, false);
    for (std::size_t c = 0; c < cells; ++c) fu[c] *= fk[c];
    dft_nd(fu, dim, m, true);
    std::vector<double> out(cells);
    for (std::size_t c = 0; c < cells; ++c) out[c] = fu[c].real() * cellvol;
    return out;
}

}  // namespace

std::vector<double> periodic_convolve(const Kernel& kernel, const std::vector<double>& field,
                                      int dim, int grid_size, ConvolvePath path) {
    std::size_t cells = 1;
    for (int a = 0; a < dim; ++a) cells *= static_cast<std::size_t>(grid_size);
    if (field.size() != cells) throw std::invalid_argument("periodic_convolve: size mismatch");
    const double cellvol = 1.0 / static_cast<double>(cells);
    auto tab = tabulate_kernel(kernel, dim, grid_size);
    if (path == ConvolvePath::Direct || (path == ConvolvePath::Auto && cells <= 128))
        return convolve_direct(tab, field, dim, grid_size, cellvol);
    return convolve_transform(tab, field, dim, grid_size, cellvol);
}

DensityField reaction_rhs(const ReactionNetwork& net, const DensityField& field,
                          ConvolvePath path) {
    if (net.n_species() != field.n_species())
        throw std::invalid_argument("reaction_rhs: species-count mismatch");
    DensityField rhs(field.dim(), field.grid_size(), field.n_species(), field.time());
    for (const auto& r : net.reactions()) {
        const Kernel& k = net.kernel_of(r);
        const auto& uk = field.grid(r.in_a);
        const auto& ul = field.grid(r.in_b);
        auto conv_l = periodic_convolve(k, ul, field.dim(), field.grid_size(), path);
        auto conv_k = periodic_convolve(k, uk, field.dim(), field.grid_size(), path);
        auto& loss_a = rhs.grid(r.in_a);
        auto& loss_b = rhs.grid(r.in_b);
        for (std::size_t c = 0; c < field.cells(); ++c) {
            loss_a[c] -= conv_l[c] * uk[c];
            loss_b[c] -= conv_k[c] * ul[c];
        }
        auto& gain_a = rhs.grid(r.out_a);
        auto& gain_b = rhs.grid(r.out_b);
        for (std::size_t c = 0; c < field.cells(); ++c) {
            gain_a[c] += conv_l[c] * uk[c];
            gain_b[c] += conv_k[c] * ul[c];
        }
    }
    return rhs;
}

namespace {

void apply_heat_multiplier(std::vector<double>& u, int dim, int m, double sigma, double dt) {
    if (sigma == 0.0 || dt == 0.0) return;
    std::vector<std::complex<double>> hat(u.size());
    for (std::size_t c = 0; c < u.size(); ++c) hat[c] = u[c];
    dft_nd(hat, dim, m, false);
    using std::numbers::pi;
    const double coef = 0.5 * sigma * sigma * dt;
    std::vector<int> idx(static_cast<std::size_t>(dim));
    for (std::size_t c = 0; c < hat.size(); ++c) {
        std::size_t rem = c;
        double k2 = 0.0;
        for (int a = dim - 1; a >= 0; --a) {
            int k = static_cast<int>(rem % static_cast<std::size_t>(m));
            rem /= static_cast<std::size_t>(m);
            double f = 2.0 * pi * signed_freq(k, m);
            k2 += f * f;
        }
        hat[c] *= std::exp(-coef * k2);
    }
    dft_nd(hat, dim, m, true);
    for (std::size_t c = 0; c < u.size(); ++c) u[c] = hat[c].real();
}

}  // namespace

DensityField pde_step(const ReactionNetwork& net, const DiffusionSpec& diff,
                      const DensityField& field, double dt, ConvolvePath path) {
    if (dt < 0.0) throw std::invalid_argument("pde_step: dt must be >= 0");
    if (diff.n_species() != field.n_species())
        throw std::invalid_argument("pde_step: diffusion species mismatch");
    DensityField rhs = reaction_rhs(net, field, path);
    DensityField out = field;
    for (int s = 1; s <= field.n_species(); ++s) {
        auto& g = out.grid(s);
        const auto& f = rhs.grid(s);
        for (std::size_t c = 0; c < g.size(); ++c) g[c] += dt * f[c];
        apply_heat_multiplier(g, field.dim(), field.grid_size(), diff.of(s), dt);
        for (double& v : g) {
            if (v < 0.0) {
                if (v < -1e-12)
                    throw std::runtime_error(
                        "pde_step: density fell below -1e-12; reduce dt");
                v = 0.0;
            }
        }
    }
    out.set_time(field.time() + dt);
    return out;
}

std::vector<DensityField> solve_pde(const ReactionNetwork& net, const DiffusionSpec& diff,
                                    const DensityField& rho0, double t_final, double dt,
                                    std::vector<double> record_times, ConvolvePath path) {
    if (dt <= 0.0) throw std::invalid_argument("solve_pde: dt must be > 0");
    const long n_steps = std::lround(t_final / dt);
    if (record_times.empty()) record_times = {0.0, t_final};
    std::vector<long> record_steps;
    record_steps.reserve(record_times.size());
    for (double t : record_times)
        record_steps.push_back(std::clamp(std::lround(t / dt), 0L, n_steps));
    std::sort(record_steps.begin(), record_steps.end());
    record_steps.erase(std::unique(record_steps.begin(), record_steps.end()),
                       record_steps.end());

    std::vector<DensityField> out;
    DensityField cur = rho0;
    std::size_t next = 0;
    for (long step = 0; step <= n_steps; ++step) {
        if (next < record_steps.size() && record_steps[next] == step) {
            out.push_back(cur);
            ++next;
        }
        if (step < n_steps) cur = pde_step(net, diff, cur, dt, path);
    }
    return out;
}

std::vector<std::pair<double, std::vector<double>>> solve_mass_action(
    const ReactionNetwork& net, const std::vector<double>& y0,
    const std::vector<double>& rate_constants, double t_final, double dt) {
    if (static_cast<int>(y0.size()) != net.n_species())
        throw std::invalid_argument("solve_mass_action: species-count mismatch");
    if (static_cast<int>(rate_constants.size()) != net.n_reactions())
        throw std::invalid_argument("solve_mass_action: one rate constant per reaction");
    for (double v : y0)
        if (v < 0.0) throw std::invalid_argument("solve_mass_action: negative concentration");

    auto rhs = [&](const std::vector<double>& y) {
        std::vector<double> d(y.size(), 0.0);
        for (int ri = 0; ri < net.n_reactions(); ++ri) {
            const auto& r = net.reactions()[static_cast<std::size_t>(ri)];
            double flux = rate_constants[static_cast<std::size_t>(ri)] *
                          y[static_cast<std::size_t>(r.in_a - 1)] *
                          y[static_cast<std::size_t>(r.in_b - 1)];
            d[static_cast<std::size_t>(r.in_a - 1)] -= flux;
            d[static_cast<std::size_t>(r.in_b - 1)] -= flux;
            d[static_cast<std::size_t>(r.out_a - 1)] += flux;
            d[static_cast<std::size_t>(r.out_b - 1)] += flux;
        }
        return d;
    };

    std::vector<std::pair<double, std::vector<double>>> out;
    std::vector<double> y = y0;
    out.emplace_back(0.0, y);
    auto rk4_step = [&](double h) {
        auto k1 = rhs(y);
        std::vector<double> tmp(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        auto k2 = rhs(tmp);
        for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        auto k3 = rhs(tmp);
        for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
        auto k4 = rhs(tmp);
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    };
    // full steps plus an exact-landing remainder
    const long n_steps = static_cast<long>(std::floor(t_final / dt + 1e-12));
    for (long step = 0; step < n_steps; ++step) {
        rk4_step(dt);
        out.emplace_back(static_cast<double>(step + 1) * dt, y);
    }
    double rem = t_final - static_cast<double>(n_steps) * dt;
    if (rem > 1e-12 * std::max(1.0, t_final)) {
        rk4_step(rem);
        out.emplace_back(t_final, y);
    }
    return out;
}

double logistic_fraction(double u0, double lambda, double t) {
    double e = std::exp(-lambda * t);
    return u0 * e / (1.0 - u0 + u0 * e);
}

}  // namespace chaoskit
