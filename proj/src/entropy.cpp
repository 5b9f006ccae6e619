#include "chaoskit/entropy.hpp"

#include <cmath>
#include <stdexcept>

#include "chaoskit/torus.hpp"

namespace chaoskit {

namespace {

// Kernel value at the displacement between two cell centers.
std::vector<double> tabulate(const Kernel& k, int dim, int m, std::size_t cells) {
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

constexpr double kDensityGuard = 1e-14;

}  // namespace

EntropyFunctions::EntropyFunctions(const DensityField& rho, const ReactionNetwork& net,
                                   ConvolvePath path)
    : rho_(rho), net_(&net) {
    if (rho.n_species() != net.n_species())
        throw std::invalid_argument("EntropyFunctions: species-count mismatch");
    for (const auto& r : net.reactions()) {
        // output species appear in denominators
        for (int s : {r.out_a, r.out_b})
            if (rho.min_value(s) <= kDensityGuard)
                throw std::runtime_error(
                    "EntropyFunctions: density at or below 1e-14 in a denominator species; "
                    "the field is degenerate or non-propagating");
        const Kernel& k = net.kernel_of(r);
        kernel_tab_.push_back(tabulate(k, rho.dim(), rho.grid_size(), rho.cells()));
        conv_k_.push_back(periodic_convolve(k, rho.grid(r.in_a), rho.dim(), rho.grid_size(), path));
        conv_l_.push_back(periodic_convolve(k, rho.grid(r.in_b), rho.dim(), rho.grid_size(), path));
    }
}

double EntropyFunctions::a_term(int ri, GridPoint y) const {
    const Reaction& r = net_->reactions()[static_cast<std::size_t>(ri)];
    const auto& conv_k = conv_k_[static_cast<std::size_t>(ri)];
    double out = 0.0;
    if (y.species == r.out_b)
        out += conv_k[y.cell] * rho_.grid(r.in_b)[y.cell] / density(y);
    if (y.species == r.in_b) out -= conv_k[y.cell];
    return out;
}

double EntropyFunctions::a_hat_term(int ri, GridPoint y) const {
    const Reaction& r = net_->reactions()[static_cast<std::size_t>(ri)];
    const auto& conv_l = conv_l_[static_cast<std::size_t>(ri)];
    double out = 0.0;
    if (y.species == r.out_a)
        out += conv_l[y.cell] * rho_.grid(r.in_a)[y.cell] / density(y);
    if (y.species == r.in_a) out -= conv_l[y.cell];
    return out;
}

double EntropyFunctions::b_term(int ri, GridPoint y, GridPoint yp) const {
    const Reaction& r = net_->reactions()[static_cast<std::size_t>(ri)];
    const int m = rho_.grid_size();
    // displacement index x - x' per axis, modulo m
    std::size_t delta = 0, rem_a = y.cell, rem_b = yp.cell;
    std::vector<std::size_t> da(static_cast<std::size_t>(rho_.dim()));
    for (int a = rho_.dim() - 1; a >= 0; --a) {
        std::size_t ia = rem_a % static_cast<std::size_t>(m);
        std::size_t ib = rem_b % static_cast<std::size_t>(m);
        rem_a /= static_cast<std::size_t>(m);
        rem_b /= static_cast<std::size_t>(m);
        da[static_cast<std::size_t>(a)] = (ia + static_cast<std::size_t>(m) - ib) %
                                          static_cast<std::size_t>(m);
    }
    for (int a = 0; a < rho_.dim(); ++a)
        delta = delta * static_cast<std::size_t>(m) + da[static_cast<std::size_t>(a)];
    double phi = kernel_tab_[static_cast<std::size_t>(ri)][delta];
    if (phi == 0.0) return 0.0;

    double inner = 0.0;
    if (y.species == r.out_a && yp.species == r.out_b)
        inner += rho_.grid(r.in_a)[y.cell] * rho_.grid(r.in_b)[yp.cell] /
                 (density(y) * density(yp));
    if (y.species == r.in_a && yp.species == r.in_b) inner -= 1.0;
    return phi * inner;
}

FComponents EntropyFunctions::eval_components(int ri, GridPoint y, GridPoint yp) const {
    FComponents out;
    out.a = a_term(ri, yp);
    out.a_hat = a_hat_term(ri, y);
    out.b = b_term(ri, y, yp);
    out.f = out.a + out.a_hat - out.b;
    return out;
}

double EntropyFunctions::eval_f(GridPoint y, GridPoint yp) const {
    double f = 0.0;
    for (int ri = 0; ri < net_->n_reactions(); ++ri)
        f += a_term(ri, yp) + a_hat_term(ri, y) - b_term(ri, y, yp);
    return f;
}

double EntropyFunctions::k_bound() const {
    const int states = n_states();
    double total = 0.0;
    for (int ri = 0; ri < net_->n_reactions(); ++ri) {
        double sup_a = 0.0, sup_ahat = 0.0, sup_b = 0.0;
        for (int s = 0; s < states; ++s) {
            GridPoint y = state(s);
            sup_a = std::max(sup_a, std::abs(a_term(ri, y)));
            sup_ahat = std::max(sup_ahat, std::abs(a_hat_term(ri, y)));
        }
        for (int s = 0; s < states; ++s)
            for (int sp = 0; sp < states; ++sp)
                sup_b = std::max(sup_b, std::abs(b_term(ri, state(s), state(sp))));
        total += sup_a + sup_ahat + sup_b;
    }
    return total;
}

double EntropyFunctions::comparability_constant() const {
    double c = 0.0;
    for (const auto& r : net_->reactions()) {
        const auto& uk = rho_.grid(r.in_a);
        const auto& ukp = rho_.grid(r.out_a);
        const auto& ul = rho_.grid(r.in_b);
        const auto& ulp = rho_.grid(r.out_b);
        for (std::size_t cell = 0; cell < rho_.cells(); ++cell) {
            c = std::max(c, uk[cell] / ukp[cell]);
            c = std::max(c, ul[cell] / ulp[cell]);
        }
    }
    return c;
}

MeanZeroResidual EntropyFunctions::mean_zero_residual() const {
    const int states = n_states();
    const double vol = rho_.cell_volume();
    MeanZeroResidual out;

    // component identities, per reaction
    for (int ri = 0; ri < net_->n_reactions(); ++ri) {
        double int_a = 0.0, int_ahat = 0.0;
        for (int s = 0; s < states; ++s) {
            GridPoint y = state(s);
            int_a += a_term(ri, y) * density(y) * vol;
            int_ahat += a_hat_term(ri, y) * density(y) * vol;
        }
        out.res_a = std::max({out.res_a, std::abs(int_a), std::abs(int_ahat)});

        for (int sp = 0; sp < states; ++sp) {
            GridPoint yp = state(sp);
            double int_b = 0.0;
            for (int s = 0; s < states; ++s) {
                GridPoint y = state(s);
                int_b += b_term(ri, y, yp) * density(y) * vol;
            }
            out.res_b = std::max(out.res_b, std::abs(int_b - a_term(ri, yp)));
        }
        for (int s = 0; s < states; ++s) {
            GridPoint y = state(s);
            double int_b = 0.0;
            for (int sp = 0; sp < states; ++sp) {
                GridPoint yp = state(sp);
                int_b += b_term(ri, y, yp) * density(yp) * vol;
            }
            out.res_b = std::max(out.res_b, std::abs(int_b - a_hat_term(ri, y)));
        }
    }

    // full pair statistic against each marginal
    for (int sp = 0; sp < states; ++sp) {
        GridPoint yp = state(sp);
        double acc = 0.0;
        for (int s = 0; s < states; ++s) {
            GridPoint y = state(s);
            acc += eval_f(y, yp) * density(y) * vol;
        }
        out.res_first = std::max(out.res_first, std::abs(acc));
    }
    for (int s = 0; s < states; ++s) {
        GridPoint y = state(s);
        double acc = 0.0;
        for (int sp = 0; sp < states; ++sp) {
            GridPoint yp = state(sp);
            acc += eval_f(y, yp) * density(yp) * vol;
        }
        out.res_second = std::max(out.res_second, std::abs(acc));
    }
    return out;
}

double marginal_l1_distance(const DensityField& a, const DensityField& b) {
    if (a.dim() != b.dim() || a.grid_size() != b.grid_size() || a.n_species() != b.n_species())
        throw std::invalid_argument("marginal_l1_distance: shape mismatch");
    if (std::abs(a.total_mass() - 1.0) > 1e-6 || std::abs(b.total_mass() - 1.0) > 1e-6)
        throw std::invalid_argument("marginal_l1_distance: inputs must integrate to 1");
    double acc = 0.0;
    for (int s = 1; s <= a.n_species(); ++s) {
        const auto& ga = a.grid(s);
        const auto& gb = b.grid(s);
        for (std::size_t c = 0; c < ga.size(); ++c) acc += std::abs(ga[c] - gb[c]);
    }
    return acc * a.cell_volume();
}

}  // namespace chaoskit
