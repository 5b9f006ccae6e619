#include <cmath>
#include <numbers>
#include <random>

#include "chaoskit/discrete_operators.hpp"
#include "chaoskit/particle_system.hpp"
#include "doctest.h"

using namespace chaoskit;
using std::numbers::pi;

namespace {

ReactionNetwork small_net() {
    return parse_network(
        "kernel ka = tophat(radius=0.3, rate=2)\n"
        "kernel kb = constant(rate=1)\n"
        "S1 + S2 -> S2 + S3 @ ka\n"
        "S2 + S2 -> S1 + S3 @ kb\n");
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = uni(rng);
    return v;
}

}  // namespace

TEST_CASE("state space enumeration round-trips") {
    DiscreteStateSpace sp(1, 4, 3, 2);
    CHECK(sp.states() == 144);  // (4*3)^2
    CHECK(sp.single_states() == 12);
    for (std::size_t y : {0ul, 17ul, 95ul, 143ul}) {
        std::size_t s0 = sp.particle_state(y, 0);
        std::size_t s1 = sp.particle_state(y, 1);
        CHECK(sp.replace_particle_state(sp.replace_particle_state(y, 0, s0), 1, s1) == y);
    }
    CHECK_THROWS(DiscreteStateSpace(1, 100, 10, 4));  // exceeds the state cap
}

TEST_CASE("type-independent observables are annihilated by the jump generator") {
    DiscreteStateSpace sp(1, 4, 3, 2);
    ReactionNetwork net = small_net();
    // phi depends only on positions
    std::vector<double> phi(sp.states());
    for (std::size_t y = 0; y < sp.states(); ++y) {
        double acc = 0.0;
        for (int i = 0; i < 2; ++i)
            acc += sp.cell_center(sp.cell_of(sp.particle_state(y, i)))[0];
        phi[y] = acc;
    }
    auto out = apply_jump_generator(sp, net, phi);
    for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("two-particle indicator observable by hand") {
    // single reaction (1,2)->(2,2), phi = indicator{types=(2,2)}
    ReactionNetwork net = parse_network(
        "kernel k = tophat(radius=0.3, rate=2)\n"
        "S1 + S2 -> S2 + S2 @ k\n");
    DiscreteStateSpace sp(1, 4, 2, 2);
    std::vector<double> phi(sp.states(), 0.0);
    for (std::size_t y = 0; y < sp.states(); ++y) {
        bool all2 = true;
        for (int i = 0; i < 2; ++i)
            if (sp.species_of(sp.particle_state(y, i)) != 2) all2 = false;
        if (all2) phi[y] = 1.0;
    }
    auto out = apply_jump_generator(sp, net, phi);
    const Kernel k = Kernel::tophat(0.3, 2.0);
    for (std::size_t y = 0; y < sp.states(); ++y) {
        std::size_t s0 = sp.particle_state(y, 0), s1 = sp.particle_state(y, 1);
        int t0 = sp.species_of(s0), t1 = sp.species_of(s1);
        double x0 = sp.cell_center(sp.cell_of(s0))[0], x1 = sp.cell_center(sp.cell_of(s1))[0];
        double dx = x0 - x1;
        double expected = 0.0;
        if (t0 == 1 && t1 == 2) expected = 0.5 * k.eval({&dx, 1});  // (1/N) Phi, one pair
        if (t0 == 2 && t1 == 1) expected = 0.5 * k.eval({&dx, 1});  // the mirrored pair
        CHECK(out[y] == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("jump generator is linear") {
    DiscreteStateSpace sp(1, 4, 3, 2);
    ReactionNetwork net = small_net();
    auto phi = random_vector(sp.states(), 1);
    auto psi = random_vector(sp.states(), 2);
    std::vector<double> combo(sp.states());
    for (std::size_t y = 0; y < sp.states(); ++y) combo[y] = 2.0 * phi[y] - 3.0 * psi[y];
    auto s_phi = apply_jump_generator(sp, net, phi);
    auto s_psi = apply_jump_generator(sp, net, psi);
    auto s_combo = apply_jump_generator(sp, net, combo);
    for (std::size_t y = 0; y < sp.states(); ++y)
        CHECK(s_combo[y] == doctest::Approx(2.0 * s_phi[y] - 3.0 * s_psi[y]).epsilon(1e-12));
}

TEST_CASE("adjoint duality on N=2 and N=3 spaces") {
    ReactionNetwork net = small_net();
    for (int np : {2, 3}) {
        DiscreteStateSpace sp(1, 8, 3, np);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            auto phi = random_vector(sp.states(), 100 + static_cast<std::uint64_t>(trial));
            auto psi = random_vector(sp.states(), 900 + static_cast<std::uint64_t>(trial));
            auto s_phi = apply_jump_generator(sp, net, phi);
            auto sa_psi = apply_jump_adjoint(sp, net, psi);
            worst = std::max(worst, std::abs(state_inner_product(sp, s_phi, psi) -
                                             state_inner_product(sp, phi, sa_psi)));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("adjoint application matches the explicit rate matrix") {
    ReactionNetwork net = small_net();
    DiscreteStateSpace sp(1, 4, 3, 2);
    auto triplets = forward_rate_matrix(sp, net);
    auto psi = random_vector(sp.states(), 5);
    auto direct = apply_jump_adjoint(sp, net, psi);
    auto via_matrix = apply_triplets(sp.states(), triplets, psi);
    for (std::size_t y = 0; y < sp.states(); ++y)
        CHECK(direct[y] == doctest::Approx(via_matrix[y]).epsilon(1e-12));

    // probability conservation: columns sum to zero, off-diagonals nonnegative
    auto sums = triplet_column_sums(sp.states(), triplets);
    for (double s : sums) CHECK(std::abs(s) <= 1e-14);
    for (const auto& t : triplets)
        if (t.row != t.col) CHECK(t.value >= 0.0);

    // mass of the adjoint image vanishes
    std::vector<double> ones(sp.states(), 1.0);
    CHECK(std::abs(state_inner_product(sp, direct, ones)) <= 1e-13);
}

TEST_CASE("adjoint commutes with particle relabeling exactly") {
    ReactionNetwork net = small_net();
    for (int np : {2, 3}) {
        DiscreteStateSpace sp(1, 6, 3, np);
        auto psi = random_vector(sp.states(), 7);
        auto sa = apply_jump_adjoint(sp, net, psi);
        for (int a = 0; a < np; ++a)
            for (int b = a + 1; b < np; ++b) {
                std::vector<int> tau(static_cast<std::size_t>(np));
                for (int i = 0; i < np; ++i) tau[static_cast<std::size_t>(i)] = i;
                std::swap(tau[static_cast<std::size_t>(a)], tau[static_cast<std::size_t>(b)]);
                auto lhs = sp.permute(sa, tau);
                auto rhs = apply_jump_adjoint(sp, net, sp.permute(psi, tau));
                for (std::size_t y = 0; y < sp.states(); ++y) CHECK(lhs[y] == rhs[y]);
            }
    }
}

TEST_CASE("forward evolution preserves exchangeability") {
    ReactionNetwork net = parse_network(
        "kernel ka = tophat(radius=0.3, rate=2)\n"
        "kernel kb = constant(rate=1)\n"
        "S1 + S2 -> S2 + S2 @ ka\n"
        "S2 + S2 -> S1 + S2 @ kb\n");
    DiscreteStateSpace sp(1, 4, 2, 2);  // 64 states keeps the exponential cheap
    auto triplets = forward_rate_matrix(sp, net);
    DenseMatrix gen = DenseMatrix::from_triplets(sp.states(), triplets);
    DenseMatrix propagator = gen.exponential(0.7);

    // symmetric initial vector: product of identical single-particle weights
    std::vector<double> init(sp.states());
    for (std::size_t y = 0; y < sp.states(); ++y) {
        double w = 1.0;
        for (int i = 0; i < 2; ++i) {
            std::size_t s = sp.particle_state(y, i);
            w *= 1.0 + 0.3 * std::sin(0.9 * static_cast<double>(s));
        }
        init[y] = w;
    }
    auto evolved = propagator.apply(init);
    std::vector<int> tau = {1, 0};
    auto swapped = sp.permute(evolved, tau);
    for (std::size_t y = 0; y < sp.states(); ++y)
        CHECK(std::abs(evolved[y] - swapped[y]) <= 1e-12);

    // the propagator preserves total probability mass
    double mass0 = 0.0, mass1 = 0.0;
    for (std::size_t y = 0; y < sp.states(); ++y) {
        mass0 += init[y];
        mass1 += evolved[y];
    }
    CHECK(mass1 == doctest::Approx(mass0).epsilon(1e-12));
}

TEST_CASE("matrix exponential matches the series on a tiny case") {
    DenseMatrix a(2);
    a.at(0, 0) = -1.0;
    a.at(0, 1) = 2.0;
    a.at(1, 0) = 0.5;
    a.at(1, 1) = -0.25;
    DenseMatrix e = a.exponential(0.3);
    // reference by dense Taylor summation with many terms
    DenseMatrix ref(2), term(2);
    for (std::size_t i = 0; i < 2; ++i) ref.at(i, i) = term.at(i, i) = 1.0;
    for (int k = 1; k <= 60; ++k) {
        DenseMatrix next(2);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t m = 0; m < 2; ++m)
                for (std::size_t c = 0; c < 2; ++c)
                    next.at(r, c) += term.at(r, m) * a.at(m, c) * 0.3 / k;
        term = next;
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c) ref.at(r, c) += term.at(r, c);
    }
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c)
            CHECK(e.at(r, c) == doctest::Approx(ref.at(r, c)).epsilon(1e-13));
}

TEST_CASE("dynkin residual vanishes for constants") {
    ReactionNetwork net = parse_network(
        "kernel k = constant(rate=1)\n"
        "S1 + S2 -> S2 + S2 @ k\n");
    DensityField rho0 = uniform_field(1, 8, {0.5, 0.5});
    TypedObservable one{[](std::span<const double>, int) { return 1.0; },
                        [](std::span<const double>, int) { return 0.0; }};
    auto r = dynkin_residual(net, DiffusionSpec::uniform(2, 0.2), rho0, 64, 0.02, 1e-3, 32, 5, one);
    CHECK(r.residual == 0.0);
    CHECK(r.mean_final == 1.0);
}

TEST_CASE("dynkin residual for pure diffusion against the heat closed form") {
    ReactionNetwork net = parse_network("species: S1\nkernel k0 = constant(rate=0)\n");
    const double sigma = 0.3, t = 0.05;
    const int m = 16;
    DensityField rho0 = point_mass_field(1, m, 1, 1, 4);
    TypedObservable obs{
        [](std::span<const double> x, int) { return std::cos(2.0 * pi * x[0]); },
        [](std::span<const double> x, int) { return -4.0 * pi * pi * std::cos(2.0 * pi * x[0]); }};
    auto r = dynkin_residual(net, DiffusionSpec::uniform(1, sigma), rho0, 128, t, 1e-3, 512, 21,
                             obs);
    CHECK(std::abs(r.residual) <= std::max(r.ci99, 2e-3));

    double x0 = 4.5 / m;
    double mean0 = std::cos(2.0 * pi * x0) * std::sin(pi / m) / (pi / m);
    double closed = mean0 * std::exp(-0.5 * sigma * sigma * 4.0 * pi * pi * t);
    CHECK(std::abs(r.mean_final - closed) <= r.mean_final_ci99);
}

TEST_CASE("dynkin drift of the type indicator matches the mean-field rate") {
    // phi = indicator{type == 2}: d/dt E[phi_bar] = <phi, T rho> = lambda u w
    ReactionNetwork net = parse_network(
        "kernel k = constant(rate=2)\n"
        "S1 + S2 -> S2 + S2 @ k\n");
    DensityField rho0 = uniform_field(1, 8, {0.5, 0.5});
    TypedObservable obs{[](std::span<const double>, int type) { return type == 2 ? 1.0 : 0.0; },
                        [](std::span<const double>, int) { return 0.0; }};
    const double t = 0.05;
    auto r = dynkin_residual(net, DiffusionSpec::uniform(2, 0.1), rho0, 128, t, 1e-3, 1024, 33,
                             obs);
    // the residual absorbs the O(dt) splitting bias and the O(1/N) pair bias
    CHECK(std::abs(r.residual) <= r.ci99 + 2.0 * (1e-3 + 1.0 / 128.0));
    // and the raw drift is visible: E[phi_bar(t)] grew from 1/2 by ~ lambda u w t
    CHECK(r.mean_final > 0.5);
    CHECK(std::abs(r.mean_final - 0.5 - 2.0 * 0.25 * t) <= r.mean_final_ci99 + 2e-3);
}
