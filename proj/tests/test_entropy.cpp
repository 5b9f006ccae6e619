#include <cmath>
#include <random>

#include "chaoskit/entropy.hpp"
#include "doctest.h"

using namespace chaoskit;

namespace {
const char* kSpecialConst =
    "kernel k1 = constant(rate=1)\n"
    "S1 + S2 -> S2 + S2 @ k1\n";

DensityField smooth_field(int m, int n_species) {
    std::vector<double> masses(static_cast<std::size_t>(n_species), 1.0 / n_species);
    std::vector<double> phases;
    for (int s = 0; s < n_species; ++s) phases.push_back(0.13 * s);
    return cosine_field(1, m, masses, 0.4, phases);
}
}  // namespace

TEST_CASE("zero kernel gives zero components") {
    ReactionNetwork net = parse_network(
        "kernel k0 = constant(rate=0)\n"
        "S1 + S2 -> S2 + S2 @ k0\n");
    EntropyFunctions ef(uniform_field(1, 32, {0.5, 0.5}), net);
    FComponents c = ef.eval_components(0, {3, 1}, {7, 2});
    CHECK(c.a == 0.0);
    CHECK(c.a_hat == 0.0);
    CHECK(c.b == 0.0);
    CHECK(c.f == 0.0);
    auto rz = ef.mean_zero_residual();
    CHECK(rz.res_first == 0.0);
    CHECK(rz.res_second == 0.0);
}

TEST_CASE("uniform field on the irreversible network makes A vanish") {
    ReactionNetwork net = parse_network(kSpecialConst);
    EntropyFunctions ef(uniform_field(1, 32, {0.5, 0.5}), net);
    for (std::size_t cell : {0ul, 5ul, 31ul}) {
        FComponents c = ef.eval_components(0, {0, 1}, {cell, 2});
        // (Phi * u_1) u_2 / rho - (Phi * u_1) = 0.5*0.5/0.5 - 0.5 = 0
        CHECK(c.a == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("f is bounded by K_t on random point pairs") {
    ReactionNetwork net = parse_network(
        "kernel ka = tophat(radius=0.2, rate=3)\n"
        "kernel kb = gaussian(width=0.1, rate=2)\n"
        "S1 + S2 -> S2 + S3 @ ka\n"
        "S2 + S3 -> S1 + S1 @ kb\n");
    DensityField rho = smooth_field(64, 3);
    EntropyFunctions ef(rho, net);
    double k_t = ef.k_bound();
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> pick(0, ef.n_states() - 1);
    for (int trial = 0; trial < 10000; ++trial) {
        GridPoint y = ef.state(pick(rng));
        GridPoint yp = ef.state(pick(rng));
        CHECK(std::abs(ef.eval_f(y, yp)) <= k_t + 1e-12);
    }
}

TEST_CASE("marginal mean-zero identities hold on the grid") {
    ReactionNetwork special = parse_network(kSpecialConst);
    ReactionNetwork multi = parse_network(
        "kernel ka = tophat(radius=0.2, rate=3)\n"
        "kernel kb = constant(rate=2)\n"
        "S1 + S2 -> S3 + S3 @ ka\n"
        "S3 + S3 -> S1 + S2 @ kb\n");

    for (const ReactionNetwork* net : {&special, &multi}) {
        int ns = net->n_species();
        std::vector<double> masses(static_cast<std::size_t>(ns), 1.0 / ns);
        auto ru = EntropyFunctions(uniform_field(1, 64, masses), *net).mean_zero_residual();
        CHECK(ru.res_first <= 1e-10);
        CHECK(ru.res_second <= 1e-10);
        CHECK(ru.res_a <= 1e-10);
        CHECK(ru.res_b <= 1e-10);

        auto rs = EntropyFunctions(smooth_field(128, ns), *net).mean_zero_residual();
        CHECK(rs.res_first <= 1e-6);
        CHECK(rs.res_second <= 1e-6);
        CHECK(rs.res_a <= 1e-6);
        CHECK(rs.res_b <= 1e-6);

        // residuals shrink (or stay at rounding level) under refinement
        auto coarse = EntropyFunctions(smooth_field(32, ns), *net).mean_zero_residual();
        auto fine = EntropyFunctions(smooth_field(64, ns), *net).mean_zero_residual();
        CHECK(fine.res_first <= std::max(coarse.res_first, 1e-12));
    }
}

TEST_CASE("component sups satisfy the comparability bounds") {
    ReactionNetwork net = parse_network(
        "kernel ka = tophat(radius=0.2, rate=3)\n"
        "S1 + S2 -> S2 + S2 @ ka\n");
    DensityField rho = smooth_field(64, 2);
    EntropyFunctions ef(rho, net);
    double c_t = ef.comparability_constant();
    double linf = 3.0;
    double sup_a = 0.0, sup_ahat = 0.0, sup_b = 0.0;
    for (int s = 0; s < ef.n_states(); ++s) {
        for (int sp = 0; sp < ef.n_states(); ++sp) {
            FComponents c = ef.eval_components(0, ef.state(s), ef.state(sp));
            sup_a = std::max(sup_a, std::abs(c.a));
            sup_ahat = std::max(sup_ahat, std::abs(c.a_hat));
            sup_b = std::max(sup_b, std::abs(c.b));
        }
    }
    CHECK(sup_a <= linf * (c_t + 1.0) + 1e-12);
    CHECK(sup_ahat <= linf * (c_t + 1.0) + 1e-12);
    CHECK(sup_b <= linf * (c_t * c_t + 1.0) + 1e-12);
    CHECK(ef.k_bound() >= sup_a + sup_ahat + sup_b - 1e-12);
}

TEST_CASE("division guard rejects degenerate denominators") {
    ReactionNetwork net = parse_network(kSpecialConst);
    DensityField rho = uniform_field(1, 16, {1.0, 0.0});  // species 2 is a denominator
    CHECK_THROWS(EntropyFunctions(rho, net));
}

TEST_CASE("marginal L1 distance") {
    DensityField a = uniform_field(1, 32, {0.5, 0.5});
    CHECK(marginal_l1_distance(a, a) == 0.0);

    DensityField b = uniform_field(1, 32, {1.0, 0.0});
    DensityField c = uniform_field(1, 32, {0.0, 1.0});
    CHECK(marginal_l1_distance(b, c) == doctest::Approx(2.0));

    // moving mass m from one cell to another changes the distance by 2m
    DensityField d = uniform_field(1, 32, {1.0});
    DensityField e = d;
    double m_moved = 0.01;
    e.grid(1)[3] -= m_moved / e.cell_volume();
    e.grid(1)[17] += m_moved / e.cell_volume();
    CHECK(marginal_l1_distance(d, e) == doctest::Approx(2.0 * m_moved).epsilon(1e-12));

    CHECK_THROWS(marginal_l1_distance(a, d));        // shape mismatch
    DensityField f = uniform_field(1, 32, {0.7});    // not normalized... mass 0.7
    CHECK_THROWS(marginal_l1_distance(d, f));
}

TEST_CASE("marginal L1 distance is a metric on random normalized fields") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> uni(0.1, 1.0);
    auto random_field = [&] {
        DensityField f(1, 16, 2);
        for (int s = 1; s <= 2; ++s)
            for (double& v : f.grid(s)) v = uni(rng);
        f.normalize();
        return f;
    };
    for (int trial = 0; trial < 25; ++trial) {
        DensityField x = random_field(), y = random_field(), z = random_field();
        double dxy = marginal_l1_distance(x, y);
        double dyx = marginal_l1_distance(y, x);
        CHECK(dxy == dyx);
        CHECK(dxy <= marginal_l1_distance(x, z) + marginal_l1_distance(z, y) + 1e-14);
        CHECK(dxy >= 0.0);
        CHECK(dxy <= 2.0);
    }
}
