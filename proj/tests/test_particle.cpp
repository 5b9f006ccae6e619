#include <cmath>
#include <numbers>

#include "chaoskit/particle_system.hpp"
#include "chaoskit/torus.hpp"
#include "doctest.h"
#include "support/stats.hpp"

using namespace chaoskit;

namespace {
const char* kSpecialConst =
    "kernel k1 = constant(rate=1)\n"
    "S1 + S2 -> S2 + S2 @ k1\n";

ReactionNetwork no_reactions(int n_species) {
    std::string text = "species:";
    for (int s = 1; s <= n_species; ++s)
        text += (s > 1 ? ", S" : " S") + std::to_string(s);
    text += "\nkernel k0 = constant(rate=0)\n";
    return parse_network(text);
}
}  // namespace

TEST_CASE("sample_initial from a point-mass cell") {
    DensityField rho0 = point_mass_field(1, 16, 2, 2, 5);
    ParticleState st = sample_initial(rho0, 200, 42);
    for (std::size_t i = 0; i < st.size(); ++i) {
        CHECK(st.types[i] == 2);
        CHECK(st.pos[i] >= 5.0 / 16.0);
        CHECK(st.pos[i] < 6.0 / 16.0);
    }
}

TEST_CASE("sample_initial positions pass a chi-square uniformity test") {
    DensityField rho0 = uniform_field(1, 8, {1.0});
    ParticleState st = sample_initial(rho0, 1000, 7);
    std::vector<int> bins(16, 0);
    for (std::size_t i = 0; i < st.size(); ++i)
        ++bins[std::min<std::size_t>(static_cast<std::size_t>(st.pos[i] * 16.0), 15)];
    double stat = testsupport::chi_square_uniform(bins, 1000);
    CHECK(stat < testsupport::chi_square_crit_001(15));
}

TEST_CASE("sample_initial type counts concentrate binomially") {
    DensityField rho0 = uniform_field(1, 32, {0.3, 0.7});
    ParticleState st = sample_initial(rho0, 10000, 99);
    long count1 = species_counts(st)[0];
    CHECK(std::abs(static_cast<double>(count1) - 3000.0) <=
          3.0 * std::sqrt(10000.0 * 0.3 * 0.7));
}

TEST_CASE("sample_initial validates mass and sign") {
    DensityField bad = uniform_field(1, 8, {0.5, 0.4});  // mass 0.9
    CHECK_THROWS(sample_initial(bad, 10, 1));
    DensityField neg = uniform_field(1, 8, {1.0});
    neg.grid(1)[2] = -neg.grid(1)[2];
    CHECK_THROWS(sample_initial(neg, 10, 1));
}

TEST_CASE("pair_rate examples") {
    ReactionNetwork net = parse_network(
        "kernel k1 = tophat(radius=0.25, rate=5)\n"
        "S1 + S2 -> S2 + S2 @ k1\n");
    ParticleState st;
    st.dim = 1;
    st.n_species = 2;
    st.pos.resize(100, 0.0);
    st.types.assign(100, 2);
    st.types[0] = 1;
    st.pos[0] = 0.2;
    st.pos[1] = 0.3;  // distance 0.1, inside support
    CHECK(pair_rate(st, net, 0, 1, 0) == doctest::Approx(0.05).epsilon(1e-14));
    // reversed order does not match the input pair
    CHECK(pair_rate(st, net, 1, 0, 0) == 0.0);
    // outside the kernel support
    st.pos[1] = 0.7;
    CHECK(pair_rate(st, net, 0, 1, 0) == 0.0);
    CHECK_THROWS(pair_rate(st, net, 3, 3, 0));
}

TEST_CASE("diffusion-only displacement variance matches Brownian scaling") {
    ReactionNetwork net = no_reactions(1);
    DensityField rho0 = uniform_field(1, 16, {1.0});
    const std::size_t n = 10000;
    const double sigma = 0.2, dt = 1e-3;
    const int steps = 20;
    ParticleState st = sample_initial(rho0, n, 11);
    std::vector<double> x0 = st.pos;
    for (int s = 0; s < steps; ++s) step(st, net, DiffusionSpec::uniform(1, sigma), dt);
    double mean_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = min_image(st.pos[i] - x0[i]);
        mean_sq += d * d;
    }
    mean_sq /= static_cast<double>(n);
    double expected = sigma * sigma * steps * dt;
    double se = expected * std::sqrt(2.0 / static_cast<double>(n));
    CHECK(std::abs(mean_sq - expected) <= 4.0 * se);
    CHECK(st.time == doctest::Approx(steps * dt));
}

TEST_CASE("zero rates move positions but never types") {
    ReactionNetwork net = no_reactions(2);
    DensityField rho0 = uniform_field(1, 8, {0.4, 0.6});
    ParticleState st = sample_initial(rho0, 500, 3);
    auto types0 = st.types;
    auto pos0 = st.pos;
    StepStats stats;
    for (int s = 0; s < 10; ++s) step(st, net, DiffusionSpec::uniform(2, 0.1), 1e-2, {}, &stats);
    CHECK(st.types == types0);
    CHECK(st.pos != pos0);
    CHECK(stats.firings == 0);
    for (double x : st.pos) {
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    CHECK(st.size() == 500);
}

TEST_CASE("absorption times match the mass-action jump chain (KS)") {
    // sigma = 0: space is irrelevant for a constant kernel, so the type
    // dynamics must match the classical ordered-pair jump chain.
    ReactionNetwork net = parse_network(
        "kernel k1 = constant(rate=5)\n"
        "S1 + S2 -> S2 + S2 @ k1\n");
    const long n = 64;
    const double dt = 5e-3;
    DensityField rho0 = uniform_field(1, 8, {0.5, 0.5});
    const int samples = 200;

    auto absorption_from_sim = [&](PairPath path, std::uint64_t seed_base) {
        std::vector<double> times;
        for (int run = 0; run < samples; ++run) {
            ParticleState st = sample_initial(rho0, n, derive_seed(seed_base, run));
            // force the exact split 32/32 so the chains start identically
            for (std::size_t i = 0; i < st.size(); ++i)
                st.types[i] = i < st.size() / 2 ? 1 : 2;
            StepOptions opts;
            opts.path = path;
            while (species_counts(st)[0] > 0) {
                step(st, net, DiffusionSpec::uniform(2, 0.0), dt, opts);
                if (st.time > 1000.0) FAIL("no absorption");
            }
            times.push_back(st.time);
        }
        return times;
    };

    std::mt19937_64 oracle_rng(12345);
    std::vector<double> oracle;
    for (int run = 0; run < samples; ++run)
        oracle.push_back(testsupport::jump_chain_absorption_time(32, 32, 5.0, n, oracle_rng));

    auto sim_naive = absorption_from_sim(PairPath::Naive, 1001);
    double d = testsupport::ks_statistic(sim_naive, oracle);
    CHECK(d < testsupport::ks_crit(0.001, samples, samples));

    // the aggregated constant-kernel path must follow the same law
    auto sim_aggregate = absorption_from_sim(PairPath::Auto, 2002);
    double d2 = testsupport::ks_statistic(sim_aggregate, oracle);
    CHECK(d2 < testsupport::ks_crit(0.001, samples, samples));
}

TEST_CASE("same-species inputs carry twice the unordered pair rate") {
    // identity reaction keeps the pool fixed so the firing frequency is clean
    ReactionNetwork net = parse_network(
        "kernel k1 = constant(rate=2)\n"
        "S1 + S1 -> S1 + S1 @ k1\n");
    const std::size_t n = 100;
    const double dt = 1e-2;
    DensityField rho0 = uniform_field(1, 8, {1.0});
    ParticleState st = sample_initial(rho0, n, 5);
    StepStats stats;
    const int steps = 2000;
    StepOptions opts;
    opts.path = PairPath::Naive;
    for (int s = 0; s < steps; ++s) step(st, net, DiffusionSpec::uniform(1, 0.1), dt, opts, &stats);
    // ordered pairs n(n-1), each fires with probability ~ rate*dt/n
    double p = -std::expm1(-2.0 / static_cast<double>(n) * dt);
    double expected = static_cast<double>(n * (n - 1)) * p * steps;
    double sd = std::sqrt(expected);
    CHECK(std::abs(static_cast<double>(stats.firings) - expected) <= 4.0 * sd);
    // which is 2 Phi dt / N per unordered pair
    double per_unordered = static_cast<double>(stats.firings) / steps /
                           (static_cast<double>(n * (n - 1)) / 2.0);
    CHECK(per_unordered == doctest::Approx(2.0 * 2.0 * dt / static_cast<double>(n)).epsilon(0.1));
}

TEST_CASE("stale-type rejections stay under 1% of firings") {
    ReactionNetwork net = parse_network(kSpecialConst);
    DensityField rho0 = uniform_field(1, 8, {0.5, 0.5});
    ParticleState st = sample_initial(rho0, 2000, 17);
    StepStats stats;
    StepOptions opts;
    opts.path = PairPath::Naive;
    for (int s = 0; s < 200; ++s) step(st, net, DiffusionSpec::uniform(2, 0.1), 5e-3, opts, &stats);
    REQUIRE(stats.firings > 100);
    CHECK(static_cast<double>(stats.stale_rejected) <=
          0.01 * static_cast<double>(stats.firings));
}

TEST_CASE("cell list and naive enumeration are bit-identical") {
    ReactionNetwork net = parse_network(
        "kernel k1 = tophat(radius=0.17, rate=4)\n"
        "kernel k2 = tophat(radius=0.33, rate=2)\n"
        "S1 + S2 -> S2 + S2 @ k1\n"
        "S2 + S2 -> S1 + S2 @ k2\n");
    DensityField rho0 = uniform_field(1, 16, {0.5, 0.5});
    for (int dim : {1, 2}) {
        DensityField r0 = uniform_field(dim, 8, {0.5, 0.5});
        ParticleState a = sample_initial(r0, 400, 77);
        ParticleState b = sample_initial(r0, 400, 77);
        StepOptions na, cl;
        na.path = PairPath::Naive;
        cl.path = PairPath::CellList;
        StepStats sa, sb;
        for (int s = 0; s < 40; ++s) {
            step(a, net, DiffusionSpec::uniform(2, 0.15), 5e-3, na, &sa);
            step(b, net, DiffusionSpec::uniform(2, 0.15), 5e-3, cl, &sb);
        }
        CHECK(a.pos == b.pos);
        CHECK(a.types == b.types);
        CHECK(sa.firings == sb.firings);
        CHECK(sa.applied == sb.applied);
        bool same_stream = a.rng == b.rng;  // identical stream consumption
        CHECK(same_stream);
    }
    (void)rho0;
}

TEST_CASE("empirical histogram normalizes to total mass one") {
    ParticleState st;
    st.dim = 1;
    st.n_species = 2;
    st.types.assign(50, 1);
    st.pos.assign(50, 0.33);  // all in one bin
    DensityField h = empirical_histogram(st, 10);
    CHECK(h.grid(1)[3] == doctest::Approx(10.0));  // density 1/binvol
    CHECK(h.total_mass() == doctest::Approx(1.0).epsilon(1e-12));

    DensityField rho0 = uniform_field(1, 16, {1.0});
    ParticleState big = sample_initial(rho0, 100000, 31);
    DensityField hb = empirical_histogram(big, 8);
    for (std::size_t b = 0; b < 8; ++b) {
        double mass = hb.grid(1)[b] * hb.cell_volume();
        CHECK(std::abs(mass - 0.125) <= 4.0 * std::sqrt(0.125 * 0.875 / 100000.0));
    }
}

TEST_CASE("simulate_run records, conserves N, and is deterministic") {
    ReactionNetwork net = parse_network(kSpecialConst);
    DensityField rho0 = uniform_field(1, 16, {0.5, 0.5});
    SimOptions opts;
    opts.dt = 1e-3;
    opts.t_final = 0.2;
    opts.record_times = {0.0, 0.1, 0.2};
    opts.histogram_bins = 8;
    SimResult a = simulate_run(net, DiffusionSpec::uniform(2, 0.1), rho0, 512, 9001, opts);
    REQUIRE(a.records.size() == 3);
    for (const auto& rec : a.records) {
        long total = 0;
        for (long c : rec.counts) total += c;
        CHECK(total == 512);
        CHECK(rec.histogram->total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SimResult b = simulate_run(net, DiffusionSpec::uniform(2, 0.1), rho0, 512, 9001, opts);
    for (std::size_t r = 0; r < a.records.size(); ++r) {
        CHECK(a.records[r].counts == b.records[r].counts);
        CHECK(a.records[r].histogram->grid(1) == b.records[r].histogram->grid(1));
        CHECK(a.records[r].histogram->grid(2) == b.records[r].histogram->grid(2));
    }

    SimOptions zero = opts;
    zero.t_final = 0.0;
    zero.record_times = {};
    SimResult c = simulate_run(net, DiffusionSpec::uniform(2, 0.1), rho0, 64, 5, zero);
    CHECK(c.records.size() == 1);
    CHECK(c.records[0].time == 0.0);
}

TEST_CASE("ensemble results are merged by run index regardless of threads") {
    ReactionNetwork net = parse_network(kSpecialConst);
    DensityField rho0 = uniform_field(1, 16, {0.5, 0.5});
    SimOptions opts;
    opts.dt = 1e-3;
    opts.t_final = 0.05;
    auto one = simulate_ensemble(net, DiffusionSpec::uniform(2, 0.1), rho0, 128, 4242, 6, opts, 1);
    auto two = simulate_ensemble(net, DiffusionSpec::uniform(2, 0.1), rho0, 128, 4242, 6, opts, 2);
    REQUIRE(one.size() == two.size());
    for (std::size_t r = 0; r < one.size(); ++r)
        CHECK(one[r].records.back().counts == two[r].records.back().counts);
}

TEST_CASE("dt precondition is enforced and can be overridden") {
    ReactionNetwork net = parse_network(
        "kernel k1 = constant(rate=100)\n"
        "S1 + S2 -> S2 + S2 @ k1\n");
    DensityField rho0 = uniform_field(1, 8, {0.5, 0.5});
    ParticleState st = sample_initial(rho0, 32, 1);
    CHECK_THROWS(step(st, net, DiffusionSpec::uniform(2, 0.1), 1e-2));
    StepOptions opts;
    opts.dt_bound_override = true;
    CHECK_NOTHROW(step(st, net, DiffusionSpec::uniform(2, 0.1), 1e-2, opts));
}
