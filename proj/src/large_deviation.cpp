#include "chaoskit/large_deviation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "chaoskit/particle_system.hpp"
#include "chaoskit/rng.hpp"

namespace chaoskit {

double PairStatistic::linf() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

PairStatistic PairStatistic::tabulate(int n_states, const std::function<double(int, int)>& f) {
    PairStatistic p;
    p.n_states = n_states;
    p.values.resize(static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_states));
    for (int y = 0; y < n_states; ++y)
        for (int yp = 0; yp < n_states; ++yp) p.at(y, yp) = f(y, yp);
    return p;
}

void check_density(const DiscreteDensity& rho) {
    double s = 0.0;
    for (double v : rho) {
        if (v < 0.0) throw std::invalid_argument("discrete density: negative weight");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-10)
        throw std::invalid_argument("discrete density: weights must sum to 1");
}

PairStatistic center_function(const PairStatistic& f_raw, const DiscreteDensity& rho) {
    check_density(rho);
    const int n = f_raw.n_states;
    if (static_cast<int>(rho.size()) != n)
        throw std::invalid_argument("center_function: density size mismatch");
    std::vector<double> row_mean(static_cast<std::size_t>(n), 0.0);
    std::vector<double> col_mean(static_cast<std::size_t>(n), 0.0);
    double total = 0.0;
    for (int y = 0; y < n; ++y)
        for (int yp = 0; yp < n; ++yp) {
            double v = f_raw(y, yp);
            row_mean[static_cast<std::size_t>(y)] += v * rho[static_cast<std::size_t>(yp)];
            col_mean[static_cast<std::size_t>(yp)] += v * rho[static_cast<std::size_t>(y)];
            total += v * rho[static_cast<std::size_t>(y)] * rho[static_cast<std::size_t>(yp)];
        }
    PairStatistic out = f_raw;
    for (int y = 0; y < n; ++y)
        for (int yp = 0; yp < n; ++yp)
            out.at(y, yp) = f_raw(y, yp) - row_mean[static_cast<std::size_t>(y)] -
                            col_mean[static_cast<std::size_t>(yp)] + total;
    return out;
}

double marginal_mean_residual(const PairStatistic& f, const DiscreteDensity& rho) {
    const int n = f.n_states;
    double res = 0.0;
    for (int y = 0; y < n; ++y) {
        double first = 0.0, second = 0.0;
        for (int z = 0; z < n; ++z) {
            first += f(y, z) * rho[static_cast<std::size_t>(z)];
            second += f(z, y) * rho[static_cast<std::size_t>(z)];
        }
        res = std::max({res, std::abs(first), std::abs(second)});
    }
    return res;
}

double eta_of(double linf) {
    if (linf <= 0.0) throw std::invalid_argument("eta_of: |f|_inf must be positive");
    return 2.0 * std::numbers::sqrt2 * std::numbers::e * linf;
}

namespace {

// Inverse-CDF sampler over discrete weights.
struct DiscreteSampler {
    std::vector<double> cum;
    explicit DiscreteSampler(const DiscreteDensity& rho) {
        cum.resize(rho.size());
        double acc = 0.0;
        for (std::size_t s = 0; s < rho.size(); ++s) {
            acc += rho[s];
            cum[s] = acc;
        }
        cum.back() = 1.0;
    }
    int operator()(Rng& rng) const {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double u = uni(rng);
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()),
                                                      cum.size() - 1));
    }
};

// Off-diagonal double sum over a sample, via state occupancies when the
// state count is small relative to n^2.
double offdiag_sum(const PairStatistic& f, const std::vector<int>& sample,
                   std::vector<int>& occupancy, std::vector<int>& occupied) {
    const int n = static_cast<int>(sample.size());
    const int s_states = f.n_states;
    if (static_cast<long>(s_states) * s_states < static_cast<long>(n) * n) {
        occupied.clear();
        for (int y : sample) {
            if (occupancy[static_cast<std::size_t>(y)]++ == 0) occupied.push_back(y);
        }
        double acc = 0.0;
        for (int y : occupied)
            for (int yp : occupied) {
                double c = static_cast<double>(occupancy[static_cast<std::size_t>(y)]) *
                           static_cast<double>(occupancy[static_cast<std::size_t>(yp)]);
                acc += c * f(y, yp);
            }
        for (int y : occupied) acc -= static_cast<double>(occupancy[static_cast<std::size_t>(y)]) * f(y, y);
        for (int y : occupied) occupancy[static_cast<std::size_t>(y)] = 0;
        return acc;
    }
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) acc += f(sample[static_cast<std::size_t>(i)],
                                 sample[static_cast<std::size_t>(j)]);
    return acc;
}

std::vector<double> trial_values(const PairStatistic& f, const DiscreteDensity& rho, int n,
                                 int trials, std::uint64_t seed, int threads,
                                 const std::function<double(double)>& transform) {
    check_density(rho);
    if (n < 2) throw std::invalid_argument("pair-statistic trials need n >= 2");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    DiscreteSampler sampler(rho);
    std::vector<double> out(static_cast<std::size_t>(trials));

    const int workers = std::min(resolve_threads(threads), trials);
    auto work = [&](int first, int last) {
        std::vector<int> sample(static_cast<std::size_t>(n));
        std::vector<int> occupancy(static_cast<std::size_t>(f.n_states), 0);
        std::vector<int> occupied;
        for (int t = first; t < last; ++t) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
            for (int i = 0; i < n; ++i) sample[static_cast<std::size_t>(i)] = sampler(rng);
            out[static_cast<std::size_t>(t)] =
                transform(offdiag_sum(f, sample, occupancy, occupied));
        }
    };
    if (workers <= 1) {
        work(0, trials);
    } else {
        std::vector<std::thread> pool;
        int chunk = (trials + workers - 1) / workers;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work, w * chunk, std::min(trials, (w + 1) * chunk));
        for (auto& th : pool) th.join();
    }
    return out;
}

}  // namespace

MomentEstimate exp_moment_estimate(const PairStatistic& f, const DiscreteDensity& rho, int n,
                                   double eta, int trials, std::uint64_t seed, int threads) {
    if (eta <= 0.0) throw std::invalid_argument("exp_moment_estimate: eta must be positive");
    if (trials < 1000)
        throw std::invalid_argument("exp_moment_estimate: need at least 1000 trials");
    const double scale = 1.0 / (eta * static_cast<double>(n));
    auto vals = trial_values(f, rho, n, trials, seed, threads,
                             [scale](double m) { return std::exp(scale * m); });
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= std::max(1.0, static_cast<double>(trials - 1));
    double ci = 2.5758293035489 * std::sqrt(var / static_cast<double>(trials));
    return {mean, ci};
}

double exp_moment_quadrature_n2(const PairStatistic& f, const DiscreteDensity& rho, double eta) {
    check_density(rho);
    const int s = f.n_states;
    double acc = 0.0;
    for (int y = 0; y < s; ++y)
        for (int yp = 0; yp < s; ++yp)
            acc += rho[static_cast<std::size_t>(y)] * rho[static_cast<std::size_t>(yp)] *
                   std::exp((f(y, yp) + f(yp, y)) / (2.0 * eta));
    return acc;
}

std::vector<MomentRow> moment_bound_check(const PairStatistic& f, const DiscreteDensity& rho,
                                          int n, int k_max, int trials, std::uint64_t seed) {
    if (k_max < 1 || k_max > 8)
        throw std::invalid_argument("moment_bound_check: k_max must be in 1..8");
    const double inv_n = 1.0 / static_cast<double>(n);
    auto vals = trial_values(f, rho, n, trials, seed, 0,
                             [inv_n](double m) { return inv_n * m; });

    auto statistic = [&](const std::vector<double>& a_pow_means, int k) {
        double m = std::abs(a_pow_means[static_cast<std::size_t>(k - 1)]);
        return std::pow(m, 1.0 / k) / static_cast<double>(k);
    };
    auto moments_of = [&](const std::vector<double>& sample) {
        std::vector<double> mom(static_cast<std::size_t>(k_max), 0.0);
        for (double a : sample) {
            double p = 1.0;
            for (int k = 1; k <= k_max; ++k) {
                p *= a;
                mom[static_cast<std::size_t>(k - 1)] += p;
            }
        }
        for (double& m : mom) m /= static_cast<double>(sample.size());
        return mom;
    };

    auto point = moments_of(vals);
    const int boot = 200;
    std::vector<std::vector<double>> boot_stats(static_cast<std::size_t>(k_max));
    Rng rng(derive_seed(seed, 0xb00ULL));
    std::uniform_int_distribution<std::size_t> pick(0, vals.size() - 1);
    std::vector<double> resample(vals.size());
    for (int b = 0; b < boot; ++b) {
        for (auto& v : resample) v = vals[pick(rng)];
        auto mom = moments_of(resample);
        for (int k = 1; k <= k_max; ++k)
            boot_stats[static_cast<std::size_t>(k - 1)].push_back(statistic(mom, k));
    }

    std::vector<MomentRow> rows;
    for (int k = 1; k <= k_max; ++k) {
        auto& bs = boot_stats[static_cast<std::size_t>(k - 1)];
        std::sort(bs.begin(), bs.end());
        std::size_t qi = std::min(static_cast<std::size_t>(0.995 * boot),
                                  static_cast<std::size_t>(boot - 1));
        double q995 = bs[qi];
        MomentRow row;
        row.k = k;
        row.value = statistic(point, k);
        row.ci = std::max(0.0, q995 - row.value);
        rows.push_back(row);
    }
    return rows;
}

std::vector<double> martingale_differences(const PairStatistic& f,
                                           const std::vector<int>& samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("martingale_differences: need at least 2 samples");
    std::vector<double> d(samples.size(), 0.0);
    for (std::size_t k = 1; k < samples.size(); ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            acc += f(samples[i], samples[k]) + f(samples[k], samples[i]);
        d[k] = acc;
    }
    return d;
}

double conditional_mean_residual(const PairStatistic& f, const DiscreteDensity& rho,
                                 const std::vector<int>& samples) {
    check_density(rho);
    double res = 0.0;
    for (std::size_t k = 1; k < samples.size(); ++k) {
        double acc = 0.0;
        for (int z = 0; z < f.n_states; ++z) {
            double inner = 0.0;
            for (std::size_t i = 0; i < k; ++i) inner += f(samples[i], z) + f(z, samples[i]);
            acc += inner * rho[static_cast<std::size_t>(z)];
        }
        res = std::max(res, std::abs(acc));
    }
    return res;
}

MartingalePaths rademacher_paths(const std::vector<double>& scales) {
    const std::size_t n = scales.size();
    if (n > 20) throw std::invalid_argument("rademacher_paths: too many steps to enumerate");
    MartingalePaths out;
    const std::size_t count = std::size_t{1} << n;
    out.increments.reserve(count);
    out.weights.assign(count, 1.0 / static_cast<double>(count));
    for (std::size_t mask = 0; mask < count; ++mask) {
        std::vector<double> path(n);
        for (std::size_t k = 0; k < n; ++k)
            path[k] = (mask >> k & 1U) ? scales[k] : -scales[k];
        out.increments.push_back(std::move(path));
    }
    return out;
}

MzResult mz_verify(const MartingalePaths& paths, double p, double cond_tol) {
    if (p < 2.0) throw std::invalid_argument("mz_verify: p must be >= 2");
    const auto& inc = paths.increments;
    if (inc.empty()) throw std::invalid_argument("mz_verify: no paths");
    const std::size_t n = inc.front().size();
    std::vector<double> w = paths.weights;
    if (w.empty()) w.assign(inc.size(), 1.0 / static_cast<double>(inc.size()));
    if (w.size() != inc.size()) throw std::invalid_argument("mz_verify: weight count mismatch");

    // conditional-mean precondition: group paths by exact prefix
    for (std::size_t k = 0; k < n; ++k) {
        std::map<std::vector<double>, std::pair<double, double>> groups;  // prefix -> (sum, wsum)
        for (std::size_t row = 0; row < inc.size(); ++row) {
            std::vector<double> prefix(inc[row].begin(),
                                       inc[row].begin() + static_cast<std::ptrdiff_t>(k));
            auto& g = groups[prefix];
            g.first += w[row] * inc[row][k];
            g.second += w[row];
        }
        for (const auto& [prefix, g] : groups)
            if (std::abs(g.first / g.second) > cond_tol)
                throw std::invalid_argument(
                    "mz_verify: increments fail the martingale-difference precondition");
    }

    auto lp_sq = [&](const std::function<double(std::size_t)>& value) {
        double acc = 0.0;
        for (std::size_t row = 0; row < inc.size(); ++row)
            acc += w[row] * std::pow(std::abs(value(row)), p);
        return std::pow(acc, 2.0 / p);
    };

    MzResult out;
    out.lhs = lp_sq([&](std::size_t row) {
        double s = 0.0;
        for (double x : inc[row]) s += x;
        return s;
    });
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        sum += lp_sq([&](std::size_t row) { return inc[row][k]; });
    out.rhs = (p - 1.0) * sum;
    return out;
}

}  // namespace chaoskit
