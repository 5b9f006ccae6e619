#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace chaoskit {

/// Bounded pair statistic tabulated on a finite state space (grid x species),
/// so marginal integrals are exact finite sums and the same table serves both
/// quadrature and Monte-Carlo sampling.
struct PairStatistic {
    int n_states = 0;
    std::vector<double> values;  // row-major n_states x n_states

    double operator()(int y, int yp) const {
        return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(n_states) +
                      static_cast<std::size_t>(yp)];
    }
    double& at(int y, int yp) {
        return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(n_states) +
                      static_cast<std::size_t>(yp)];
    }
    double linf() const;

    static PairStatistic tabulate(int n_states, const std::function<double(int, int)>& f);
};

/// Probability weights on the discrete states; must sum to 1 within 1e-10.
using DiscreteDensity = std::vector<double>;

void check_density(const DiscreteDensity& rho);

/// Centers a pair statistic so both conditional marginal means vanish:
/// f~(y,y') = f - E[f(y,.)] - E[f(.,y')] + E[f]. Residuals are exact sums,
/// at rounding level.
PairStatistic center_function(const PairStatistic& f_raw, const DiscreteDensity& rho);

/// Largest marginal-mean magnitude of f under rho (zero for centered f).
double marginal_mean_residual(const PairStatistic& f, const DiscreteDensity& rho);

/// Scale 2*sqrt(2)*e*|f|_inf entering the exponential-moment bound.
/// Errors on linf = 0.
double eta_of(double linf);

struct MomentEstimate {
    double mean = 0.0;
    double ci99 = 0.0;  // normal-approximation 99% half width
};

/// Monte-Carlo estimate of E[exp((eta*n)^-1 sum_{i != j} f(Y_i, Y_j))] over
/// i.i.d. draws from rho, diagonal excluded. Trials run in parallel with
/// per-trial derived seeds and merge deterministically by trial index.
MomentEstimate exp_moment_estimate(const PairStatistic& f, const DiscreteDensity& rho, int n,
                                   double eta, int trials, std::uint64_t seed,
                                   int threads = 0);

/// Exact two-sample quadrature of the same expectation at n = 2.
double exp_moment_quadrature_n2(const PairStatistic& f, const DiscreteDensity& rho, double eta);

struct MomentRow {
    int k = 0;
    double value = 0.0;  // k^-1 |E A_n^k|^(1/k)
    double ci = 0.0;     // one-sided 99.5% bootstrap margin above the value
};

/// Normalized moments of A_n = n^-1 sum_{i != j} f(Y_i, Y_j) for k=1..k_max
/// (k_max <= 8), with bootstrap confidence margins.
std::vector<MomentRow> moment_bound_check(const PairStatistic& f, const DiscreteDensity& rho,
                                          int n, int k_max, int trials, std::uint64_t seed);

/// Martingale-difference decomposition D_1 = 0,
/// D_k = sum_{i<k} [f(Y_i, Y_k) + f(Y_k, Y_i)]; sum_k D_k equals the full
/// off-diagonal double sum.
std::vector<double> martingale_differences(const PairStatistic& f,
                                           const std::vector<int>& samples);

/// Exact conditional mean E[D_k | Y_1..Y_{k-1}] with Y_k integrated against
/// rho; vanishes for centered f.
double conditional_mean_residual(const PairStatistic& f, const DiscreteDensity& rho,
                                 const std::vector<int>& samples);

struct MzResult {
    double lhs = 0.0;  // |S_n|_p^2
    double rhs = 0.0;  // (p-1) sum_k |X_k|_p^2
};

/// Weighted paths of martingale differences (rows: paths, columns: X_1..X_n).
struct MartingalePaths {
    std::vector<std::vector<double>> increments;
    std::vector<double> weights;  // empty = uniform
};

/// All 2^n sign paths with weight 2^-n and per-step scales.
MartingalePaths rademacher_paths(const std::vector<double>& scales);

/// Checks the martingale moment inequality |S_n|_p^2 <= (p-1) sum |X_k|_p^2
/// on sampled or enumerated paths. Verifies the empirical conditional-mean
/// precondition (grouping paths by exact prefix) before evaluating; throws
/// if the residual exceeds cond_tol.
MzResult mz_verify(const MartingalePaths& paths, double p, double cond_tol = 1e-10);

}  // namespace chaoskit
