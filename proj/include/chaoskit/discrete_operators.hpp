#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "chaoskit/mean_field.hpp"
#include "chaoskit/network.hpp"

namespace chaoskit {

/// Fully enumerated discretization of the N-particle state space: each
/// particle lives on an m^d grid of cell centers with one of n species
/// labels. Desk-scale only; the constructor enforces a 10^6 state cap.
class DiscreteStateSpace {
public:
    DiscreteStateSpace(int dim, int grid_points, int n_species, int n_particles);

    int dim() const { return dim_; }
    int grid_points() const { return m_; }
    int n_species() const { return n_species_; }
    int n_particles() const { return n_particles_; }
    std::size_t cells() const { return cells_; }
    std::size_t single_states() const { return single_; }  // cells * n_species
    std::size_t states() const { return states_; }
    double state_volume() const { return state_vol_; }  // cellvol^N

    /// Particle i's single-particle state inside a packed state index.
    std::size_t particle_state(std::size_t state, int i) const;
    std::size_t replace_particle_state(std::size_t state, int i, std::size_t sub) const;

    int species_of(std::size_t sub) const { return static_cast<int>(sub / cells_) + 1; }
    std::size_t cell_of(std::size_t sub) const { return sub % cells_; }
    std::size_t sub_state(std::size_t cell, int species) const {
        return static_cast<std::size_t>(species - 1) * cells_ + cell;
    }

    /// Cell-center coordinates of a cell index.
    std::vector<double> cell_center(std::size_t cell) const;

    /// Permutes particle labels: out(y) = in(tau y).
    std::vector<double> permute(std::span<const double> v, const std::vector<int>& tau) const;

private:
    int dim_, m_, n_species_, n_particles_;
    std::size_t cells_, single_, states_;
    double state_vol_;
    std::vector<std::size_t> pow_;  // single_^i
};

/// Jump part of the generator applied to an observable:
/// (S phi)(y) = (1/N) sum_R sum_{i != j} chi_R(xi_i, xi_j) Phi_R(x_i - x_j)
///              [phi(types i,j -> outputs) - phi(y)].
/// Per-state contributions are summed in value order, so the result is
/// invariant under particle relabeling at the bit level.
std::vector<double> apply_jump_generator(const DiscreteStateSpace& space,
                                         const ReactionNetwork& net,
                                         std::span<const double> phi);

/// Adjoint jump operator (the forward-equation right-hand side).
std::vector<double> apply_jump_adjoint(const DiscreteStateSpace& space,
                                       const ReactionNetwork& net,
                                       std::span<const double> psi);

/// Inner product sum_y a(y) b(y) * statevol.
double state_inner_product(const DiscreteStateSpace& space, std::span<const double> a,
                           std::span<const double> b);

struct RateTriplet {
    std::size_t row, col;
    double value;
};

/// Explicit forward-equation rate matrix as triplets: off-diagonal entries
/// (target, source, rate) plus the balancing diagonal, so columns sum to
/// zero and off-diagonals are nonnegative.
std::vector<RateTriplet> forward_rate_matrix(const DiscreteStateSpace& space,
                                             const ReactionNetwork& net);

std::vector<double> apply_triplets(std::size_t n, const std::vector<RateTriplet>& m,
                                   std::span<const double> v);

std::vector<double> triplet_column_sums(std::size_t n, const std::vector<RateTriplet>& m);

/// Dense exp(t A) v by scaling and squaring with a Taylor kernel; A is given
/// by its action. Intended for the small spaces of this module only.
class DenseMatrix {
public:
    explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}
    std::size_t size() const { return n_; }
    double& at(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
    double at(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }

    static DenseMatrix from_triplets(std::size_t n, const std::vector<RateTriplet>& t);
    DenseMatrix multiply(const DenseMatrix& o) const;
    std::vector<double> apply(std::span<const double> v) const;
    double max_abs() const;

    /// exp(t * this) by scaling and squaring.
    DenseMatrix exponential(double t) const;

private:
    std::size_t n_;
    std::vector<double> a_;
};

/// Observable on the single-particle state space, with its spatial Laplacian.
struct TypedObservable {
    std::function<double(std::span<const double>, int)> value;
    std::function<double(std::span<const double>, int)> laplacian;
};

struct DynkinResult {
    double residual = 0.0;       // mean of phi_bar(T) - phi_bar(0) - integral(L phi_bar)
    double ci99 = 0.0;
    double mean_final = 0.0;     // Monte-Carlo E[phi_bar(T)]
    double mean_final_ci99 = 0.0;
};

/// Monte-Carlo Dynkin residual: simulates the particle system and compares
/// the increment of the empirical observable average against the time
/// integral of the generator applied along the trajectory (left-endpoint
/// rule, so the residual carries an O(dt) quadrature bias).
DynkinResult dynkin_residual(const ReactionNetwork& net, const DiffusionSpec& diff,
                             const DensityField& rho0, std::size_t n_particles, double t_final,
                             double dt, int runs, std::uint64_t seed,
                             const TypedObservable& obs, int threads = 0);

}  // namespace chaoskit
