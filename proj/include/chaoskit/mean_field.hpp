#pragma once

#include <functional>
#include <map>
#include <vector>

#include "chaoskit/density_field.hpp"
#include "chaoskit/kernel.hpp"
#include "chaoskit/network.hpp"

namespace chaoskit {

/// Species -> diffusion coefficient (units length / sqrt(time)).
struct DiffusionSpec {
    std::vector<double> sigma;  // indexed by species-1

    static DiffusionSpec uniform(int n_species, double s) {
        return DiffusionSpec{std::vector<double>(static_cast<std::size_t>(n_species), s)};
    }
    double of(int species) const { return sigma.at(static_cast<std::size_t>(species - 1)); }
    int n_species() const { return static_cast<int>(sigma.size()); }
};

enum class ConvolvePath { Auto, Direct, Transform };

/// Discrete circular convolution against the kernel tabulated at cell-center
/// displacements: out[c] = cellvol * sum_{c'} K(x_c - x_{c'}) u[c'].
/// The transform path matches direct summation to ~1e-13 relative error.
std::vector<double> periodic_convolve(const Kernel& kernel, const std::vector<double>& field,
                                      int dim, int grid_size,
                                      ConvolvePath path = ConvolvePath::Auto);

/// Reaction part of the mean-field right-hand side: for each reaction
/// (k,l)->(k',l'), losses -(K*u_l)u_k at k and -(K*u_k)u_l at l, and the
/// matching gains at k' and l'. Sums to zero over species and cells.
DensityField reaction_rhs(const ReactionNetwork& net, const DensityField& field,
                          ConvolvePath path = ConvolvePath::Auto);

/// One IMEX step: explicit Euler on the reaction term, then the exact
/// periodic heat multiplier exp(-sigma^2/2 |2 pi f|^2 dt) per species.
/// Values in [-1e-12, 0) are clipped to zero; anything lower throws
/// (the step size is too large for the reaction magnitudes).
DensityField pde_step(const ReactionNetwork& net, const DiffusionSpec& diff,
                      const DensityField& field, double dt,
                      ConvolvePath path = ConvolvePath::Auto);

/// Repeated pde_step with snapshots at the requested times (snapped to step
/// boundaries). Returns the recorded fields in time order.
std::vector<DensityField> solve_pde(const ReactionNetwork& net, const DiffusionSpec& diff,
                                    const DensityField& rho0, double t_final, double dt,
                                    std::vector<double> record_times = {},
                                    ConvolvePath path = ConvolvePath::Auto);

/// Classical RK4 for the spatially homogeneous mass-action reduction
/// dy_k/dt with rate constants lambda_R (normally the kernel L1 norms).
/// Records (t, y) after every step, starting with the initial state.
std::vector<std::pair<double, std::vector<double>>> solve_mass_action(
    const ReactionNetwork& net, const std::vector<double>& y0,
    const std::vector<double>& rate_constants, double t_final, double dt);

/// Closed-form fraction for the two-species irreversible network
/// S1+S2 -> 2S2 with u + w = 1: u(t) = u0 e^{-lambda t} / (1 - u0 + u0 e^{-lambda t}).
double logistic_fraction(double u0, double lambda, double t);

}  // namespace chaoskit
