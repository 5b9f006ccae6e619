#pragma once

#include <vector>

#include "chaoskit/density_field.hpp"
#include "chaoskit/mean_field.hpp"
#include "chaoskit/network.hpp"

namespace chaoskit {

/// A point of the single-particle state space restricted to the grid:
/// a cell index plus a 1-based species label.
struct GridPoint {
    std::size_t cell = 0;
    int species = 1;
};

struct FComponents {
    double a = 0.0;      // evaluated at the second argument y'
    double a_hat = 0.0;  // evaluated at the first argument y
    double b = 0.0;
    double f = 0.0;      // a + a_hat - b
};

struct MeanZeroResidual {
    double res_first = 0.0;    // max over y' of |integral_y f(y,y') rho(y)|
    double res_second = 0.0;   // max over y  of |integral_y' f(y,y') rho(y')|
    double res_a = 0.0;        // max |integral A rho| and |integral Ahat rho|
    double res_b = 0.0;        // max |integral B(.,y') rho - A(y')| and mirrored
};

/// Pairwise entropy-method functions built from a mean-field solution snapshot.
/// All convolutions are grid convolutions of the field itself, so the marginal
/// integral identities hold on the grid up to rounding. Construction fails if
/// any denominator species dips below the 1e-14 positivity guard.
class EntropyFunctions {
public:
    EntropyFunctions(const DensityField& rho, const ReactionNetwork& net,
                     ConvolvePath path = ConvolvePath::Auto);

    int n_states() const { return static_cast<int>(rho_.cells()) * rho_.n_species(); }
    const DensityField& field() const { return rho_; }
    const ReactionNetwork& network() const { return *net_; }

    GridPoint state(int index) const {
        return {static_cast<std::size_t>(index) % rho_.cells(),
                static_cast<int>(static_cast<std::size_t>(index) / rho_.cells()) + 1};
    }

    /// Per-reaction components at a point pair; f here is the single-reaction
    /// term. Use eval_f for the sum over reactions.
    FComponents eval_components(int reaction_index, GridPoint y, GridPoint y_prime) const;

    double eval_f(GridPoint y, GridPoint y_prime) const;

    /// Sum over reactions of sup|A| + sup|Ahat| + sup|B| on the grid.
    double k_bound() const;

    /// Largest input/output density ratio over the grid (the empirical
    /// comparability constant).
    double comparability_constant() const;

    /// Quadrature residuals of the marginal mean-zero identities.
    MeanZeroResidual mean_zero_residual() const;

private:
    double a_term(int reaction_index, GridPoint y) const;
    double a_hat_term(int reaction_index, GridPoint y) const;
    double b_term(int reaction_index, GridPoint y, GridPoint y_prime) const;
    double density(GridPoint y) const { return rho_.grid(y.species)[y.cell]; }

    DensityField rho_;
    const ReactionNetwork* net_;
    // per reaction: kernel tabulation at cell displacements and the two
    // convolutions (Phi * u_k) and (Phi * u_l)
    std::vector<std::vector<double>> kernel_tab_;
    std::vector<std::vector<double>> conv_k_;
    std::vector<std::vector<double>> conv_l_;
};

/// Total-variation style L1 distance cellvol * sum |a - b| between two
/// normalized fields on matching grids; a value in [0, 2].
double marginal_l1_distance(const DensityField& a, const DensityField& b);

}  // namespace chaoskit
