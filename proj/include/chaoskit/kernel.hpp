#pragma once

#include <span>
#include <string>

namespace chaoskit {

enum class KernelShape { Tophat, Constant, Gaussian };

/// Symmetric nonnegative pairwise reaction-rate kernel on the unit torus.
/// All shapes depend on position only through the minimum-image distance,
/// so symmetry and periodicity hold by construction.
struct Kernel {
    KernelShape shape = KernelShape::Constant;
    double rate = 0.0;   // sup value; reactions per unit time per unit density
    double param = 0.0;  // tophat: radius, gaussian: width, constant: unused

    static Kernel tophat(double radius, double rate);
    static Kernel constant(double rate);
    static Kernel gaussian(double width, double rate);

    /// Evaluates the kernel at a displacement (any real vector; wrapped
    /// internally). The tophat uses the closed ball (dist <= radius).
    double eval(std::span<const double> dx) const;

    /// Evaluates at a known minimum-image squared distance.
    double eval_dist_sq(double dist_sq) const;

    /// Integral over the torus, in closed form for the given dimension.
    double l1_norm(int dim) const;

    /// Supremum of the kernel (the rate).
    double linf_norm() const { return rate; }

    /// True if the support is a ball of radius < 1/2 (cell lists apply).
    bool compact_support() const { return shape == KernelShape::Tophat; }

    /// Support radius for compactly supported kernels.
    double support_radius() const { return param; }

    bool operator==(const Kernel&) const = default;
};

std::string to_string(const Kernel& k);

}  // namespace chaoskit
