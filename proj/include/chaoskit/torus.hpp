#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace chaoskit {

// The spatial domain is the unit torus [0,1)^d in every dimension; all
// lengths (kernel radii, widths, displacements) are in these units.

/// Wraps a scalar coordinate into [0,1).
inline double wrap_unit(double x) {
    double y = x - std::floor(x);
    // floor(x) == x for integral x, but -1e-17 - (-1.0) == 1.0 can occur
    if (y >= 1.0) y -= 1.0;
    return y;
}

/// Minimum-image representative of a displacement, in [-0.5, 0.5].
inline double min_image(double dx) {
    return dx - std::round(dx);
}

/// Squared minimum-image Euclidean distance between two points given as
/// coordinate spans of equal dimension.
inline double min_image_dist_sq(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        double u = min_image(a[c] - b[c]);
        s += u * u;
    }
    return s;
}

inline double min_image_norm_sq(std::span<const double> dx) {
    double s = 0.0;
    for (double v : dx) {
        double u = min_image(v);
        s += u * u;
    }
    return s;
}

}  // namespace chaoskit
