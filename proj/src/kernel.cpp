#include "chaoskit/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "chaoskit/torus.hpp"

namespace chaoskit {

Kernel Kernel::tophat(double radius, double rate) {
    if (radius < 0.0 || rate < 0.0) throw std::invalid_argument("tophat: negative parameter");
    return Kernel{KernelShape::Tophat, rate, radius};
}

Kernel Kernel::constant(double rate) {
    if (rate < 0.0) throw std::invalid_argument("constant: negative rate");
    return Kernel{KernelShape::Constant, rate, 0.0};
}

Kernel Kernel::gaussian(double width, double rate) {
    if (width <= 0.0 || rate < 0.0) throw std::invalid_argument("gaussian: bad parameter");
    return Kernel{KernelShape::Gaussian, rate, width};
}

double Kernel::eval_dist_sq(double dist_sq) const {
    switch (shape) {
        case KernelShape::Constant:
            return rate;
        case KernelShape::Tophat:
            return dist_sq <= param * param ? rate : 0.0;
        case KernelShape::Gaussian:
            return rate * std::exp(-dist_sq / (2.0 * param * param));
    }
    return 0.0;
}

double Kernel::eval(std::span<const double> dx) const {
    if (shape == KernelShape::Constant) return rate;
    return eval_dist_sq(min_image_norm_sq(dx));
}

namespace {

// Area of the disk of radius r intersected with the square [-1/2,1/2]^2.
double disk_cell_area(double r) {
    using std::numbers::pi;
    if (r <= 0.5) return pi * r * r;
    const double h = 0.5;
    if (r * r >= 2.0 * h * h) return 1.0;
    return pi * r * r - 4.0 * (r * r * std::acos(h / r) - h * std::sqrt(r * r - h * h));
}

// Integral over [-1/2,1/2] of exp(-s^2 / (2 w^2)).
double gauss_cell_mass_1d(double w) {
    using std::numbers::pi;
    return std::sqrt(2.0 * pi) * w * std::erf(1.0 / (2.0 * std::numbers::sqrt2 * w));
}

}  // namespace

double Kernel::l1_norm(int dim) const {
    using std::numbers::pi;
    switch (shape) {
        case KernelShape::Constant:
            return rate;
        case KernelShape::Tophat: {
            const double r = param;
            switch (dim) {
                case 1: return rate * std::min(2.0 * r, 1.0);
                case 2: return rate * disk_cell_area(r);
                case 3:
                    if (r > 0.5) throw std::invalid_argument("tophat l1: radius > 1/2 unsupported in d=3");
                    return rate * (4.0 / 3.0) * pi * r * r * r;
                default: throw std::invalid_argument("kernel l1: dimension out of range");
            }
        }
        case KernelShape::Gaussian: {
            double m = gauss_cell_mass_1d(param);
            double out = rate;
            for (int c = 0; c < dim; ++c) out *= m;
            return out;
        }
    }
    return 0.0;
}

std::string to_string(const Kernel& k) {
    char buf[96];
    switch (k.shape) {
        case KernelShape::Tophat:
            std::snprintf(buf, sizeof buf, "tophat(radius=%.17g, rate=%.17g)", k.param, k.rate);
            break;
        case KernelShape::Constant:
            std::snprintf(buf, sizeof buf, "constant(rate=%.17g)", k.rate);
            break;
        case KernelShape::Gaussian:
            std::snprintf(buf, sizeof buf, "gaussian(width=%.17g, rate=%.17g)", k.param, k.rate);
            break;
    }
    return buf;
}

}  // namespace chaoskit
