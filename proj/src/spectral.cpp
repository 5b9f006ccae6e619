#include "chaoskit/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chaoskit {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                std::complex<double> u = a[i + j];
                std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// O(n^2) fallback for non-power-of-two sizes; desk-scale grids are small.
void dft_naive(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    std::vector<std::complex<double>> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> s(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(j * k % n) /
                         static_cast<double>(n);
            s += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = s;
    }
    a = std::move(out);
}

}  // namespace

void dft(std::vector<std::complex<double>>& x, bool inverse) {
    if (x.empty()) return;
    if (is_pow2(x.size()))
        fft_pow2(x, inverse);
    else
        dft_naive(x, inverse);
}

void dft_nd(std::vector<std::complex<double>>& x, int dim, int m, bool inverse) {
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(m);
    if (x.size() != total) throw std::invalid_argument("dft_nd: size mismatch");

    const std::size_t n = static_cast<std::size_t>(m);
    std::vector<std::complex<double>> line(n);
    // axis a has stride m^(dim-1-a) in row-major order
    std::size_t stride = total / n;
    for (int a = 0; a < dim; ++a) {
        const std::size_t block = stride * n;  // span of one transform group
        for (std::size_t base = 0; base < total; base += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                for (std::size_t k = 0; k < n; ++k) line[k] = x[base + off + k * stride];
                dft(line, inverse);
                for (std::size_t k = 0; k < n; ++k) x[base + off + k * stride] = line[k];
            }
        }
        stride /= n;
    }
    if (inverse) {
        const double norm = 1.0 / static_cast<double>(total);
        for (auto& v : x) v *= norm;
    }
}

}  // namespace chaoskit
