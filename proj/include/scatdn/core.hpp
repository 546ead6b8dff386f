// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "scatdn/fft.hpp"

namespace scatdn {

using cdouble = std::complex<double>;

/// Real-valued N x N periodic field on [0,1]^2, row-major. Row index is the
/// second coordinate n2 (vertical), column index the first coordinate n1.
struct GridImage {
    std::size_t n = 0;
    std::vector<double> v;

    GridImage() = default;
    explicit GridImage(std::size_t side, double fill = 0.0) : n(side), v(side * side, fill) {}

    std::size_t size() const { return v.size(); }
    double& at(std::size_t row, std::size_t col) { return v[row * n + col]; }
    double at(std::size_t row, std::size_t col) const { return v[row * n + col]; }
};

/// Complex N x N field sharing the GridImage layout. Used for frequency-domain
/// filters and for complex wavelet coefficient maps.
struct ComplexField {
    std::size_t n = 0;
    std::vector<cdouble> v;

    ComplexField() = default;
    explicit ComplexField(std::size_t side, cdouble fill = {}) : n(side), v(side * side, fill) {}

    std::size_t size() const { return v.size(); }
    cdouble& at(std::size_t row, std::size_t col) { return v[row * n + col]; }
    cdouble at(std::size_t row, std::size_t col) const { return v[row * n + col]; }
};

/// Signed DFT bin index in [-N/2, N/2).
inline long signed_index(std::size_t m, std::size_t n) {
    return m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
}

/// Frequency grid for an N x N image sampled on [0,1]^2. Bin (m1, m2) carries
/// the angular frequency omega = 2*pi*(signed m1, signed m2) in radians per
/// unit length; the matching digital frequency is omega / N in [-pi, pi).
struct FreqGrid {
    std::size_t n;

    explicit FreqGrid(std::size_t side) : n(side) {
        if (side == 0) throw std::invalid_argument("FreqGrid: N must be positive");
    }

    double omega1(std::size_t col) const { return 2.0 * std::numbers::pi * static_cast<double>(signed_index(col, n)); }
    double omega2(std::size_t row) const { return 2.0 * std::numbers::pi * static_cast<double>(signed_index(row, n)); }
    double digital1(std::size_t col) const { return omega1(col) / static_cast<double>(n); }
    double digital2(std::size_t row) const { return omega2(row) / static_cast<double>(n); }
};

inline ComplexField to_complex(const GridImage& img) {
    ComplexField out(img.n);
    for (std::size_t i = 0; i < img.size(); ++i) out.v[i] = img.v[i];
    return out;
}

inline GridImage real_part(const ComplexField& f) {
    GridImage out(f.n);
    for (std::size_t i = 0; i < f.size(); ++i) out.v[i] = f.v[i].real();
    return out;
}

inline ComplexField dft(const GridImage& img) {
    ComplexField out = to_complex(img);
    fft::forward_2d(out.v.data(), out.n);
    return out;
}

inline ComplexField dft(const ComplexField& f) {
    ComplexField out = f;
    fft::forward_2d(out.v.data(), out.n);
    return out;
}

inline ComplexField idft(const ComplexField& f) {
    ComplexField out = f;
    fft::inverse_2d(out.v.data(), out.n);
    return out;
}

/// Discrete l1 norm of an image field: (1/d) * sum |.|, approximating the
/// continuous L1 integral over [0,1]^2.
inline double field_l1(const ComplexField& f) {
    double s = 0.0;
    for (const auto& z : f.v) s += std::abs(z);
    return s / static_cast<double>(f.size());
}

inline double field_l1(const GridImage& f) {
    double s = 0.0;
    for (double x : f.v) s += std::abs(x);
    return s / static_cast<double>(f.size());
}

inline double field_l2sq(const GridImage& f) {
    double s = 0.0;
    for (double x : f.v) s += x * x;
    return s / static_cast<double>(f.size());
}

/// l1 norm of a frequency-domain filter's spatial kernel: plain sum of |IDFT|.
/// With the spectral-product convolution convention this approximates the
/// continuous L1 norm of the underlying filter.
inline double filter_l1(const ComplexField& hat) {
    ComplexField k = idft(hat);
    double s = 0.0;
    for (const auto& z : k.v) s += std::abs(z);
    return s;
}

/// Circular shift by (d1, d2) pixels: out(n1, n2) = in(n1 - d1, n2 - d2).
template <typename Field>
Field circular_shift(const Field& f, long d1, long d2) {
    Field out(f.n);
    long n = static_cast<long>(f.n);
    auto wrap = [n](long x) { return ((x % n) + n) % n; };
    for (long r = 0; r < n; ++r)
        for (long c = 0; c < n; ++c) out.v[static_cast<std::size_t>(r) * f.n + static_cast<std::size_t>(c)] =
            f.v[static_cast<std::size_t>(wrap(r - d2)) * f.n + static_cast<std::size_t>(wrap(c - d1))];
    return out;
}

/// Deterministic Gaussian generator. Box-Muller over mt19937_64 so that the
/// sample stream is identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {
        // 53-bit mantissa uniform in [0,1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Stable seed derivation for independent sub-streams (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(base ^ mix(a)) ^ mix(b)) ^ mix(c));
}

}  // namespace scatdn
