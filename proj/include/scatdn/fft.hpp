// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace scatdn::fft {

using cdouble = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Precomputed twiddle factors and bit-reversal permutation for a fixed
/// length. Power-of-two lengths run the radix-2 path; other lengths fall back
/// to a direct DFT (used only for small test grids).
class Plan {
public:
    explicit Plan(std::size_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("fft::Plan: zero length");
        if (!is_power_of_two(n)) {
            tw_.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
                tw_[k] = {std::cos(ang), std::sin(ang)};
            }
            return;
        }
        rev_.resize(n);
        std::size_t log2n = 0;
        while ((std::size_t{1} << log2n) < n) ++log2n;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
            rev_[i] = r;
        }
        tw_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            tw_[k] = {std::cos(ang), std::sin(ang)};
        }
    }

    std::size_t size() const { return n_; }

    // In-place forward DFT: X[m] = sum_n x[n] e^{-2 pi i m n / N}.
    void forward(cdouble* x) const { run(x, false); }

    // In-place inverse DFT with 1/N normalization.
    void inverse(cdouble* x) const {
        run(x, true);
        double s = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] *= s;
    }

private:
    void run(cdouble* x, bool invert) const {
        std::size_t n = n_;
        if (!is_power_of_two(n)) {
            std::vector<cdouble> out(n, cdouble{});
            for (std::size_t m = 0; m < n; ++m)
                for (std::size_t t = 0; t < n; ++t) {
                    cdouble w = tw_[m * t % n];
                    out[m] += x[t] * (invert ? std::conj(w) : w);
                }
            for (std::size_t i = 0; i < n; ++i) x[i] = out[i];
            return;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (i < rev_[i]) std::swap(x[i], x[rev_[i]]);
        for (std::size_t len = 2; len <= n; len <<= 1) {
            std::size_t step = n / len;
            for (std::size_t i = 0; i < n; i += len) {
                for (std::size_t k = 0; k < len / 2; ++k) {
                    cdouble w = tw_[k * step];
                    if (invert) w = std::conj(w);
                    cdouble u = x[i + k];
                    cdouble v = x[i + k + len / 2] * w;
                    x[i + k] = u + v;
                    x[i + k + len / 2] = u - v;
                }
            }
        }
    }

    std::size_t n_;
    std::vector<std::size_t> rev_;
    std::vector<cdouble> tw_;
};

/// Shared plan cache. Plans are immutable after construction; the cache keeps
/// one plan per size for the lifetime of the process.
inline const Plan& plan_for(std::size_t n) {
    static thread_local std::vector<std::unique_ptr<Plan>> cache;
    for (auto& p : cache)
        if (p->size() == n) return *p;
    cache.push_back(std::make_unique<Plan>(n));
    return *cache.back();
}

/// In-place 2-D forward DFT of a row-major N x N complex field.
inline void forward_2d(cdouble* x, std::size_t n) {
    const Plan& p = plan_for(n);
    for (std::size_t r = 0; r < n; ++r) p.forward(x + r * n);
    std::vector<cdouble> col(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) col[r] = x[r * n + c];
        p.forward(col.data());
        for (std::size_t r = 0; r < n; ++r) x[r * n + c] = col[r];
    }
}

/// In-place 2-D inverse DFT (1/N^2 normalization).
inline void inverse_2d(cdouble* x, std::size_t n) {
    const Plan& p = plan_for(n);
    for (std::size_t r = 0; r < n; ++r) p.inverse(x + r * n);
    std::vector<cdouble> col(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) col[r] = x[r * n + c];
        p.inverse(col.data());
        for (std::size_t r = 0; r < n; ++r) x[r * n + c] = col[r];
    }
}

}  // namespace scatdn::fft
