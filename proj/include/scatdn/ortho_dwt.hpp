// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "scatdn/core.hpp"

namespace scatdn {

/// Orthogonal conjugate-mirror filter pair. Only the low-pass is stored; the
/// high-pass follows from the quadrature-mirror relation g[t] = (-1)^t h[L-1-t].
struct OrthoFilterSpec {
    std::string name;
    std::vector<double> lowpass;
    int vanishing_moments = 1;

    std::vector<double> highpass() const {
        std::size_t L = lowpass.size();
        std::vector<double> g(L);
        for (std::size_t t = 0; t < L; ++t)
            g[t] = ((t % 2 == 0) ? 1.0 : -1.0) * lowpass[L - 1 - t];
        return g;
    }

    void validate() const {
        double s = 0.0, s2 = 0.0;
        for (double h : lowpass) { s += h; s2 += h * h; }
        if (std::abs(s2 - 1.0) > 1e-10) throw std::invalid_argument("OrthoFilterSpec: ||h||_2 != 1");
        if (std::abs(s - std::sqrt(2.0)) > 1e-10) throw std::invalid_argument("OrthoFilterSpec: sum(h) != sqrt(2)");
    }
};

/// Built-in filter registry.
inline OrthoFilterSpec ortho_filter_spec(const std::string& name) {
    OrthoFilterSpec spec;
    spec.name = name;
    if (name == "haar") {
        double r = 1.0 / std::sqrt(2.0);
        spec.lowpass = {r, r};
        spec.vanishing_moments = 1;
    } else if (name == "sym4") {
        spec.lowpass = {
            0.03222310060404270, -0.012603967262037833, -0.09921954357684722,
            0.29785779560527736, 0.8037387518059161, 0.49761866763201545,
            -0.02963552764599851, -0.07576571478927333};
        spec.vanishing_moments = 4;
    } else {
        throw std::invalid_argument("ortho_filter_spec: unknown filter '" + name + "'");
    }
    spec.validate();
    return spec;
}

/// Detail subbands of one decomposition level. lh: low in n1 (columns),
/// high in n2 (rows); hl the opposite; hh high in both.
struct FwtDetailBand {
    GridImage lh, hl, hh;
};

/// Subband pyramid of a separable 2-D periodic orthogonal FWT.
/// details[0] is the finest level; ll the coarsest approximation.
struct FwtPyramid {
    std::size_t n = 0;
    int levels = 0;
    GridImage ll;
    std::vector<FwtDetailBand> details;
};

namespace detail {

// One periodic analysis step: a[i] = sum_t h[t] x[(2i+t) mod n], same for d.
inline void analysis_1d(const double* x, std::size_t n, const std::vector<double>& h,
                        const std::vector<double>& g, double* a, double* d) {
    std::size_t half = n / 2, L = h.size();
    for (std::size_t i = 0; i < half; ++i) {
        double sa = 0.0, sd = 0.0;
        for (std::size_t t = 0; t < L; ++t) {
            double xv = x[(2 * i + t) % n];
            sa += h[t] * xv;
            sd += g[t] * xv;
        }
        a[i] = sa;
        d[i] = sd;
    }
}

// Adjoint of analysis_1d: exact inverse by orthogonality.
inline void synthesis_1d(const double* a, const double* d, std::size_t n,
                         const std::vector<double>& h, const std::vector<double>& g, double* x) {
    std::size_t half = n / 2, L = h.size();
    for (std::size_t i = 0; i < n; ++i) x[i] = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        for (std::size_t t = 0; t < L; ++t) {
            std::size_t p = (2 * i + t) % n;
            x[p] += h[t] * a[i] + g[t] * d[i];
        }
    }
}

// One 2-D level on an m x m image: rows then columns, yielding 4 m/2 subbands.
inline void level_forward(const GridImage& in, const OrthoFilterSpec& spec,
                          GridImage& ll, FwtDetailBand& band) {
    std::size_t m = in.n, half = m / 2;
    auto h = spec.lowpass;
    auto g = spec.highpass();

    // rows: along n1 (columns index), output [A | D]
    GridImage rowpass(m);
    std::vector<double> a(half), d(half);
    for (std::size_t r = 0; r < m; ++r) {
        analysis_1d(&in.v[r * m], m, h, g, a.data(), d.data());
        for (std::size_t i = 0; i < half; ++i) {
            rowpass.at(r, i) = a[i];
            rowpass.at(r, half + i) = d[i];
        }
    }
    // columns: along n2 (row index)
    ll = GridImage(half);
    band.lh = GridImage(half);
    band.hl = GridImage(half);
    band.hh = GridImage(half);
    std::vector<double> col(m);
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t r = 0; r < m; ++r) col[r] = rowpass.at(r, c);
        analysis_1d(col.data(), m, h, g, a.data(), d.data());
        for (std::size_t i = 0; i < half; ++i) {
            if (c < half) {
                ll.at(i, c) = a[i];
                band.lh.at(i, c) = d[i];
            } else {
                band.hl.at(i, c - half) = a[i];
                band.hh.at(i, c - half) = d[i];
            }
        }
    }
}

inline GridImage level_inverse(const GridImage& ll, const FwtDetailBand& band, const OrthoFilterSpec& spec) {
    std::size_t half = ll.n, m = 2 * half;
    auto h = spec.lowpass;
    auto g = spec.highpass();

    GridImage rowpass(m);
    std::vector<double> a(half), d(half), col(m);
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t i = 0; i < half; ++i) {
            if (c < half) {
                a[i] = ll.at(i, c);
                d[i] = band.lh.at(i, c);
            } else {
                a[i] = band.hl.at(i, c - half);
                d[i] = band.hh.at(i, c - half);
            }
        }
        synthesis_1d(a.data(), d.data(), m, h, g, col.data());
        for (std::size_t r = 0; r < m; ++r) rowpass.at(r, c) = col[r];
    }
    GridImage out(m);
    std::vector<double> row(m);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t i = 0; i < half; ++i) {
            a[i] = rowpass.at(r, i);
            d[i] = rowpass.at(r, half + i);
        }
        synthesis_1d(a.data(), d.data(), m, h, g, row.data());
        for (std::size_t c = 0; c < m; ++c) out.at(r, c) = row[c];
    }
    return out;
}

}  // namespace detail

inline FwtPyramid fwt_forward(const GridImage& image, const OrthoFilterSpec& spec, int levels) {
    spec.validate();
    if (levels < 1) throw std::invalid_argument("fwt_forward: levels must be >= 1");
    if (image.n == 0 || image.n % (std::size_t{1} << levels) != 0)
        throw std::invalid_argument("fwt_forward: N must be divisible by 2^levels");

    FwtPyramid pyr;
    pyr.n = image.n;
    pyr.levels = levels;
    GridImage cur = image;
    for (int l = 0; l < levels; ++l) {
        GridImage ll;
        FwtDetailBand band;
        detail::level_forward(cur, spec, ll, band);
        pyr.details.push_back(std::move(band));
        cur = std::move(ll);
    }
    pyr.ll = std::move(cur);
    return pyr;
}

inline GridImage fwt_inverse(const FwtPyramid& pyramid, const OrthoFilterSpec& spec) {
    spec.validate();
    if (pyramid.levels < 1 || pyramid.details.size() != static_cast<std::size_t>(pyramid.levels))
        throw std::invalid_argument("fwt_inverse: inconsistent pyramid");
    GridImage cur = pyramid.ll;
    for (int l = pyramid.levels - 1; l >= 0; --l) {
        const auto& band = pyramid.details[static_cast<std::size_t>(l)];
        if (band.lh.n != cur.n) throw std::invalid_argument("fwt_inverse: subband size mismatch");
        cur = detail::level_inverse(cur, band, spec);
    }
    return cur;
}

}  // namespace scatdn
