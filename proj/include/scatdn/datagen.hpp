// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "scatdn/core.hpp"
#include "scatdn/ortho_dwt.hpp"

namespace scatdn {

/// Spectral filters shaping white noise into uniformly Holder-alpha fields.
/// The 2-D filter is (c + |omega|^2)^{-(alpha+1)/2}; its squared modulus gives
/// a power spectrum |omega|^{-(2 alpha + 2)}, the regularity-alpha scaling in
/// two dimensions. The 1-D exponent -(2 alpha + 1)/4 is chosen so the squared
/// spectrum scales as omega^{-(2 alpha + 1)}, the regularity-alpha scaling in
/// one dimension.
inline double geo_filter_2d(double omega_sq, double alpha, double c) {
    if (c <= 0.0) throw std::invalid_argument("geo_filter_2d: c must be > 0");
    return std::pow(c + omega_sq, -(alpha + 1.0) / 2.0);
}

inline double geo_filter_1d(double omega, double alpha, double c) {
    if (c <= 0.0) throw std::invalid_argument("geo_filter_1d: c must be > 0");
    return std::pow(c + omega * omega, -(2.0 * alpha + 1.0) / 4.0);
}

/// 1-D uniformly regular field: Gaussian white noise spectrally shaped by the
/// 1-D filter. The filter is real and even, so the result is real.
inline std::vector<double> sample_uniform_field_1d(std::size_t n, double alpha, double c, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<cdouble> x(n);
    for (auto& z : x) z = rng.gaussian();
    fft::plan_for(n).forward(x.data());
    for (std::size_t m = 0; m < n; ++m) {
        double omega = 2.0 * std::numbers::pi * static_cast<double>(signed_index(m, n));
        x[m] *= geo_filter_1d(omega, alpha, c);
    }
    fft::plan_for(n).inverse(x.data());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i].real();
    return out;
}

/// 2-D uniformly regular field, same construction with the 2-D filter.
inline GridImage sample_uniform_field_2d(std::size_t n, double alpha, double c, std::uint64_t seed) {
    Rng rng(seed);
    ComplexField x(n);
    for (auto& z : x.v) z = rng.gaussian();
    fft::forward_2d(x.v.data(), n);
    FreqGrid grid(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t col = 0; col < n; ++col) {
            double w1 = grid.omega1(col), w2 = grid.omega2(r);
            x.at(r, col) *= geo_filter_2d(w1 * w1 + w2 * w2, alpha, c);
        }
    fft::inverse_2d(x.v.data(), n);
    return real_part(x);
}

/// Three 1-D contour graphs with the rotation angle of each half-plane
/// constraint. Angle i is drawn from [(1+3(i-1)) 2pi/9, (2+3(i-1)) 2pi/9].
struct ContourSet {
    std::array<std::vector<double>, 3> curves;
    std::array<double, 3> angles{};

    void validate() const {
        for (int i = 0; i < 3; ++i) {
            double lo = (1.0 + 3.0 * i) * 2.0 * std::numbers::pi / 9.0;
            double hi = (2.0 + 3.0 * i) * 2.0 * std::numbers::pi / 9.0;
            if (angles[i] < lo || angles[i] > hi) throw std::invalid_argument("ContourSet: angle out of band");
            if (curves[i].empty()) throw std::invalid_argument("ContourSet: empty curve");
        }
    }
};

/// Evaluate a sampled curve at abscissa x in [0,1] by linear interpolation of
/// its pixel-center samples, extended as a constant outside the sample range.
inline double contour_value(const std::vector<double>& curve, double x) {
    std::size_t n = curve.size();
    double t = x * static_cast<double>(n) - 0.5;
    if (t <= 0.0) return curve.front();
    if (t >= static_cast<double>(n - 1)) return curve.back();
    std::size_t i = static_cast<std::size_t>(t);
    double frac = t - static_cast<double>(i);
    return curve[i] * (1.0 - frac) + curve[i + 1] * frac;
}

/// Binary foreground mask: product over the three contours of the rotated
/// half-plane indicator 1_{v <= gamma(u)}, evaluated at pixel centers. Pixels
/// whose rotated abscissa leaves the unit square use the clamped curve value,
/// so the grid boundary acts as an implicit straight fourth contour.
inline GridImage build_foreground_mask(const ContourSet& contours, std::size_t n) {
    for (const auto& curve : contours.curves)
        if (curve.empty()) throw std::invalid_argument("build_foreground_mask: empty curve");
    GridImage mask(n, 1.0);
    for (int i = 0; i < 3; ++i) {
        double ca = std::cos(contours.angles[i]), sa = std::sin(contours.angles[i]);
        for (std::size_t r = 0; r < n; ++r) {
            double v = (static_cast<double>(r) + 0.5) / static_cast<double>(n) - 0.5;
            for (std::size_t col = 0; col < n; ++col) {
                double u = (static_cast<double>(col) + 0.5) / static_cast<double>(n) - 0.5;
                // rotate the pixel by -theta_i about the center of the square
                double ur = ca * u + sa * v + 0.5;
                double vr = -sa * u + ca * v + 0.5;
                if (vr > contour_value(contours.curves[i], ur)) mask.at(r, col) = 0.0;
            }
        }
    }
    return mask;
}

struct GeoImageParams {
    std::size_t n = 128;
    double alpha = 2.0;
    double c_bg = 0.0;         // <= 0 means: take the registry default for alpha
    double c_contour = 0.0;    // <= 0 means: take the registry default for alpha
    double contour_amp = 0.0;  // <= 0 means: take the registry default for alpha
    double gap_lo = 0.4;
    double gap_hi = 0.6;
    int supersample = 4;
    int fwt_levels = 2;
    bool constant_regions = false;  // constant background/foreground (decay experiments)
    std::uint64_t seed = 0;

    void validate() const {
        if (n < 8) throw std::invalid_argument("GeoImageParams: n too small");
        if (alpha < 1.0 || alpha > 2.0) throw std::invalid_argument("GeoImageParams: alpha must be in [1,2]");
        if (gap_lo > gap_hi || gap_lo <= 0.0 || gap_hi >= 2.0)
            throw std::invalid_argument("GeoImageParams: gap range must sit inside (0,2)");
        if (supersample != (1 << fwt_levels))
            throw std::invalid_argument("GeoImageParams: supersample must equal 2^fwt_levels");
    }
};

namespace detail {

// Regularization constants calibrated once against the published per-alpha
// contour statistics and then frozen; log-interpolated between grid points.
// amp is the contour wiggle amplitude around the base height.
struct GeoCalibration {
    double alpha, c_bg, c_contour, amp;
};

inline const std::array<GeoCalibration, 4>& geo_calibration_table() {
    static const std::array<GeoCalibration, 4> table = {{
        {1.0, 2.0, 250.0, 0.04},
        {1.2, 2.0, 250.0, 0.04},
        {1.5, 15.0, 45.0, 0.04},
        {2.0, 3.0, 3.0, 0.04},
    }};
    return table;
}

enum class GeoKnob { CBg, CContour, Amp };

inline double interp_calibration(double alpha, GeoKnob knob) {
    const auto& tab = geo_calibration_table();
    auto value = [&](const GeoCalibration& e) {
        switch (knob) {
            case GeoKnob::CBg: return e.c_bg;
            case GeoKnob::CContour: return e.c_contour;
            default: return e.amp;
        }
    };
    if (alpha <= tab.front().alpha) return value(tab.front());
    if (alpha >= tab.back().alpha) return value(tab.back());
    for (std::size_t i = 0; i + 1 < tab.size(); ++i) {
        if (alpha <= tab[i + 1].alpha) {
            double t = (alpha - tab[i].alpha) / (tab[i + 1].alpha - tab[i].alpha);
            return std::exp((1.0 - t) * std::log(value(tab[i])) + t * std::log(value(tab[i + 1])));
        }
    }
    return value(tab.back());
}

}  // namespace detail

inline GeoImageParams default_geo_params(double alpha, std::size_t n = 128, std::uint64_t seed = 0) {
    GeoImageParams p;
    p.alpha = alpha;
    p.n = n;
    p.seed = seed;
    p.c_bg = detail::interp_calibration(alpha, detail::GeoKnob::CBg);
    p.c_contour = detail::interp_calibration(alpha, detail::GeoKnob::CContour);
    p.contour_amp = detail::interp_calibration(alpha, detail::GeoKnob::Amp);
    p.validate();
    return p;
}

struct GeoSampleMeta {
    ContourSet contours;
    double alpha = 0.0;
    double gap = 0.0;
    std::size_t n = 0;  // output side
};

// Base height of the contour graphs. Three half-planes bounded at this height
// and rotated roughly 120 degrees apart intersect in a central triangle whose
// perimeter matches the published mean contour length.
inline constexpr double kContourHeight = 0.661;

/// Sample one geometric image: background plus masked foreground at the
/// supersampled resolution, foreground/background separation rescaled into
/// the gap range, amplitudes normalized to [-1,1], then reduced to n by the
/// approximation band of a 2-level orthogonal FWT.
inline GridImage sample_geometric_image(const GeoImageParams& params_in, GeoSampleMeta* meta = nullptr) {
    GeoImageParams params = params_in;
    if (params.c_bg <= 0.0) params.c_bg = detail::interp_calibration(params.alpha, detail::GeoKnob::CBg);
    if (params.c_contour <= 0.0)
        params.c_contour = detail::interp_calibration(params.alpha, detail::GeoKnob::CContour);
    if (params.contour_amp <= 0.0)
        params.contour_amp = detail::interp_calibration(params.alpha, detail::GeoKnob::Amp);
    params.validate();

    std::size_t m = params.n * static_cast<std::size_t>(params.supersample);
    Rng angle_rng(derive_seed(params.seed, 1));
    ContourSet contours;
    for (int i = 0; i < 3; ++i) {
        double lo = (1.0 + 3.0 * i) * 2.0 * std::numbers::pi / 9.0;
        double hi = (2.0 + 3.0 * i) * 2.0 * std::numbers::pi / 9.0;
        contours.angles[i] = angle_rng.uniform(lo, hi);
        auto curve = sample_uniform_field_1d(m, params.alpha, params.c_contour, derive_seed(params.seed, 2, i));
        // center the raw field and scale its peak deviation to the wiggle
        // amplitude, placing the graph around the base height
        double mean = 0.0;
        for (double v : curve) mean += v;
        mean /= static_cast<double>(m);
        double peak = 0.0;
        for (double v : curve) peak = std::max(peak, std::abs(v - mean));
        if (peak <= 0.0) peak = 1.0;
        for (double& v : curve) v = kContourHeight + params.contour_amp * (v - mean) / peak;
        contours.curves[i] = std::move(curve);
    }

    GridImage mask = build_foreground_mask(contours, m);
    std::size_t fg = 0;
    for (double v : mask.v) fg += (v > 0.5);
    if (fg == 0 || fg == mask.size()) throw std::runtime_error("sample_geometric_image: degenerate mask");

    double target_gap = Rng(derive_seed(params.seed, 3)).uniform(params.gap_lo, params.gap_hi);

    GridImage out_fine(m);
    double realized_gap = 0.0;
    if (params.constant_regions) {
        // constant regions: the image is the mask at the gap amplitude and no
        // further normalization applies
        for (std::size_t i = 0; i < out_fine.size(); ++i) out_fine.v[i] = mask.v[i] * target_gap;
        realized_gap = target_gap;
    } else {
        GridImage bg = sample_uniform_field_2d(m, params.alpha, params.c_bg, derive_seed(params.seed, 4));
        GridImage fgf = sample_uniform_field_2d(m, params.alpha, params.c_bg, derive_seed(params.seed, 5));

        double sum_in_b = 0.0, sum_out_b = 0.0, sum_in_f = 0.0;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (mask.v[i] > 0.5) {
                sum_in_b += bg.v[i];
                sum_in_f += fgf.v[i];
            } else {
                sum_out_b += bg.v[i];
            }
        }
        double nin = static_cast<double>(fg), nout = static_cast<double>(mask.size() - fg);
        // mean separation before the shift delta is applied to the foreground
        double diff0 = (sum_in_b + sum_in_f) / nin - sum_out_b / nout;

        auto amplitude = [&](double delta, double& mn, double& mx) {
            mn = 1e300;
            mx = -1e300;
            for (std::size_t i = 0; i < mask.size(); ++i) {
                double v = bg.v[i] + mask.v[i] * (fgf.v[i] + delta);
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            return mx - mn;
        };

        // fixed point for the foreground shift: the normalized gap
        // 2 (diff0 + delta) / amplitude(delta) must equal the target; the map
        // is a contraction since |d amplitude / d delta| <= 1 and target < 1
        double delta = 0.0, mn = 0.0, mx = 0.0;
        for (int it = 0; it < 200; ++it) {
            double amp = amplitude(delta, mn, mx);
            if (std::abs(2.0 * (diff0 + delta) / amp - target_gap) < 1e-12) break;
            delta = target_gap * amp / 2.0 - diff0;
        }
        double amp = amplitude(delta, mn, mx);
        realized_gap = 2.0 * (diff0 + delta) / amp;
        if (std::abs(realized_gap - target_gap) > 1e-9)
            throw std::runtime_error("sample_geometric_image: gap adjustment failed to converge");
        for (std::size_t i = 0; i < mask.size(); ++i) {
            double v = bg.v[i] + mask.v[i] * (fgf.v[i] + delta);
            out_fine.v[i] = 2.0 * (v - mn) / amp - 1.0;
        }
    }
    if (realized_gap < params.gap_lo - 1e-12 || realized_gap > params.gap_hi + 1e-12)
        throw std::runtime_error("sample_geometric_image: realized gap out of range");

    // anti-aliased reduction: approximation band of the orthogonal FWT,
    // rescaled back to image amplitude (each level scales averages by 2)
    FwtPyramid pyr = fwt_forward(out_fine, ortho_filter_spec("sym4"), params.fwt_levels);
    GridImage out = pyr.ll;
    double scale = 1.0 / static_cast<double>(params.supersample);
    for (auto& v : out.v) v *= scale;
    if (!params.constant_regions)
        for (auto& v : out.v) v = std::min(1.0, std::max(-1.0, v));

    if (meta) {
        meta->contours = std::move(contours);
        meta->alpha = params.alpha;
        meta->gap = realized_gap;
        meta->n = params.n;
    }
    return out;
}

struct GeoStats {
    double contour_length = 0.0;
    double contour_lipschitz = 0.0;
    double region_lipschitz = 0.0;
};

/// Statistics of a generated sample: arc length of the visible parts of the
/// contours, the maximal Holder-alpha divided difference along the contours,
/// and the maximal divided difference of the image inside uniform regions.
inline GeoStats estimate_stats(const GridImage& image, const GeoSampleMeta& meta) {
    if (meta.contours.curves[0].empty()) throw std::invalid_argument("estimate_stats: metadata missing");
    GeoStats stats;

    // visible contour length: walk each rotated graph and accumulate segments
    // whose endpoints lie inside the unit square and inside the other two
    // half-planes
    // statistics are taken at the working resolution of the output image:
    // stride over the supersampled curve samples
    std::size_t stride = 1;
    if (meta.n > 0 && meta.contours.curves[0].size() >= meta.n)
        stride = meta.contours.curves[0].size() / meta.n;

    for (int i = 0; i < 3; ++i) {
        const auto& curve = meta.contours.curves[i];
        std::size_t m = curve.size();
        double ca = std::cos(meta.contours.angles[i]), sa = std::sin(meta.contours.angles[i]);
        auto point = [&](std::size_t t, double& px, double& py) {
            double x = (static_cast<double>(t) + 0.5) / static_cast<double>(m) - 0.5;
            double y = curve[t] - 0.5;
            px = ca * x - sa * y + 0.5;
            py = sa * x + ca * y + 0.5;
        };
        auto visible = [&](double px, double py) {
            if (px < 0.0 || px > 1.0 || py < 0.0 || py > 1.0) return false;
            for (int jc = 0; jc < 3; ++jc) {
                if (jc == i) continue;
                double cj = std::cos(meta.contours.angles[jc]), sj = std::sin(meta.contours.angles[jc]);
                double u = px - 0.5, v = py - 0.5;
                double ur = cj * u + sj * v + 0.5;
                double vr = -sj * u + cj * v + 0.5;
                if (vr > contour_value(meta.contours.curves[jc], ur)) return false;
            }
            return true;
        };
        double x0, y0, x1, y1;
        point(0, x0, y0);
        bool vis0 = visible(x0, y0);
        for (std::size_t t = stride; t < m; t += stride) {
            point(t, x1, y1);
            bool vis1 = visible(x1, y1);
            if (vis0 && vis1) stats.contour_length += std::hypot(x1 - x0, y1 - y0);
            x0 = x1;
            y0 = y1;
            vis0 = vis1;
        }
    }

    // Holder-alpha divided differences of the contour graphs: first order for
    // alpha <= 1, second order (Zygmund form) for alpha in (1,2]
    for (int i = 0; i < 3; ++i) {
        const auto& curve = meta.contours.curves[i];
        std::size_t m = curve.size();
        double h = static_cast<double>(stride) / static_cast<double>(m);
        double denom_c = std::pow(h, meta.alpha);
        if (meta.alpha <= 1.0) {
            for (std::size_t t = stride; t < m; t += stride)
                stats.contour_lipschitz =
                    std::max(stats.contour_lipschitz, std::abs(curve[t] - curve[t - stride]) / denom_c);
        } else {
            for (std::size_t t = stride; t + stride < m; t += stride)
                stats.contour_lipschitz =
                    std::max(stats.contour_lipschitz,
                             std::abs(curve[t + stride] - 2.0 * curve[t] + curve[t - stride]) / denom_c);
        }
    }

    // divided differences of the image away from the mask boundary; the
    // anti-aliasing reduction smears the edge over a few pixels, so pixels
    // within a small margin of the boundary are excluded
    std::size_t n = image.n;
    GridImage mask = build_foreground_mask(meta.contours, n);
    const long margin = 6;
    GridImage interior(n);
    long ln = static_cast<long>(n);
    for (long r = 0; r < ln; ++r)
        for (long c = 0; c < ln; ++c) {
            double v = mask.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            bool uniform = true;
            for (long dr = -margin; dr <= margin && uniform; ++dr)
                for (long dc = -margin; dc <= margin; ++dc) {
                    long rr = r + dr, cc = c + dc;
                    if (rr < 0 || rr >= ln || cc < 0 || cc >= ln) continue;
                    if (mask.at(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)) != v) {
                        uniform = false;
                        break;
                    }
                }
            interior.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = uniform ? 1.0 : 0.0;
        }

    double h = 1.0 / static_cast<double>(n);
    double denom = std::pow(h, meta.alpha);
    auto probe = [&](std::size_t r, std::size_t c, std::size_t dr, std::size_t dc) {
        if (interior.at(r - dr, c - dc) == 0.0 || interior.at(r, c) == 0.0) return;
        if (meta.alpha <= 1.0) {
            stats.region_lipschitz =
                std::max(stats.region_lipschitz, std::abs(image.at(r, c) - image.at(r - dr, c - dc)) / denom);
        } else if (interior.at(r + dr, c + dc) != 0.0) {
            stats.region_lipschitz = std::max(
                stats.region_lipschitz,
                std::abs(image.at(r + dr, c + dc) - 2.0 * image.at(r, c) + image.at(r - dr, c - dc)) / denom);
        }
    };
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 1; c + 1 < n; ++c) probe(r, c, 0, 1);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 1; r + 1 < n; ++r) probe(r, c, 1, 0);
    return stats;
}

}  // namespace scatdn
