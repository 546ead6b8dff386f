// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "scatdn/core.hpp"

namespace scatdn {

inline constexpr double kPi = std::numbers::pi;

/// Mother wavelet parameters. sigma_env and xi are digital radian frequencies
/// at the finest bank scale; coarser scales sample the same profile at
/// dyadically dilated arguments.
struct MotherWaveletParams {
    double sigma_env = 0.7;
    std::array<double, 2> xi = {1.05 * kPi, 0.0};
    int vanishing_moments = 2;

    void validate() const {
        if (sigma_env <= 0.0) throw std::invalid_argument("MotherWaveletParams: sigma_env must be > 0");
        if (xi[0] == 0.0 && xi[1] == 0.0) throw std::invalid_argument("MotherWaveletParams: xi must be nonzero");
    }
};

inline constexpr int kLowpassOrientation = -1;

/// A frequency-domain filter of the bank: psi_hat at scale 2^j, orientation
/// k in {0..3}, or the low-pass (k = kLowpassOrientation).
struct SpectralFilter {
    ComplexField values;
    int scale_j = 0;
    int orientation = 0;
};

/// Angular mask in polar coordinates, nonzero on |phi| < pi/4. Zero at DC.
inline double mask_angular_profile(double phi) {
    if (!(std::abs(phi) < kPi / 4.0)) return 0.0;
    return std::sin(kPi * (1.0 + std::sin(4.0 * phi + kPi / 2.0)) / 4.0);
}

/// Oriented mask for the bank: the angular profile recentred on k*pi/4 with a
/// mod-pi covering, so the four orientations tile every direction and the
/// finest-scale energy that wraps past the Nyquist seam is retained.
inline double oriented_mask(double phi, int k) {
    double delta = std::remainder(phi - static_cast<double>(k) * kPi / 4.0, kPi);
    return mask_angular_profile(delta);
}

/// Literal mask mu(r, phi) evaluated per frequency bin (orientation 0, no
/// mod-pi folding). mu = 0 at the DC bin.
inline GridImage build_mask(const FreqGrid& grid) {
    GridImage out(grid.n);
    for (std::size_t r = 0; r < grid.n; ++r) {
        for (std::size_t c = 0; c < grid.n; ++c) {
            double w1 = grid.omega1(c), w2 = grid.omega2(r);
            if (w1 == 0.0 && w2 == 0.0) continue;
            out.at(r, c) = mask_angular_profile(std::atan2(w2, w1));
        }
    }
    return out;
}

namespace detail {

/// Unperiodized corrected Morlet spectrum: a Gaussian bump at xi minus a
/// Gaussian and its first derivatives at DC, with constants chosen so that
/// the periodized discrete filter has psi_hat(0) = 0 and vanishing central
/// finite differences at DC (two vanishing moments on the grid).
struct MorletSpectrum {
    double sigma;
    std::array<double, 2> xi;
    double k_c = 0.0, k_1 = 0.0, k_2 = 0.0;

    double gauss(double x1, double x2) const {
        return std::exp(-0.5 * sigma * sigma * (x1 * x1 + x2 * x2));
    }
    double operator()(double x1, double x2) const {
        double g = gauss(x1, x2);
        double s2 = sigma * sigma;
        return gauss(x1 - xi[0], x2 - xi[1]) - k_c * g + k_1 * s2 * x1 * g + k_2 * s2 * x2 * g;
    }
};

inline constexpr int kAliasRange = 2;

/// Sum of fn over the 2*pi*scale alias lattice around (x1, x2).
template <typename F>
double alias_sum(F&& fn, double x1, double x2, double lattice) {
    double s = 0.0;
    for (int a = -kAliasRange; a <= kAliasRange; ++a)
        for (int b = -kAliasRange; b <= kAliasRange; ++b)
            s += fn(x1 + lattice * a, x2 + lattice * b);
    return s;
}

inline void solve_moment_corrections(MorletSpectrum& m, double lattice, double h) {
    auto g = [&](double x, double y) { return m.gauss(x, y); };
    auto gb = [&](double x, double y) { return m.gauss(x - m.xi[0], y - m.xi[1]); };
    double s2 = m.sigma * m.sigma;
    auto g1 = [&](double x, double y) { return -s2 * x * m.gauss(x, y); };
    auto g2 = [&](double x, double y) { return -s2 * y * m.gauss(x, y); };

    // Conditions: P(0)=0, P(h,0)=P(-h,0), P(0,h)=P(0,-h) on the periodized grid.
    std::array<std::array<double, 3>, 3> A{};
    std::array<double, 3> rhs{};
    auto fill = [&](int row, double xa, double ya, double xb, double yb, double sgn) {
        A[row][0] = alias_sum(g, xa, ya, lattice) - sgn * alias_sum(g, xb, yb, lattice);
        A[row][1] = alias_sum(g1, xa, ya, lattice) - sgn * alias_sum(g1, xb, yb, lattice);
        A[row][2] = alias_sum(g2, xa, ya, lattice) - sgn * alias_sum(g2, xb, yb, lattice);
        rhs[row] = alias_sum(gb, xa, ya, lattice) - sgn * alias_sum(gb, xb, yb, lattice);
    };
    fill(0, 0.0, 0.0, 0.0, 0.0, 0.0);
    fill(1, h, 0.0, -h, 0.0, 1.0);
    fill(2, 0.0, h, 0.0, -h, 1.0);

    double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                 A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                 A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
    if (std::abs(det) < 1e-300) throw std::runtime_error("morlet correction: singular 3x3 solve");
    auto cram = [&](int col) {
        std::array<std::array<double, 3>, 3> B = A;
        for (int r = 0; r < 3; ++r) B[r][col] = rhs[r];
        return (B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
                B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
                B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0])) / det;
    };
    m.k_c = cram(0);
    m.k_1 = cram(1);
    m.k_2 = cram(2);
}

}  // namespace detail

/// Frequency-domain Morlet at scale j (pre-mask). dilation_pow = j - j_m >= 0;
/// the filter is evaluated at 2^{dilation_pow}-dilated digital frequencies and
/// periodized over the matching alias lattice before the correction solve.
inline ComplexField build_morlet_hat(const FreqGrid& grid, const MotherWaveletParams& params, int dilation_pow) {
    params.validate();
    if (grid.n < 8) throw std::invalid_argument("build_morlet_hat: grid too small for the correction solve");
    double scale = std::ldexp(1.0, dilation_pow);
    double lattice = 2.0 * kPi * scale;
    double h = scale * 2.0 * kPi / static_cast<double>(grid.n);

    detail::MorletSpectrum m{params.sigma_env, params.xi};
    detail::solve_moment_corrections(m, lattice, h);

    ComplexField out(grid.n);
    for (std::size_t r = 0; r < grid.n; ++r) {
        for (std::size_t c = 0; c < grid.n; ++c) {
            double x1 = scale * grid.digital1(c);
            double x2 = scale * grid.digital2(r);
            out.at(r, c) = detail::alias_sum(m, x1, x2, lattice);
        }
    }
    return out;
}

/// Rotated, dilated, masked directional filter bank with a Gaussian low-pass.
struct WaveletBank {
    std::size_t n = 0;
    int j_m = 0, j_M = 0;
    MotherWaveletParams mother;
    std::vector<SpectralFilter> filters;  // ordered by scale (fine to coarse), then orientation
    SpectralFilter lowpass;

    int num_scales() const { return j_M - j_m + 1; }

    const SpectralFilter& filter(int j, int k) const {
        std::size_t idx = static_cast<std::size_t>(j - j_m) * 4 + static_cast<std::size_t>(k);
        if (j < j_m || j > j_M || k < 0 || k > 3) throw std::out_of_range("WaveletBank::filter: bad (j,k)");
        return filters[idx];
    }
};

/// Low-pass spectral width multiplier. Calibrated once so the default bank's
/// Littlewood-Paley lower bound stays above 0.2 (see check_littlewood_paley
/// regression fixtures).
inline constexpr double kLowpassWidth = 0.7;

inline WaveletBank build_bank(std::size_t N, int j_m, int j_M, const MotherWaveletParams& params = {}) {
    params.validate();
    if (!(j_m <= j_M && j_M <= 0)) throw std::invalid_argument("build_bank: need j_m <= j_M <= 0");
    if (std::ldexp(1.0, -j_m) > static_cast<double>(N)) throw std::invalid_argument("build_bank: 2^{-j_m} must be <= N");
    FreqGrid grid(N);

    WaveletBank bank;
    bank.n = N;
    bank.j_m = j_m;
    bank.j_M = j_M;
    bank.mother = params;

    for (int j = j_m; j <= j_M; ++j) {
        int dil = j - j_m;
        double scale = std::ldexp(1.0, dil);
        double lattice = 2.0 * kPi * scale;
        double h = scale * 2.0 * kPi / static_cast<double>(N);
        detail::MorletSpectrum m{params.sigma_env, params.xi};
        detail::solve_moment_corrections(m, lattice, h);

        for (int k = 0; k < 4; ++k) {
            double ang = -static_cast<double>(k) * kPi / 4.0;
            double ca = std::cos(ang), sa = std::sin(ang);
            SpectralFilter f;
            f.values = ComplexField(N);
            f.scale_j = j;
            f.orientation = k;
            for (std::size_t r = 0; r < N; ++r) {
                for (std::size_t c = 0; c < N; ++c) {
                    double d1 = grid.digital1(c), d2 = grid.digital2(r);
                    if (d1 == 0.0 && d2 == 0.0) continue;  // mu(0, .) = 0
                    double mk = oriented_mask(std::atan2(d2, d1), k);
                    if (mk == 0.0) continue;
                    // Periodize over the nu-lattice, rotating each alias so the
                    // result stays 2*pi-periodic in digital frequency.
                    double s = 0.0;
                    for (int a = -detail::kAliasRange; a <= detail::kAliasRange; ++a) {
                        for (int b = -detail::kAliasRange; b <= detail::kAliasRange; ++b) {
                            double x1 = scale * (d1 + 2.0 * kPi * a);
                            double x2 = scale * (d2 + 2.0 * kPi * b);
                            s += m(ca * x1 - sa * x2, sa * x1 + ca * x2);
                        }
                    }
                    f.values.at(r, c) = s * mk;
                }
            }
            bank.filters.push_back(std::move(f));
        }
    }

    // L1 normalization: every wavelet's discrete spatial l1 norm is set to 1,
    // so the 2^{-j} energy weights compare like-for-like across scales.
    for (auto& f : bank.filters) {
        double nrm = filter_l1(f.values);
        for (auto& z : f.values.v) z /= nrm;
    }

    // Isotropic Gaussian low-pass at the coarsest scale; phi_hat(0) = 1.
    bank.lowpass.values = ComplexField(N);
    bank.lowpass.scale_j = j_M;
    bank.lowpass.orientation = kLowpassOrientation;
    double lp_scale = kLowpassWidth * std::ldexp(1.0, j_M - j_m);
    for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t c = 0; c < N; ++c) {
            double d1 = grid.digital1(c), d2 = grid.digital2(r);
            double a = lp_scale * lp_scale * (d1 * d1 + d2 * d2);
            bank.lowpass.values.at(r, c) = std::exp(-0.5 * a);
        }
    }
    return bank;
}

/// Littlewood-Paley bounds: min and max over nonzero bins of
/// |phi_hat|^2 + (1/2) sum_{j,k} (|psi_hat(nu)|^2 + |psi_hat(-nu)|^2).
/// The Hermitian completion accounts for the analytic (one-sided) wavelets
/// acting on real images.
inline std::pair<double, double> check_littlewood_paley(const WaveletBank& bank) {
    std::size_t N = bank.n;
    std::vector<double> s(N * N, 0.0);
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < N; ++c) s[r * N + c] = std::norm(bank.lowpass.values.at(r, c));
    for (const auto& f : bank.filters) {
        for (std::size_t r = 0; r < N; ++r) {
            for (std::size_t c = 0; c < N; ++c) {
                std::size_t rn = (N - r) % N, cn = (N - c) % N;
                s[r * N + c] += 0.5 * (std::norm(f.values.at(r, c)) + std::norm(f.values.at(rn, cn)));
            }
        }
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t c = 0; c < N; ++c) {
            if (r == 0 && c == 0) continue;
            lo = std::min(lo, s[r * N + c]);
            hi = std::max(hi, s[r * N + c]);
        }
    }
    return {lo, hi};
}

struct MomentReport {
    int scale_j = 0;
    int orientation = 0;
    double dc_abs = 0.0;        // |psi_hat(0)|
    double dc_grad = 0.0;       // central finite-difference gradient magnitude at DC
    double cone_axis_max = 0.0; // max |psi_hat| on the rotated axes of the vanishing cone
};

/// Per-filter vanishing-moment diagnostics. cone_axis_max samples the axis
/// {r_{-theta} omega : omega_1 = 0} for theta across the filter's cone.
inline std::vector<MomentReport> check_vanishing_moments(const WaveletBank& bank, int theta_samples = 9) {
    std::vector<MomentReport> out;
    std::size_t N = bank.n;
    for (const auto& f : bank.filters) {
        MomentReport rep;
        rep.scale_j = f.scale_j;
        rep.orientation = f.orientation;
        rep.dc_abs = std::abs(f.values.at(0, 0));
        double gx = std::abs(f.values.at(0, 1) - f.values.at(0, N - 1)) / 2.0;
        double gy = std::abs(f.values.at(1, 0) - f.values.at(N - 1, 0)) / 2.0;
        rep.dc_grad = std::hypot(gx, gy);

        double center = static_cast<double>(f.orientation) * kPi / 4.0;
        for (int t = 0; t < theta_samples; ++t) {
            double theta = center - kPi / 4.0 + kPi / 2.0 * t / std::max(1, theta_samples - 1);
            // axis direction perpendicular to theta
            double ax = -std::sin(theta), ay = std::cos(theta);
            for (std::size_t step = 1; step < N / 2; ++step) {
                double b1 = ax * static_cast<double>(step), b2 = ay * static_cast<double>(step);
                long c = std::lround(b1), r = std::lround(b2);
                auto wrap = [N](long x) { return static_cast<std::size_t>(((x % static_cast<long>(N)) + static_cast<long>(N)) % static_cast<long>(N)); };
                for (long sgn : {1L, -1L}) {
                    double v = std::abs(f.values.at(wrap(sgn * r), wrap(sgn * c)));
                    rep.cone_axis_max = std::max(rep.cone_axis_max, v);
                }
            }
        }
        out.push_back(rep);
    }
    return out;
}

}  // namespace scatdn
