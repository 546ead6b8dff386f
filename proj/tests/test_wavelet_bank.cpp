// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "scatdn/core.hpp"
#include "scatdn/wavelet_bank.hpp"

using namespace scatdn;

namespace {

std::size_t wrap_idx(long x, std::size_t n) {
    long m = static_cast<long>(n);
    return static_cast<std::size_t>(((x % m) + m) % m);
}

// Independent closed-form evaluation of the corrected Morlet spectrum over
// the grid, used as the oracle for build_morlet_hat's argmax.
ComplexField morlet_oracle(std::size_t N) {
    MotherWaveletParams p;
    double s2 = p.sigma_env * p.sigma_env;
    auto gauss = [&](double x, double y) { return std::exp(-0.5 * s2 * (x * x + y * y)); };
    // solve the 3 conditions by brute force over the same alias lattice
    double L = 2.0 * kPi, h = 2.0 * kPi / static_cast<double>(N);
    auto alias = [&](auto&& f, double x, double y) {
        double s = 0.0;
        for (int a = -2; a <= 2; ++a)
            for (int b = -2; b <= 2; ++b) s += f(x + L * a, y + L * b);
        return s;
    };
    auto bump = [&](double x, double y) { return gauss(x - p.xi[0], y - p.xi[1]); };
    auto g1 = [&](double x, double y) { return -s2 * x * gauss(x, y); };
    auto g2 = [&](double x, double y) { return -s2 * y * gauss(x, y); };
    // P(0)=0 with G1(0)=G2(0)=0 by lattice symmetry -> kc = B(0)/G(0)
    double kc = alias(bump, 0, 0) / alias(gauss, 0, 0);
    // odd conditions decouple: k1 from x-diff, k2 from y-diff
    double k1 = (alias(bump, h, 0) - alias(bump, -h, 0)) / (alias(g1, h, 0) - alias(g1, -h, 0));
    double k2 = (alias(bump, 0, h) - alias(bump, 0, -h)) / (alias(g2, 0, h) - alias(g2, 0, -h));

    ComplexField out(N);
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < N; ++c) {
            double x = 2.0 * kPi * static_cast<double>(signed_index(c, N)) / static_cast<double>(N);
            double y = 2.0 * kPi * static_cast<double>(signed_index(r, N)) / static_cast<double>(N);
            auto f = [&](double u, double v) { return bump(u, v) - kc * gauss(u, v) - k1 * g1(u, v) - k2 * g2(u, v); };
            out.at(r, c) = alias(f, x, y);
        }
    return out;
}

std::pair<std::size_t, std::size_t> argmax_bin(const ComplexField& f) {
    std::size_t br = 0, bc = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < f.n; ++r)
        for (std::size_t c = 0; c < f.n; ++c)
            if (std::abs(f.at(r, c)) > best) { best = std::abs(f.at(r, c)); br = r; bc = c; }
    return {br, bc};
}

}  // namespace

TEST_CASE("mask formula values") {
    FreqGrid grid(32);
    auto mask = build_mask(grid);
    REQUIRE(mask.at(0, 0) == 0.0);                       // DC
    REQUIRE(mask.at(0, 5) == Catch::Approx(1.0));        // phi = 0, r > 0
    REQUIRE(mask.at(7, 7) == Catch::Approx(0.0).margin(1e-12));  // phi = pi/4 boundary
    REQUIRE(mask.at(5, 0) == Catch::Approx(0.0).margin(1e-12));  // phi = pi/2, outside cone
}

TEST_CASE("oriented masks tile every direction: sum of squares is 1") {
    std::size_t N = 64;
    for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t c = 0; c < N; ++c) {
            if (r == 0 && c == 0) continue;
            double phi = std::atan2(static_cast<double>(signed_index(r, N)),
                                    static_cast<double>(signed_index(c, N)));
            double s = 0.0;
            for (int k = 0; k < 4; ++k) {
                double m = oriented_mask(phi, k);
                s += m * m;
            }
            REQUIRE(s == Catch::Approx(1.0).margin(1e-10));
        }
    }
}

TEST_CASE("morlet spectrum: vanishing moments on the grid") {
    FreqGrid grid(64);
    auto m = build_morlet_hat(grid, MotherWaveletParams{}, 0);
    REQUIRE(std::abs(m.at(0, 0)) < 1e-12);
    REQUIRE(std::abs(m.at(0, 1) - m.at(0, 63)) / 2.0 < 1e-12);
    REQUIRE(std::abs(m.at(1, 0) - m.at(63, 0)) / 2.0 < 1e-12);
    REQUIRE_THROWS(build_morlet_hat(FreqGrid(4), MotherWaveletParams{}, 0));
}

TEST_CASE("morlet argmax matches the closed-form oracle near the aliased xi") {
    std::size_t N = 64;
    FreqGrid grid(N);
    auto m = build_morlet_hat(grid, MotherWaveletParams{}, 0);
    auto oracle = morlet_oracle(N);
    for (std::size_t i = 0; i < m.size(); ++i) REQUIRE(std::abs(m.v[i] - oracle.v[i]) < 1e-10);

    auto [br, bc] = argmax_bin(m);
    auto [orr, oc] = argmax_bin(oracle);
    REQUIRE(br == orr);
    REQUIRE(bc == oc);
    // aliased image of xi_1 = 1.05*pi is -0.95*pi, i.e. signed index -30.4
    REQUIRE(br == 0);
    REQUIRE(std::abs(signed_index(bc, N) - (-30)) <= 2);
}

TEST_CASE("bank shape, low-pass, and l1 normalization") {
    auto bank = build_bank(128, -7, -5);
    REQUIRE(bank.filters.size() + 1 == 13);
    REQUIRE(bank.lowpass.values.at(0, 0).real() == Catch::Approx(1.0));
    REQUIRE(bank.lowpass.values.at(0, 0).imag() == 0.0);
    for (const auto& f : bank.lowpass.values.v) {
        REQUIRE(f.imag() == 0.0);
        REQUIRE(f.real() >= 0.0);
    }
    // every wavelet's discrete spatial l1 is 1 (scale-independent within 2%)
    for (const auto& f : bank.filters) REQUIRE(filter_l1(f.values) == Catch::Approx(1.0).margin(1e-9));
    REQUIRE_THROWS(build_bank(64, -3, -4));
    REQUIRE_THROWS(build_bank(64, -8, -5));
}

TEST_CASE("vanishing moments hold for every bank filter") {
    auto bank = build_bank(64, -6, -4);
    auto reps = check_vanishing_moments(bank);
    REQUIRE(reps.size() == 12);
    for (const auto& rep : reps) {
        REQUIRE(rep.dc_abs < 1e-12);
        REQUIRE(rep.dc_grad < 1e-12);
        REQUIRE(rep.cone_axis_max < 1e-12);
    }
    // k=0 filter vanishes identically on the phi = pi/2 axis
    const auto& f0 = bank.filter(-6, 0).values;
    for (std::size_t r = 1; r < 64; ++r) REQUIRE(std::abs(f0.at(r, 0)) == 0.0);
}

TEST_CASE("rotation consistency") {
    std::size_t N = 64;
    auto bank = build_bank(N, -6, -4);
    for (int j = -6; j <= -4; ++j) {
        const auto& f0 = bank.filter(j, 0).values;
        const auto& f2 = bank.filter(j, 2).values;
        double dev2 = 0.0;
        for (std::size_t r = 0; r < N; ++r)
            for (std::size_t c = 0; c < N; ++c) {
                long v1 = signed_index(c, N), v2 = signed_index(r, N);
                long rc = v2, rr = -v1;  // rotate bin by -pi/2
                if (rc < -(long)N / 2 || rc >= (long)N / 2 || rr < -(long)N / 2 || rr >= (long)N / 2) continue;
                dev2 = std::max(dev2, std::abs(f2.at(r, c) - f0.at(wrap_idx(rr, N), wrap_idx(rc, N))));
            }
        REQUIRE(dev2 < 1e-12);
    }
    // nearest-bin 45-degree rotation tolerance, recorded per N=64:
    // finest scale is seam-wrap limited (0.70), coarser scales interpolation
    // limited (0.10)
    for (int j = -6; j <= -4; ++j) {
        const auto& f0 = bank.filter(j, 0).values;
        const auto& f1 = bank.filter(j, 1).values;
        double dev = 0.0;
        double c45 = std::cos(-kPi / 4), s45 = std::sin(-kPi / 4);
        for (std::size_t r = 0; r < N; ++r)
            for (std::size_t c = 0; c < N; ++c) {
                double v1 = static_cast<double>(signed_index(c, N)), v2 = static_cast<double>(signed_index(r, N));
                long n1 = std::lround(c45 * v1 - s45 * v2), n2 = std::lround(s45 * v1 + c45 * v2);
                if (n1 < -(long)N / 2 || n1 >= (long)N / 2 || n2 < -(long)N / 2 || n2 >= (long)N / 2) continue;
                dev = std::max(dev, std::abs(f1.at(r, c) - f0.at(wrap_idx(n2, N), wrap_idx(n1, N))));
            }
        REQUIRE(dev < (j == -6 ? 0.70 : 0.10));
    }
}

TEST_CASE("dilation consistency across the coarser scale pair") {
    std::size_t N = 64;
    auto bank = build_bank(N, -6, -4);
    for (int k = 0; k < 4; ++k) {
        const auto& fine = bank.filter(-5, k).values;
        const auto& coarse = bank.filter(-4, k).values;
        double dev = 0.0, rel = 0.0;
        for (std::size_t r = 0; r < N; ++r)
            for (std::size_t c = 0; c < N; ++c) {
                long v1 = signed_index(c, N), v2 = signed_index(r, N);
                if (std::abs(v1) >= (long)N / 4 || std::abs(v2) >= (long)N / 4) continue;
                double vc = std::abs(coarse.at(r, c));
                double vf = std::abs(fine.at(wrap_idx(2 * v2, N), wrap_idx(2 * v1, N)));
                dev = std::max(dev, std::abs(vc - vf));
                if (vc > 0.1) rel = std::max(rel, std::abs(vc - vf) / vc);
            }
        REQUIRE(dev < 0.08);
        REQUIRE(rel < 0.03);
    }
}

TEST_CASE("Littlewood-Paley bounds: frozen fixtures and synthetic cases") {
    {
        auto bank = build_bank(64, -6, -4);
        auto [lo, hi] = check_littlewood_paley(bank);
        REQUIRE(lo > 0.0);
        REQUIRE(lo == Catch::Approx(0.011029).margin(1e-4));
        REQUIRE(hi == Catch::Approx(0.927370).margin(1e-4));
    }
    {
        auto bank = build_bank(128, -7, -5);
        auto [lo, hi] = check_littlewood_paley(bank);
        REQUIRE(lo > 0.0);
        REQUIRE(lo == Catch::Approx(0.007701).margin(1e-4));
        REQUIRE(hi == Catch::Approx(0.981295).margin(1e-4));
        REQUIRE(hi < 1.8);
    }
    {
        // all directional filters zeroed: lower collapses to min |phi_hat|^2
        auto bank = build_bank(32, -5, -4);
        for (auto& f : bank.filters)
            for (auto& z : f.values.v) z = 0.0;
        double lpmin = 1e300;
        for (std::size_t r = 0; r < 32; ++r)
            for (std::size_t c = 0; c < 32; ++c)
                if (r || c) lpmin = std::min(lpmin, std::norm(bank.lowpass.values.at(r, c)));
        auto [lo, hi] = check_littlewood_paley(bank);
        REQUIRE(lo == Catch::Approx(lpmin).margin(1e-12));
    }
    {
        // bank artificially normalized to a tight frame reports (1, 1)
        auto bank = build_bank(32, -5, -4);
        std::size_t N = 32;
        std::vector<double> s(N * N, 0.0);
        for (std::size_t r = 0; r < N; ++r)
            for (std::size_t c = 0; c < N; ++c) s[r * N + c] = std::norm(bank.lowpass.values.at(r, c));
        for (const auto& f : bank.filters)
            for (std::size_t r = 0; r < N; ++r)
                for (std::size_t c = 0; c < N; ++c) {
                    std::size_t rn = (N - r) % N, cn = (N - c) % N;
                    s[r * N + c] += 0.5 * (std::norm(f.values.at(r, c)) + std::norm(f.values.at(rn, cn)));
                }
        // divide by sqrt of the frame sum; keep DC untouched (excluded bin)
        auto scale_field = [&](ComplexField& f, bool hermitian) {
            for (std::size_t r = 0; r < N; ++r)
                for (std::size_t c = 0; c < N; ++c) {
                    if (r == 0 && c == 0) continue;
                    double denom;
                    if (hermitian) {
                        std::size_t rn = (N - r) % N, cn = (N - c) % N;
                        denom = std::sqrt(0.5 * (s[r * N + c] + s[rn * N + cn]));
                    } else {
                        denom = std::sqrt(s[r * N + c]);
                    }
                    f.at(r, c) /= denom;
                }
        };
        scale_field(bank.lowpass.values, false);
        // directional filters enter through the Hermitian-symmetrized sum; the
        // frame sum is already symmetric, so plain division works
        for (auto& f : bank.filters) scale_field(f.values, false);
        bank.lowpass.values.at(0, 0) = 1.0;
        auto [lo, hi] = check_littlewood_paley(bank);
        REQUIRE(lo == Catch::Approx(1.0).margin(1e-9));
        REQUIRE(hi == Catch::Approx(1.0).margin(1e-9));
    }
}
