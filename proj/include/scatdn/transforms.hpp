// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "scatdn/core.hpp"
#include "scatdn/wavelet_bank.hpp"

namespace scatdn {

/// Circular convolution computed spectrally: IDFT(DFT(image) . filter_hat).
inline ComplexField spectral_conv(const ComplexField& image_hat, const ComplexField& filter_hat) {
    if (image_hat.n != filter_hat.n) throw std::invalid_argument("spectral_conv: size mismatch");
    ComplexField prod(image_hat.n);
    for (std::size_t i = 0; i < prod.size(); ++i) prod.v[i] = image_hat.v[i] * filter_hat.v[i];
    return idft(prod);
}

/// Non-subsampled dyadic wavelet transform output: one complex field per bank
/// filter plus the low-pass field. detail(j, k) follows the bank's indexing.
struct WaveletCoeffs {
    std::size_t n = 0;
    int j_m = 0, j_M = 0;
    ComplexField low;
    std::vector<ComplexField> details;

    const ComplexField& detail(int j, int k) const {
        if (j < j_m || j > j_M || k < 0 || k > 3) throw std::out_of_range("WaveletCoeffs::detail: bad (j,k)");
        return details[static_cast<std::size_t>(j - j_m) * 4 + static_cast<std::size_t>(k)];
    }
};

inline WaveletCoeffs dwt_forward(const GridImage& image, const WaveletBank& bank) {
    if (image.n != bank.n) throw std::invalid_argument("dwt_forward: image/bank size mismatch");
    ComplexField hat = dft(image);
    WaveletCoeffs out;
    out.n = image.n;
    out.j_m = bank.j_m;
    out.j_M = bank.j_M;
    out.low = spectral_conv(hat, bank.lowpass.values);
    out.details.reserve(bank.filters.size());
    for (const auto& f : bank.filters) out.details.push_back(spectral_conv(hat, f.values));
    return out;
}

enum class RhoKind { Modulus, Rectifier };

/// Pointwise nonlinearity. Modulus mode: sqrt(|z|^2 + eps^2) - eps (real
/// output, exact modulus at eps = 0). Rectifier mode: ReLU applied to the
/// real and imaginary parts separately.
inline ComplexField apply_rho(const ComplexField& field, RhoKind rho, double eps = 0.0) {
    if (eps < 0.0) throw std::invalid_argument("apply_rho: eps must be >= 0");
    ComplexField out(field.n);
    if (rho == RhoKind::Modulus) {
        double e2 = eps * eps;
        for (std::size_t i = 0; i < field.size(); ++i)
            out.v[i] = std::sqrt(std::norm(field.v[i]) + e2) - eps;
    } else {
        for (std::size_t i = 0; i < field.size(); ++i)
            out.v[i] = {std::max(field.v[i].real(), 0.0), std::max(field.v[i].imag(), 0.0)};
    }
    return out;
}

/// Second-order scattering coefficients. first[(j,k)] = h * psi_j^k;
/// second[(j,k,j',k')] = rho(h * psi_j^k) * psi_j'^k', emitted for
/// j < j' <= min(j_M, jprime_max) only.
struct ScatteringCoeffs {
    std::size_t n = 0;
    int j_m = 0, j_M = 0, jprime_max = 0;
    RhoKind rho = RhoKind::Modulus;
    double epsilon = 0.0;
    std::vector<ComplexField> first;                 // bank filter order
    std::vector<std::vector<ComplexField>> second;   // per first channel, (j',k') row-major

    int jprime_hi() const { return std::min(j_M, jprime_max); }

    std::size_t first_index(int j, int k) const {
        if (j < j_m || j > j_M || k < 0 || k > 3) throw std::out_of_range("ScatteringCoeffs: bad (j,k)");
        return static_cast<std::size_t>(j - j_m) * 4 + static_cast<std::size_t>(k);
    }

    const ComplexField& first_field(int j, int k) const { return first[first_index(j, k)]; }

    const ComplexField& second_field(int j, int k, int jp, int kp) const {
        if (jp <= j || jp > jprime_hi() || kp < 0 || kp > 3)
            throw std::out_of_range("ScatteringCoeffs: bad (j',k')");
        std::size_t row = static_cast<std::size_t>(jp - (j + 1)) * 4 + static_cast<std::size_t>(kp);
        return second[first_index(j, k)][row];
    }
};

inline ScatteringCoeffs scattering_forward(const GridImage& image, const WaveletBank& bank,
                                           RhoKind rho = RhoKind::Modulus, double eps = 0.0,
                                           int jprime_max = 0) {
    if (image.n != bank.n) throw std::invalid_argument("scattering_forward: image/bank size mismatch");
    ScatteringCoeffs out;
    out.n = image.n;
    out.j_m = bank.j_m;
    out.j_M = bank.j_M;
    out.jprime_max = jprime_max;
    out.rho = rho;
    out.epsilon = eps;

    ComplexField hat = dft(image);
    out.first.reserve(bank.filters.size());
    for (const auto& f : bank.filters) out.first.push_back(spectral_conv(hat, f.values));

    int jhi = out.jprime_hi();
    out.second.resize(bank.filters.size());
    for (int j = bank.j_m; j <= bank.j_M; ++j) {
        for (int k = 0; k < 4; ++k) {
            auto& row = out.second[out.first_index(j, k)];
            if (j + 1 > jhi) continue;
            ComplexField env_hat = dft(apply_rho(out.first_field(j, k), rho, eps));
            row.reserve(static_cast<std::size_t>(jhi - j) * 4);
            for (int jp = j + 1; jp <= jhi; ++jp)
                for (int kp = 0; kp < 4; ++kp)
                    row.push_back(spectral_conv(env_hat, bank.filter(jp, kp).values));
        }
    }
    return out;
}

/// Discrete l1 norms ((1/d) sum |.|) of every scattering field.
struct NormTable {
    int j_m = 0, j_M = 0, jprime_max = 0;
    std::vector<double> first_l1;                // bank filter order
    std::vector<std::vector<double>> second_l1;  // mirrors ScatteringCoeffs::second

    double first_norm(int j, int k) const {
        return first_l1[static_cast<std::size_t>(j - j_m) * 4 + static_cast<std::size_t>(k)];
    }
    double second_norm(int j, int k, int jp, int kp) const {
        std::size_t row = static_cast<std::size_t>(jp - (j + 1)) * 4 + static_cast<std::size_t>(kp);
        return second_l1[static_cast<std::size_t>(j - j_m) * 4 + static_cast<std::size_t>(k)][row];
    }
};

inline NormTable norms(const ScatteringCoeffs& coeffs) {
    NormTable t;
    t.j_m = coeffs.j_m;
    t.j_M = coeffs.j_M;
    t.jprime_max = coeffs.jprime_max;
    t.first_l1.reserve(coeffs.first.size());
    for (const auto& f : coeffs.first) t.first_l1.push_back(field_l1(f));
    t.second_l1.resize(coeffs.second.size());
    for (std::size_t i = 0; i < coeffs.second.size(); ++i) {
        t.second_l1[i].reserve(coeffs.second[i].size());
        for (const auto& f : coeffs.second[i]) t.second_l1[i].push_back(field_l1(f));
    }
    return t;
}

/// Diagonal decay profile: for each bank scale j, the mean over orientations
/// of || |f * psi_j^k| * psi_j^{pair(k)} ||_1 (matched first and second scale,
/// the profile of the coefficient-decay experiments).
struct DecayProfile {
    std::vector<std::pair<int, double>> points;  // (j, norm)
    bool degenerate = false;
};

inline DecayProfile decay_profile(const GridImage& f, const WaveletBank& bank,
                                  const std::function<int(int)>& pairing = [](int k) { return (k + 2) % 4; }) {
    if (bank.num_scales() < 5) throw std::invalid_argument("decay_profile: bank must span >= 5 scales");
    if (f.n != bank.n) throw std::invalid_argument("decay_profile: image/bank size mismatch");
    ComplexField hat = dft(f);
    DecayProfile out;
    double total = 0.0;
    for (int j = bank.j_m; j <= bank.j_M; ++j) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
            ComplexField env = apply_rho(spectral_conv(hat, bank.filter(j, k).values), RhoKind::Modulus);
            acc += field_l1(spectral_conv(dft(env), bank.filter(j, pairing(k)).values));
        }
        acc /= 4.0;
        total += acc;
        out.points.emplace_back(j, acc);
    }
    out.degenerate = total < 1e-12;
    return out;
}

}  // namespace scatdn
