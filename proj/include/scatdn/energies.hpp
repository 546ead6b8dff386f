// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "scatdn/core.hpp"
#include "scatdn/transforms.hpp"
#include "scatdn/wavelet_bank.hpp"

namespace scatdn {

enum class EnergyMode { WaveletOnly, Scattering };

/// Weights and scale ranges of the sparsity energies. j_m..j_M is the range of
/// the first convolution scale; second-order terms run over j' in
/// (j, min(bank.j_M, jprime_max)]. Terms whose first scale is j_m are scaled
/// by fine_scale_factor (first-order lambda term excluded).
struct EnergyParams {
    double lambda = 1.9;
    double gamma = 1.4;
    double eta0 = 0.52;
    double eta1 = 0.10;
    double epsilon = 1e-3;
    int j_m = 0;
    int j_M = 0;
    int jprime_max = 0;
    double fine_scale_factor = 0.55;
    EnergyMode mode = EnergyMode::Scattering;

    void validate(const WaveletBank& bank) const {
        if (lambda < 0.0 || gamma < 0.0 || eta0 < 0.0 || eta1 < 0.0)
            throw std::invalid_argument("EnergyParams: weights must be >= 0");
        if (epsilon < 0.0) throw std::invalid_argument("EnergyParams: epsilon must be >= 0");
        if (j_m > j_M) throw std::invalid_argument("EnergyParams: j_m > j_M");
        if (j_m < bank.j_m || j_M > bank.j_M)
            throw std::invalid_argument("EnergyParams: scale range outside the bank");
    }
};

inline EnergyParams default_scattering_params(int j_m, int j_M) {
    EnergyParams p;
    p.j_m = j_m;
    p.j_M = j_M;
    return p;
}

inline EnergyParams default_wavelet_params(int j_m, int j_M) {
    EnergyParams p;
    p.lambda = 1.2;
    p.gamma = 0.0;
    p.eta0 = 0.0;
    p.eta1 = 0.0;
    p.j_m = j_m;
    p.j_M = j_M;
    p.mode = EnergyMode::WaveletOnly;
    return p;
}

namespace detail {

inline cdouble phase_or_zero(cdouble z) {
    double m = std::abs(z);
    return m > 0.0 ? z / m : cdouble{};
}

// Spectral adjoint of the convolution operator: multiply by conj(filter_hat).
inline ComplexField spectral_conv_adjoint(const ComplexField& field, const ComplexField& filter_hat) {
    ComplexField prod = dft(field);
    for (std::size_t i = 0; i < prod.size(); ++i) prod.v[i] *= std::conj(filter_hat.v[i]);
    return idft(prod);
}

// Shared evaluation of energy value and (optionally) its gradient. The energy
// is a weighted sum of plain discrete l1 norms of the transform fields; the
// smoothing epsilon enters only through the modulus envelope feeding the
// second convolutions, so the value matches the NormTable aggregates exactly.
inline double energy_eval(const GridImage& h, const WaveletBank& bank, const EnergyParams& params,
                          GridImage* grad_out) {
    if (h.n != bank.n) throw std::invalid_argument("energy: image/bank size mismatch");
    params.validate(bank);
    bool scattering = params.mode == EnergyMode::Scattering;
    if (grad_out && scattering && params.epsilon == 0.0)
        throw std::invalid_argument("energy_gradient: epsilon must be > 0 in scattering mode");

    double d = static_cast<double>(h.size());
    double eps = params.epsilon;
    ComplexField hat = dft(h);
    if (grad_out) *grad_out = GridImage(h.n);

    int jp_hi = std::min(bank.j_M, params.jprime_max);
    double energy = 0.0;
    for (int j = params.j_m; j <= params.j_M; ++j) {
        double fine = (j == params.j_m) ? params.fine_scale_factor : 1.0;
        for (int k = 0; k < 4; ++k) {
            const ComplexField& psi = bank.filter(j, k).values;
            ComplexField a = spectral_conv(hat, psi);

            double w_first = params.lambda * std::pow(2.0, -j);
            energy += w_first * field_l1(a);

            // dE/da accumulated over all terms touching this first channel
            ComplexField wa;
            if (grad_out) {
                wa = ComplexField(h.n);
                for (std::size_t i = 0; i < a.size(); ++i)
                    wa.v[i] = w_first * phase_or_zero(a.v[i]);
            }

            if (scattering && j < jp_hi) {
                ComplexField env(h.n);   // rho_eps(a), real-valued
                ComplexField r(h.n);     // sqrt(|a|^2 + eps^2)
                for (std::size_t i = 0; i < a.size(); ++i) {
                    double ri = std::sqrt(std::norm(a.v[i]) + eps * eps);
                    r.v[i] = ri;
                    env.v[i] = ri - eps;
                }
                ComplexField env_hat = dft(env);
                ComplexField s_hat(h.n);  // d(second terms)/d(env), frequency domain
                for (int jp = j + 1; jp <= jp_hi; ++jp) {
                    for (int kp = 0; kp < 4; ++kp) {
                        double w2;
                        if (kp == (k + 2) % 4)
                            w2 = fine * params.gamma * std::pow(2.0, -jp);
                        else if (kp == k)
                            w2 = -fine * params.eta0 * std::pow(2.0, -j);
                        else
                            w2 = -fine * params.eta1 * std::pow(2.0, -j);
                        const ComplexField& psip = bank.filter(jp, kp).values;
                        ComplexField b = spectral_conv(env_hat, psip);
                        energy += w2 * field_l1(b);
                        if (grad_out) {
                            for (auto& z : b.v) z = phase_or_zero(z);
                            ComplexField b_hat = dft(b);
                            for (std::size_t i = 0; i < b_hat.size(); ++i)
                                s_hat.v[i] += w2 * b_hat.v[i] * std::conj(psip.v[i]);
                        }
                    }
                }
                if (grad_out) {
                    ComplexField s_total = idft(s_hat);
                    for (std::size_t i = 0; i < a.size(); ++i)
                        wa.v[i] += s_total.v[i].real() * a.v[i] / r.v[i];
                }
            }

            if (grad_out) {
                ComplexField g = spectral_conv_adjoint(wa, psi);
                for (std::size_t i = 0; i < g.size(); ++i) grad_out->v[i] += g.v[i].real() / d;
            }
        }
    }
    return energy;
}

}  // namespace detail

/// First-order dyadic l1 energy: lambda * sum_{j,k} 2^{-j} ||h * psi_j^k||_1.
inline double wavelet_l1_energy(const GridImage& h, const WaveletBank& bank, const EnergyParams& params) {
    if (params.mode != EnergyMode::WaveletOnly)
        throw std::invalid_argument("wavelet_l1_energy: params.mode must be wavelet-only");
    return detail::energy_eval(h, bank, params, nullptr);
}

/// Mixed min/max scattering energy: the lambda term plus, for every first
/// channel (j,k), positive gamma terms (weight 2^{-j'}) on the perpendicular
/// orientation k+2 and negative eta terms (weight 2^{-j}) on k and k+-1.
inline double scattering_energy(const GridImage& h, const WaveletBank& bank, const EnergyParams& params) {
    if (params.mode != EnergyMode::Scattering)
        throw std::invalid_argument("scattering_energy: params.mode must be scattering");
    return detail::energy_eval(h, bank, params, nullptr);
}

inline double energy_value(const GridImage& h, const WaveletBank& bank, const EnergyParams& params) {
    return detail::energy_eval(h, bank, params, nullptr);
}

/// Gradient of the energy, chained analytically: the phase of each outer field
/// is correlated back through psi_j'^k', multiplied by the derivative a/r of
/// the smoothed modulus, and correlated back through psi_j^k.
inline GridImage energy_gradient(const GridImage& h, const WaveletBank& bank, const EnergyParams& params) {
    GridImage grad;
    detail::energy_eval(h, bank, params, &grad);
    return grad;
}

inline double energy_and_gradient(const GridImage& h, const WaveletBank& bank, const EnergyParams& params,
                                  GridImage& grad) {
    return detail::energy_eval(h, bank, params, &grad);
}

}  // namespace scatdn
