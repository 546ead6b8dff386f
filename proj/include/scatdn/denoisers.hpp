// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scatdn/core.hpp"
#include "scatdn/energies.hpp"
#include "scatdn/ortho_dwt.hpp"
#include "scatdn/wavelet_bank.hpp"

namespace scatdn {

/// Additive white Gaussian noise model, deterministic under seed.
struct NoiseModel {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

inline GridImage add_noise(const GridImage& f, const NoiseModel& noise) {
    if (noise.sigma < 0.0) throw std::invalid_argument("add_noise: sigma must be >= 0");
    GridImage g = f;
    if (noise.sigma == 0.0) return g;
    Rng rng(noise.seed);
    for (auto& v : g.v) v += noise.sigma * rng.gaussian();
    return g;
}

enum class SolverInit { FromNoisy, FromWaveletDenoised, Random };

struct SolverParams {
    int max_iters = 500;
    double grad_tol = 1e-6;
    int memory = 10;
    SolverInit init = SolverInit::FromNoisy;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    std::uint64_t seed = 0;

    void validate() const {
        if (max_iters < 1) throw std::invalid_argument("SolverParams: max_iters must be >= 1");
        if (grad_tol <= 0.0) throw std::invalid_argument("SolverParams: grad_tol must be > 0");
        if (memory < 1) throw std::invalid_argument("SolverParams: memory must be >= 1");
        if (armijo_c <= 0.0 || armijo_c >= 1.0 || backtrack <= 0.0 || backtrack >= 1.0)
            throw std::invalid_argument("SolverParams: bad line-search parameters");
    }
};

struct SolverReport {
    int iterations = 0;
    bool converged = false;
    bool failed = false;
    std::string warning;
    double final_objective = 0.0;
    std::vector<double> objectives;  // accepted iterates, including the initial point
};

/// Objective callback: returns the value and writes the gradient into grad.
using ObjectiveFn = std::function<double(const GridImage&, GridImage& grad)>;

/// Limited-memory BFGS with Armijo backtracking. Accepted iterates are
/// monotone in the objective; on line-search breakdown the best iterate found
/// so far is returned with a warning in the report.
inline GridImage minimize_lbfgs(const ObjectiveFn& objective, GridImage x, const SolverParams& params,
                                SolverReport* report = nullptr) {
    params.validate();
    std::size_t d = x.size();
    SolverReport local;
    SolverReport& rep = report ? *report : local;
    rep = SolverReport{};

    auto dot = [d](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += a[i] * b[i];
        return s;
    };

    GridImage grad(x.n);
    double f = objective(x, grad);
    if (!std::isfinite(f)) throw std::invalid_argument("minimize_lbfgs: objective not finite at the initial point");
    rep.objectives.push_back(f);

    GridImage best = x;
    double best_f = f;

    std::vector<std::vector<double>> s_hist, y_hist;
    std::vector<double> rho_hist;

    for (int it = 0; it < params.max_iters; ++it) {
        double gnorm = 0.0;
        for (double v : grad.v) gnorm += v * v;
        gnorm = std::sqrt(gnorm);
        if (gnorm <= params.grad_tol) {
            rep.converged = true;
            break;
        }

        // two-loop recursion for the search direction p = -H grad
        std::vector<double> q(grad.v);
        std::size_t m = s_hist.size();
        std::vector<double> alpha(m);
        for (std::size_t i = m; i-- > 0;) {
            alpha[i] = rho_hist[i] * dot(s_hist[i], q);
            for (std::size_t t = 0; t < d; ++t) q[t] -= alpha[i] * y_hist[i][t];
        }
        if (m > 0) {
            double gamma = dot(s_hist[m - 1], y_hist[m - 1]) / dot(y_hist[m - 1], y_hist[m - 1]);
            for (auto& v : q) v *= gamma;
        }
        for (std::size_t i = 0; i < m; ++i) {
            double beta = rho_hist[i] * dot(y_hist[i], q);
            for (std::size_t t = 0; t < d; ++t) q[t] += (alpha[i] - beta) * s_hist[i][t];
        }
        std::vector<double> p(d);
        for (std::size_t t = 0; t < d; ++t) p[t] = -q[t];

        double slope = dot(p, grad.v);
        if (!(slope < 0.0)) {  // fall back to steepest descent
            for (std::size_t t = 0; t < d; ++t) p[t] = -grad.v[t];
            slope = -gnorm * gnorm;
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        double step = 1.0;
        GridImage x_new(x.n);
        GridImage grad_new(x.n);
        double f_new = 0.0;
        bool accepted = false;
        while (step > 1e-20) {
            for (std::size_t t = 0; t < d; ++t) x_new.v[t] = x.v[t] + step * p[t];
            f_new = objective(x_new, grad_new);
            if (std::isfinite(f_new) && f_new <= f + params.armijo_c * step * slope) {
                accepted = true;
                break;
            }
            step *= params.backtrack;
        }
        if (!accepted) {
            rep.failed = true;
            rep.warning = "line search failed to find sufficient decrease; returning best iterate";
            break;
        }

        std::vector<double> s_vec(d), y_vec(d);
        for (std::size_t t = 0; t < d; ++t) {
            s_vec[t] = x_new.v[t] - x.v[t];
            y_vec[t] = grad_new.v[t] - grad.v[t];
        }
        double sy = dot(s_vec, y_vec);
        if (sy > 1e-14) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > params.memory) {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
                rho_hist.erase(rho_hist.begin());
            }
        }

        x = x_new;
        grad = grad_new;
        f = f_new;
        rep.objectives.push_back(f);
        rep.iterations = it + 1;
        if (f < best_f) {
            best_f = f;
            best = x;
        }
    }

    if (f <= best_f) {
        best_f = f;
        best = x;
    }
    rep.final_objective = best_f;
    return best;
}

/// Regularizer callback for the variational objective: returns U(h) and, when
/// grad is non-null, writes the gradient of U into it.
using RegularizerFn = std::function<double(const GridImage&, GridImage*)>;

// Defined below; the variational solver may use it for its initial point.
inline GridImage ortho_threshold_denoise_default(const GridImage& g, double sigma);

/// Minimize (1/2)(1/d)||h - g||^2 + sigma^2 U(h) with the solver above. The
/// data term uses the same mean-square inner product as the energies.
inline GridImage variational_denoise_with(const GridImage& g, double sigma, const RegularizerFn& regularizer,
                                          const SolverParams& solver, SolverReport* report = nullptr) {
    if (sigma < 0.0) throw std::invalid_argument("variational_denoise: sigma must be >= 0");
    if (sigma == 0.0) {
        if (report) {
            *report = SolverReport{};
            report->converged = true;
        }
        return g;
    }
    double d = static_cast<double>(g.size());
    double s2 = sigma * sigma;
    ObjectiveFn objective = [&](const GridImage& h, GridImage& grad) {
        grad = GridImage(h.n);
        double u = regularizer(h, &grad);
        for (auto& v : grad.v) v *= s2;
        double data = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            double r = h.v[i] - g.v[i];
            data += r * r;
            grad.v[i] += r / d;
        }
        return 0.5 * data / d + s2 * u;
    };

    GridImage init = g;
    if (solver.init == SolverInit::Random) {
        Rng rng(solver.seed);
        for (auto& v : init.v) v = rng.gaussian();
    } else if (solver.init == SolverInit::FromWaveletDenoised) {
        init = ortho_threshold_denoise_default(g, sigma);
    }
    return minimize_lbfgs(objective, init, solver, report);
}

/// Variational scattering / dyadic-wavelet denoiser:
/// argmin_h (1/2)||h - g||^2 + sigma^2 U(h).
inline GridImage variational_denoise(const GridImage& g, double sigma, const WaveletBank& bank,
                                     const EnergyParams& energy, const SolverParams& solver,
                                     SolverReport* report = nullptr) {
    if (g.n != bank.n) throw std::invalid_argument("variational_denoise: image/bank size mismatch");
    RegularizerFn reg = [&](const GridImage& h, GridImage* grad) {
        if (grad) return energy_and_gradient(h, bank, energy, *grad);
        return energy_value(h, bank, energy);
    };
    return variational_denoise_with(g, sigma, reg, solver, report);
}

inline double soft_threshold(double a, double t) {
    if (t < 0.0) throw std::invalid_argument("soft_threshold: T must be >= 0");
    double m = std::abs(a) - t;
    return m > 0.0 ? (a < 0.0 ? -m : m) : 0.0;
}

/// Orthogonal wavelet soft-thresholding: threshold every detail band of the
/// FWT at T = sigma * sqrt(2 log d), keep the approximation band.
inline GridImage ortho_threshold_denoise(const GridImage& g, double sigma, const OrthoFilterSpec& basis,
                                         int levels) {
    double d = static_cast<double>(g.size());
    double t = sigma * std::sqrt(2.0 * std::log(d));
    FwtPyramid pyr = fwt_forward(g, basis, levels);
    for (auto& band : pyr.details) {
        for (auto& v : band.lh.v) v = soft_threshold(v, t);
        for (auto& v : band.hl.v) v = soft_threshold(v, t);
        for (auto& v : band.hh.v) v = soft_threshold(v, t);
    }
    return fwt_inverse(pyr, basis);
}

inline GridImage ortho_threshold_denoise_default(const GridImage& g, double sigma) {
    return ortho_threshold_denoise(g, sigma, ortho_filter_spec("sym4"), 2);
}

/// Translation-invariant thresholding: average the orthogonal estimator over
/// an S x S grid of circular shifts.
inline GridImage translation_invariant_denoise(const GridImage& g, double sigma, const OrthoFilterSpec& basis,
                                               int levels, int shifts = 10) {
    if (shifts < 1) throw std::invalid_argument("translation_invariant_denoise: shifts must be >= 1");
    GridImage acc(g.n);
    for (int s1 = 0; s1 < shifts; ++s1) {
        for (int s2 = 0; s2 < shifts; ++s2) {
            GridImage est = circular_shift(ortho_threshold_denoise(circular_shift(g, s1, s2), sigma, basis, levels),
                                           -s1, -s2);
            for (std::size_t i = 0; i < acc.size(); ++i) acc.v[i] += est.v[i];
        }
    }
    double w = 1.0 / (static_cast<double>(shifts) * static_cast<double>(shifts));
    for (auto& v : acc.v) v *= w;
    return acc;
}

}  // namespace scatdn
