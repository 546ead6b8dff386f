// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: sample generation, denoising, noise sweeps,
// coefficient-decay experiments, bank checks, and slope re-fits.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "scatdn/bench.hpp"
#include "scatdn/io.hpp"

using namespace scatdn;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitPartialFailure = 2;

// Apply a JSON config value to an option unless a flag already set it.
template <typename T>
void maybe_from_config(const json& cfg, const char* key, const CLI::Option* opt, T& value) {
    if (cfg.contains(key) && opt->count() == 0) value = cfg[key].get<T>();
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    return json::parse(in);
}

int env_workers() {
    const char* env = std::getenv("SCATDN_WORKERS");
    if (!env) return 1;
    int w = std::atoi(env);
    if (w < 1) throw std::invalid_argument("SCATDN_WORKERS must be a positive integer");
    return w;
}

void print_fit(const SlopeFit& fit) {
    std::printf("slope %.6f  ci95 +-%.6f  intercept %.6f  residual_rms %.6f  points %d\n", fit.slope,
                fit.ci_halfwidth, fit.intercept, fit.residual_rms, fit.points);
}

int cmd_generate(const json& cfg, const CLI::Option* o_n, std::size_t n, const CLI::Option* o_alpha, double alpha,
                 const CLI::Option* o_seed, std::uint64_t seed, bool constant_regions, const std::string& out,
                 const std::string& pgm) {
    maybe_from_config(cfg, "n", o_n, n);
    maybe_from_config(cfg, "alpha", o_alpha, alpha);
    maybe_from_config(cfg, "seed", o_seed, seed);
    GeoImageParams p = default_geo_params(alpha, n, seed);
    p.constant_regions = constant_regions;
    GeoSampleMeta meta;
    GridImage img = sample_geometric_image(p, &meta);
    write_image(img, out);
    if (!pgm.empty()) write_pgm16(img, pgm, -1.0, 1.0);
    GeoStats st = estimate_stats(img, meta);
    std::printf("generated %s: n=%zu alpha=%.3g gap=%.4f contour_length=%.4f\n", out.c_str(), n, alpha, meta.gap,
                st.contour_length);
    return kExitOk;
}

int cmd_denoise(const json& cfg, const std::string& in, double sigma, const std::string& estimator,
                const std::string& out, const std::string& pgm, int num_scales, SolverParams solver) {
    GridImage noisy = read_image(in);
    EstimatorKind kind = estimator_from_name(estimator);
    int failures = 0;
    GridImage est(noisy.n);
    if (kind == EstimatorKind::Scattering || kind == EstimatorKind::Dyadic) {
        if (cfg.contains("max_iters")) solver.max_iters = cfg["max_iters"].get<int>();
        WaveletBank bank = bank_for(kind, noisy.n, num_scales);
        SolverReport rep;
        est = apply_estimator(noisy, sigma, kind, &bank, solver, &rep, num_scales);
        failures = rep.failed ? 1 : 0;
        std::printf("solver: iterations=%d converged=%d objective=%.8g\n", rep.iterations,
                    rep.converged ? 1 : 0, rep.final_objective);
    } else {
        est = apply_estimator(noisy, sigma, kind);
    }
    write_image(est, out);
    if (!pgm.empty()) write_pgm16(est, pgm, -1.0, 1.0);
    std::printf("denoised %s -> %s with %s (sigma=%.4g)\n", in.c_str(), out.c_str(), estimator.c_str(), sigma);
    return failures ? kExitPartialFailure : kExitOk;
}

int cmd_sweep(const json& cfg, CLI::App* sub, SweepConfig sweep, std::vector<double> alphas,
              std::vector<double> sigma_sq, std::string estimator, const std::string& out) {
    maybe_from_config(cfg, "alphas", sub->get_option("--alpha"), alphas);
    maybe_from_config(cfg, "sigma_sq", sub->get_option("--sigma-sq"), sigma_sq);
    maybe_from_config(cfg, "estimator", sub->get_option("--estimator"), estimator);
    maybe_from_config(cfg, "n", sub->get_option("--n"), sweep.n);
    maybe_from_config(cfg, "realizations", sub->get_option("--realizations"), sweep.realizations);
    maybe_from_config(cfg, "seed", sub->get_option("--seed"), sweep.seed);
    maybe_from_config(cfg, "max_iters", sub->get_option("--max-iters"), sweep.solver.max_iters);
    if (cfg.contains("adapt_scales")) sweep.adapt_scales = cfg["adapt_scales"].get<bool>();
    if (cfg.contains("fixed_num_scales")) sweep.fixed_num_scales = cfg["fixed_num_scales"].get<int>();
    sweep.alphas = alphas;
    sweep.sigma_sq = sigma_sq;
    sweep.estimator = estimator_from_name(estimator);
    sweep.workers = env_workers();
    sweep.validate();

    auto rows = run_noise_sweep(sweep, out);
    int failures = 0;
    for (const auto& r : rows) failures += r.failures;
    for (double a : sweep.alphas) {
        std::vector<SweepRow> sel;
        for (const auto& r : rows)
            if (std::abs(r.alpha - a) < 1e-12 && r.estimator == estimator_name(sweep.estimator)) sel.push_back(r);
        if (sel.size() >= 3) {
            std::printf("alpha %.3g: ", a);
            print_fit(fit_slope(sel));
        }
    }
    if (!out.empty()) std::printf("rows written to %s\n", out.c_str());
    return failures ? kExitPartialFailure : kExitOk;
}

int cmd_decay(const json& cfg, CLI::App* sub, DecayConfig dec, const std::string& out) {
    maybe_from_config(cfg, "alpha", sub->get_option("--alpha"), dec.alpha);
    maybe_from_config(cfg, "n", sub->get_option("--n"), dec.n);
    maybe_from_config(cfg, "seeds", sub->get_option("--seeds"), dec.num_seeds);
    maybe_from_config(cfg, "seed", sub->get_option("--seed"), dec.seed);
    dec.validate();
    DecayResult res = run_decay_experiment(dec, out);
    if (res.degenerate) {
        std::printf("decay experiment degenerate: %d flat seeds\n", res.degenerate_seeds);
        return kExitPartialFailure;
    }
    for (const auto& [j, v] : res.points) std::printf("scale %3d  mean_log2_norm %.4f\n", j, v);
    print_fit(res.fit);
    if (res.degenerate_seeds > 0) {
        std::printf("warning: %d degenerate seeds skipped\n", res.degenerate_seeds);
        return kExitPartialFailure;
    }
    return kExitOk;
}

int cmd_check_bank(std::size_t n, int j_m, int j_M) {
    WaveletBank bank = build_bank(n, j_m, j_M);
    auto [lo, hi] = check_littlewood_paley(bank);
    std::printf("littlewood-paley bounds: [%.6f, %.6f]\n", lo, hi);
    auto moments = check_vanishing_moments(bank);
    double worst = 0.0;
    for (const auto& m : moments) worst = std::max(worst, std::max(m.dc_abs, m.dc_grad));
    std::printf("worst dc / dc-gradient magnitude: %.3e over %zu filters\n", worst, moments.size());
    double mask_dev = 0.0;
    for (int a = 0; a < 720; ++a) {
        double phi = a * (2.0 * kPi / 720.0);
        double s = 0.0;
        for (int k = 0; k < 4; ++k) {
            double m = oriented_mask(phi, k);
            s += m * m;
        }
        mask_dev = std::max(mask_dev, std::abs(s - 1.0));
    }
    std::printf("orientation mask partition-of-unity deviation: %.3e\n", mask_dev);
    bool ok = lo > 0.0 && hi <= 1.0 + 1e-9 && mask_dev < 1e-10 && worst < 1e-10;
    std::printf("bank check: %s\n", ok ? "ok" : "FAILED");
    return ok ? kExitOk : kExitPartialFailure;
}

int cmd_fit(const std::string& in, const std::string& estimator, double alpha) {
    auto rows = read_sweep_csv(in);
    std::vector<SweepRow> sel;
    for (const auto& r : rows) {
        if (!estimator.empty() && r.estimator != estimator) continue;
        if (alpha > 0.0 && std::abs(r.alpha - alpha) > 1e-12) continue;
        sel.push_back(r);
    }
    if (sel.size() < 3) throw std::invalid_argument("fit: need >= 3 matching rows in " + in);
    print_fit(fit_slope(sel));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scattering-regularized denoising toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; explicit flags take precedence")
        ->configurable(false);

    // generate
    auto* gen = app.add_subcommand("generate", "sample a piecewise regular test image");
    std::size_t gen_n = 128;
    double gen_alpha = 2.0;
    std::uint64_t gen_seed = 0;
    bool gen_const = false;
    std::string gen_out, gen_pgm;
    auto* gen_n_opt = gen->add_option("--n", gen_n, "image side (power of two)");
    auto* gen_alpha_opt = gen->add_option("--alpha", gen_alpha, "regularity exponent");
    auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "random seed");
    gen->add_flag("--constant-regions", gen_const, "constant background and foreground");
    gen->add_option("--out", gen_out, "output image path")->required();
    gen->add_option("--pgm", gen_pgm, "optional 16-bit PGM preview path");

    // denoise
    auto* den = app.add_subcommand("denoise", "denoise one image");
    std::string den_in, den_est = "scattering", den_out, den_pgm;
    double den_sigma = 0.0;
    int den_scales = 3;
    SolverParams den_solver;
    den->add_option("--in", den_in, "input image path")->required();
    den->add_option("--sigma", den_sigma, "noise standard deviation")->required();
    den->add_option("--estimator", den_est, "scattering|dyadic|ortho|ti");
    den->add_option("--scales", den_scales, "number of bank scales (variational estimators)");
    den->add_option("--max-iters", den_solver.max_iters, "solver iteration cap");
    den->add_option("--out", den_out, "output image path")->required();
    den->add_option("--pgm", den_pgm, "optional 16-bit PGM preview path");

    // sweep
    auto* swp = app.add_subcommand("sweep", "noise sweep over a sigma^2 grid");
    SweepConfig sweep_cfg;
    std::vector<double> swp_alphas = sweep_cfg.alphas;
    std::vector<double> swp_s2 = sweep_cfg.sigma_sq;
    std::string swp_est = "scattering", swp_out;
    swp->add_option("--alpha", swp_alphas, "alpha values");
    swp->add_option("--sigma-sq", swp_s2, "sigma^2 grid");
    swp->add_option("--estimator", swp_est, "scattering|dyadic|ortho|ti");
    swp->add_option("--n", sweep_cfg.n, "image side");
    swp->add_option("--realizations", sweep_cfg.realizations, "realizations per grid point");
    swp->add_option("--seed", sweep_cfg.seed, "sweep seed");
    swp->add_option("--max-iters", sweep_cfg.solver.max_iters, "solver iteration cap");
    swp->add_option("--out", swp_out, "CSV output path (resumable)");

    // decay
    auto* dec = app.add_subcommand("decay", "matched-scale coefficient decay experiment");
    DecayConfig decay_cfg;
    std::string dec_out;
    dec->add_option("--alpha", decay_cfg.alpha, "contour regularity exponent");
    dec->add_option("--n", decay_cfg.n, "image side");
    dec->add_option("--seeds", decay_cfg.num_seeds, "number of sample seeds");
    dec->add_option("--seed", decay_cfg.seed, "base seed");
    dec->add_option("--out", dec_out, "CSV output path");

    // check-bank
    auto* chk = app.add_subcommand("check-bank", "verify filter bank frame properties");
    std::size_t chk_n = 128;
    int chk_jm = -7, chk_jM = -5;
    chk->add_option("--n", chk_n, "grid side");
    chk->add_option("--jm", chk_jm, "finest scale label");
    chk->add_option("--jM", chk_jM, "coarsest scale label");

    // fit
    auto* fit = app.add_subcommand("fit", "re-fit slopes from an existing sweep CSV");
    std::string fit_in, fit_est;
    double fit_alpha = -1.0;
    fit->add_option("--in", fit_in, "sweep CSV path")->required();
    fit->add_option("--estimator", fit_est, "restrict to one estimator");
    fit->add_option("--alpha", fit_alpha, "restrict to one alpha");

    CLI11_PARSE(app, argc, argv);

    try {
        json cfg = load_config(config_path);
        if (gen->parsed())
            return cmd_generate(cfg, gen_n_opt, gen_n, gen_alpha_opt, gen_alpha, gen_seed_opt, gen_seed, gen_const,
                                gen_out, gen_pgm);
        if (den->parsed()) return cmd_denoise(cfg, den_in, den_sigma, den_est, den_out, den_pgm, den_scales,
                                              den_solver);
        if (swp->parsed()) return cmd_sweep(cfg, swp, sweep_cfg, swp_alphas, swp_s2, swp_est, swp_out);
        if (dec->parsed()) return cmd_decay(cfg, dec, decay_cfg, dec_out);
        if (chk->parsed()) return cmd_check_bank(chk_n, chk_jm, chk_jM);
        if (fit->parsed()) return cmd_fit(fit_in, fit_est, fit_alpha);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitPartialFailure;
    }
    return kExitOk;
}
