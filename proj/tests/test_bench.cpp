// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "scatdn/bench.hpp"

using namespace scatdn;

TEST_CASE("mse and psnr match closed forms") {
    GridImage a(8, 0.0), b(8, 0.1);
    // constant difference 0.1 -> mse 0.01 exactly
    REQUIRE(mse(a, b) == Catch::Approx(0.01).epsilon(1e-14));
    REQUIRE(psnr(a, b, 2.0) == Catch::Approx(10.0 * std::log10(4.0 / 0.01)).epsilon(1e-14));
    REQUIRE(psnr(a, b, 2.0) == Catch::Approx(26.0205999).epsilon(1e-7));
    REQUIRE(std::isinf(psnr(a, a, 2.0)));
    REQUIRE_THROWS(psnr(a, b, 0.0));
    REQUIRE_THROWS(psnr(a, b, -1.0));
    GridImage c(4, 0.0);
    REQUIRE_THROWS(mse(a, c));

    // independent two-pass accumulation oracle on a random pair
    Rng rng(5);
    GridImage x(16), y(16);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x.v[i] = rng.gaussian();
        y.v[i] = rng.gaussian();
    }
    long double acc = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        long double d = static_cast<long double>(x.v[i]) - static_cast<long double>(y.v[i]);
        acc += d * d;
    }
    double oracle = static_cast<double>(acc / static_cast<long double>(x.size()));
    REQUIRE(mse(x, y) == Catch::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("estimator names round-trip and reject unknown labels") {
    for (EstimatorKind k : {EstimatorKind::Scattering, EstimatorKind::Dyadic, EstimatorKind::Ortho,
                            EstimatorKind::TranslationInvariant})
        REQUIRE(estimator_from_name(estimator_name(k)) == k);
    REQUIRE_THROWS(estimator_from_name("curvelet"));
}

TEST_CASE("ols fit recovers an exact line with zero residual") {
    std::vector<double> x = {-2.0, -1.0, 0.5, 1.0, 3.0};
    std::vector<double> y;
    for (double v : x) y.push_back(2.0 * v + 1.0);
    SlopeFit fit = ols_fit(x, y);
    REQUIRE(fit.slope == Catch::Approx(2.0).epsilon(1e-13));
    REQUIRE(fit.intercept == Catch::Approx(1.0).epsilon(1e-13));
    REQUIRE(fit.residual_rms < 1e-12);
    REQUIRE(fit.points == 5);
}

TEST_CASE("ols fit rejects degenerate inputs") {
    REQUIRE_THROWS(ols_fit({1.0, 2.0}, {1.0, 2.0}));
    REQUIRE_THROWS(ols_fit({1.0, 1.0, 1.0}, {0.0, 1.0, 2.0}));
    REQUIRE_THROWS(ols_fit({1.0, 2.0, 3.0}, {1.0, 2.0}));
}

TEST_CASE("slope confidence interval covers the truth at the nominal rate") {
    Rng rng(4242);
    int covered = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x, y;
        for (int i = 0; i < 8; ++i) {
            double xi = -1.0 + 0.25 * i;
            x.push_back(xi);
            y.push_back(1.5 * xi + 0.01 * rng.gaussian());
        }
        SlopeFit fit = ols_fit(x, y);
        if (std::abs(fit.slope - 1.5) <= fit.ci_halfwidth) ++covered;
    }
    REQUIRE(covered >= 93);
}

TEST_CASE("fit_slope regresses log mse on log sigma") {
    // rows on the exact power law mse = 0.3 * sigma^{4/3}
    std::vector<SweepRow> rows;
    for (double s : {0.1, 0.2, 0.4, 0.8}) {
        SweepRow r;
        r.sigma = s;
        r.sigma_sq = s * s;
        r.mse_mean = 0.3 * std::pow(s, 4.0 / 3.0);
        rows.push_back(r);
    }
    SlopeFit fit = fit_slope(rows);
    REQUIRE(fit.slope == Catch::Approx(4.0 / 3.0).epsilon(1e-12));
    REQUIRE(fit.residual_rms < 1e-12);
}

TEST_CASE("sweep row CSV serialization round-trips") {
    SweepRow r;
    r.alpha = 1.5;
    r.sigma_sq = 0.11;
    r.sigma = std::sqrt(0.11);
    r.estimator = "ortho";
    r.n = 32;
    r.realizations = 2;
    r.num_scales = 0;
    r.mse_mean = 0.0123456789012345;
    r.mse_std = 1e-4;
    r.psnr_mean = 25.5;
    r.failures = 0;
    r.wallclock_s = 0.25;

    std::string path = (std::filesystem::temp_directory_path() / "scatdn_roundtrip.csv").string();
    {
        std::ofstream out(path);
        out << sweep_csv_header() << '\n' << sweep_csv_line(r) << '\n';
    }
    auto rows = read_sweep_csv(path);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].alpha == r.alpha);
    REQUIRE(rows[0].sigma_sq == r.sigma_sq);
    REQUIRE(rows[0].estimator == r.estimator);
    REQUIRE(rows[0].n == r.n);
    REQUIRE(rows[0].mse_mean == r.mse_mean);
    REQUIRE(rows[0].psnr_mean == r.psnr_mean);
    std::filesystem::remove(path);
}

TEST_CASE("sweep config validation rejects malformed grids") {
    SweepConfig cfg;
    cfg.alphas = {};
    REQUIRE_THROWS(cfg.validate());
    cfg = SweepConfig{};
    cfg.sigma_sq = {0.1, -0.2};
    REQUIRE_THROWS(cfg.validate());
    cfg = SweepConfig{};
    cfg.realizations = 1;
    REQUIRE_THROWS(cfg.validate());
    cfg = SweepConfig{};
    cfg.n = 48;
    REQUIRE_THROWS(cfg.validate());
}

namespace {

SweepConfig small_ortho_config() {
    SweepConfig cfg;
    cfg.alphas = {2.0};
    cfg.estimator = EstimatorKind::Ortho;
    cfg.sigma_sq = {0.4, 0.1, 0.025};
    cfg.realizations = 2;
    cfg.n = 32;
    cfg.seed = 77;
    return cfg;
}

}  // namespace

TEST_CASE("small sweep completes with full bookkeeping and a monotone error trend") {
    SweepConfig cfg = small_ortho_config();
    auto rows = run_noise_sweep(cfg);
    REQUIRE(rows.size() == cfg.sigma_sq.size());
    double mse_small = 0.0, mse_large = 0.0;
    for (const auto& r : rows) {
        REQUIRE(r.estimator == "ortho");
        REQUIRE(r.realizations == 2);
        REQUIRE(r.n == 32);
        REQUIRE(r.failures == 0);
        REQUIRE(r.mse_mean > 0.0);
        if (r.sigma_sq == 0.025) mse_small = r.mse_mean;
        if (r.sigma_sq == 0.4) mse_large = r.mse_mean;
    }
    REQUIRE(mse_small < mse_large);
}

TEST_CASE("sweeps are deterministic under the config seed") {
    SweepConfig cfg = small_ortho_config();
    cfg.sigma_sq = {0.1, 0.025};
    auto a = run_noise_sweep(cfg);
    auto b = run_noise_sweep(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].mse_mean == b[i].mse_mean);
        REQUIRE(a[i].mse_std == b[i].mse_std);
        REQUIRE(a[i].psnr_mean == b[i].psnr_mean);
    }
}

TEST_CASE("an interrupted sweep resumes from its CSV without recomputing rows") {
    SweepConfig cfg = small_ortho_config();
    cfg.sigma_sq = {0.1, 0.025};
    std::string path = (std::filesystem::temp_directory_path() / "scatdn_resume.csv").string();
    std::filesystem::remove(path);

    // full run for reference values
    auto full = run_noise_sweep(cfg);

    // simulate an interrupted run: only the first grid point is on disk
    SweepConfig first = cfg;
    first.sigma_sq = {0.1};
    run_noise_sweep(first, path);
    auto partial = read_sweep_csv(path);
    REQUIRE(partial.size() == 1);
    double sentinel = -123.0;
    {
        // overwrite the stored wallclock so recomputation would be detectable
        std::ofstream out(path);
        out << sweep_csv_header() << '\n';
        partial[0].wallclock_s = sentinel;
        out << sweep_csv_line(partial[0]) << '\n';
    }

    auto resumed = run_noise_sweep(cfg, path);
    REQUIRE(resumed.size() == 2);
    bool saw_kept = false, saw_new = false;
    for (const auto& r : resumed) {
        if (r.sigma_sq == 0.1) {
            REQUIRE(r.wallclock_s == sentinel);  // reused, not recomputed
            saw_kept = true;
        }
        if (r.sigma_sq == 0.025) {
            for (const auto& f : full)
                if (f.sigma_sq == 0.025) REQUIRE(r.mse_mean == f.mse_mean);
            saw_new = true;
        }
    }
    REQUIRE(saw_kept);
    REQUIRE(saw_new);
    std::filesystem::remove(path);
}

TEST_CASE("decay config validation enforces its grid constraints") {
    DecayConfig cfg;
    cfg.n = 32;
    REQUIRE_THROWS(cfg.validate());
    cfg = DecayConfig{};
    cfg.fit_scales = 2;
    REQUIRE_THROWS(cfg.validate());
    cfg = DecayConfig{};
    cfg.supersample = 8;  // inconsistent with fwt_levels = 4
    REQUIRE_THROWS(cfg.validate());
}

TEST_CASE("zero-contrast decay experiment reports degenerate") {
    DecayConfig cfg;
    cfg.n = 64;
    cfg.num_seeds = 2;
    cfg.fixed_gap = 0.0;
    DecayResult res = run_decay_experiment(cfg);
    REQUIRE(res.degenerate);
    REQUIRE(res.degenerate_seeds == 2);
    REQUIRE(res.points.empty());
}
