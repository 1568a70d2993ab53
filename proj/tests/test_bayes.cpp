#include <doctest.h>

#include <cmath>
#include <numeric>

#include "greycast/bayes.hpp"
#include "greycast/design.hpp"
#include "greycast/rng.hpp"
#include "oracles.hpp"

using namespace greycast;

namespace {

DesignSystem linear_design(const std::vector<double>& covariate,
                           const std::vector<double>& y) {
    DesignSystem d;
    d.kind = ModelKind::GM11;
    d.roles = column_roles(ModelKind::GM11);
    const auto n = static_cast<Eigen::Index>(y.size());
    d.b.resize(n, 2);
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d.b(i, 0) = covariate[static_cast<std::size_t>(i)];
        d.b(i, 1) = 1.0;
        d.y(i) = y[static_cast<std::size_t>(i)];
    }
    return d;
}

/// Batch-means Monte Carlo standard error (50 batches).
double mcse(const std::vector<double>& draws) {
    const std::size_t n_batches = 50;
    const std::size_t len = draws.size() / n_batches;
    std::vector<double> batch_means;
    for (std::size_t b = 0; b < n_batches; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += draws[b * len + i];
        batch_means.push_back(s / static_cast<double>(len));
    }
    double grand = 0.0;
    for (double m : batch_means) grand += m;
    grand /= static_cast<double>(n_batches);
    double var = 0.0;
    for (double m : batch_means) var += (m - grand) * (m - grand);
    var /= static_cast<double>(n_batches - 1);
    return std::sqrt(var / static_cast<double>(n_batches));
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("identical config and seed give bit-identical chains") {
    const auto series = ObservationSeries{{52.0, 54.5, 53.0, 55.5}, {}};
    const auto design = build_design(series, ModelKind::GM_COS, 1.0);
    BayesConfig cfg;
    cfg.samples = 500;
    cfg.burn_in = 100;
    cfg.seed = 77;
    const auto fit1 = sample_posterior(design, cfg);
    const auto fit2 = sample_posterior(design, cfg);
    REQUIRE(fit1.chain.names == fit2.chain.names);
    for (std::size_t i = 0; i < fit1.chain.draws.size(); ++i)
        CHECK(fit1.chain.draws[i] == fit2.chain.draws[i]);
    const auto fit3 = [&] {
        auto c = cfg;
        c.seed = 78;
        return sample_posterior(design, c);
    }();
    CHECK(fit1.chain.node("tau") != fit3.chain.node("tau"));
}

TEST_CASE("conjugate case matches the analytic posterior within 3 MC standard errors") {
    RandomSource rng(5);
    const std::size_t n = 40;
    std::vector<double> x, y;
    oracles::Matrix xm;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = 5.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        const double yi = 2.0 - 0.5 * xi + rng.normal(0.0, 0.1);
        x.push_back(xi);
        y.push_back(yi);
        xm.push_back({xi, 1.0});
    }

    BayesConfig cfg;
    cfg.samples = 20500;
    cfg.burn_in = 500;
    cfg.seed = 99;
    const auto fit = sample_posterior(linear_design(x, y), cfg);

    // Exact posterior of the sampler's own model (independent coefficient
    // prior), marginalized over tau by quadrature. The NIG closed form shares
    // its mean to O(prior precision) but not its variance at this sample size.
    const auto exact = oracles::semi_conjugate_posterior(
        xm, y, cfg.coef_prior_precision, cfg.tau_prior_shape, cfg.tau_prior_rate);
    const auto exact_coarse = oracles::semi_conjugate_posterior(
        xm, y, cfg.coef_prior_precision, cfg.tau_prior_shape, cfg.tau_prior_rate, 2001);
    const auto nig = oracles::conjugate_linear_posterior(
        xm, y, cfg.coef_prior_precision, cfg.tau_prior_shape, cfg.tau_prior_rate);

    const std::vector<std::string> nodes{"a", "b"};
    for (std::size_t j = 0; j < 2; ++j) {
        // quadrature self-consistency at two resolutions
        CHECK(exact.mean[j] == doctest::Approx(exact_coarse.mean[j]).epsilon(1e-9));
        CHECK(exact.variance[j] == doctest::Approx(exact_coarse.variance[j]).epsilon(1e-9));

        const auto& draws = fit.chain.node(nodes[j]);
        REQUIRE(draws.size() == 20000);
        const double se = mcse(draws);
        CHECK(std::abs(mean_of(draws) - exact.mean[j]) < 3.0 * se);
        CHECK(std::abs(mean_of(draws) - nig.mean[j]) < 3.0 * se);

        // variance: batch means over squared deviations
        const double m = mean_of(draws);
        std::vector<double> sq;
        sq.reserve(draws.size());
        for (double v : draws) sq.push_back((v - m) * (v - m));
        CHECK(std::abs(variance_of(draws) - exact.variance[j]) < 3.0 * mcse(sq));
    }

    for (double t : fit.chain.node("tau")) CHECK(t > 0.0);
}

TEST_CASE("zero-noise data concentrates on the generating coefficients") {
    std::vector<double> x, y;
    for (int i = 0; i < 12; ++i) {
        x.push_back(static_cast<double>(i));
        y.push_back(3.0 + 0.25 * x.back());  // exact, no noise
    }
    BayesConfig cfg;
    cfg.samples = 6000;
    cfg.burn_in = 1000;
    cfg.seed = 3;
    const auto fit = sample_posterior(linear_design(x, y), cfg);
    CHECK(fit.summary.node("a").mean == doctest::Approx(0.25).scale(1.0).epsilon(1e-3));
    CHECK(fit.summary.node("b").mean == doctest::Approx(3.0).scale(1.0).epsilon(1e-3));
    // residuals vanish, so tau rises to the ceiling the prior rate allows,
    // roughly (a0 + (n - p)/2) / b0 = 5001 here
    CHECK(fit.summary.node("tau").mean > 1e3);
}

TEST_CASE("prior-only sampling reproduces the coefficient prior moments") {
    DesignSystem d;
    d.kind = ModelKind::GM11;
    d.roles = column_roles(ModelKind::GM11);
    d.b.resize(0, 2);
    d.y.resize(0);
    BayesConfig cfg;
    cfg.samples = 20500;
    cfg.burn_in = 500;
    cfg.seed = 12;
    const auto fit = sample_posterior(d, cfg);
    const double prior_var = 1.0 / cfg.coef_prior_precision;  // 10000
    for (const auto* node : {"a", "b"}) {
        const auto& draws = fit.chain.node(node);
        const double se_mean = std::sqrt(prior_var / static_cast<double>(draws.size()));
        CHECK(std::abs(mean_of(draws)) < 3.0 * se_mean);
        const double se_var = prior_var * std::sqrt(2.0 / static_cast<double>(draws.size()));
        CHECK(std::abs(variance_of(draws) - prior_var) < 3.0 * se_var);
    }

    // the tiny-shape gamma prior underflows double precision; draws must
    // still come out positive with finite deviance
    for (double t : fit.chain.node("tau")) CHECK(t > 0.0);
    for (double d : fit.chain.node("deviance")) CHECK(std::isfinite(d));
}

TEST_CASE("omega chain behaves and the tuning warning matches the acceptance band") {
    const auto series = ObservationSeries{{54.2, 55.1, 53.8, 54.9}, {}};
    const auto design = build_design(series, ModelKind::GM_COS, 1.0);
    BayesConfig cfg;
    cfg.samples = 3000;
    cfg.burn_in = 500;
    cfg.seed = 21;
    const auto fit = sample_posterior(design, cfg);

    for (double w : fit.chain.node("omega")) {
        CHECK(w > 0.0);
        CHECK(std::isfinite(w));
    }
    CHECK(fit.chain.omega_acceptance >= 0.0);
    CHECK(fit.chain.omega_acceptance <= 1.0);
    const bool outside =
        fit.chain.omega_acceptance <= 0.05 || fit.chain.omega_acceptance >= 0.95;
    CHECK(fit.chain.tuning_warning == outside);

    // chi-squared(0.001) prior piles omega near zero on flat data, as in the
    // reference posterior; the mean should stay well below the proposal scale
    CHECK(fit.summary.node("omega").mean < 1.0);

    // plausibility band for a traffic-like window: the flat-cosine fit acts
    // like an intercept model around the window level
    const double level = fit.summary.node("b1").mean + fit.summary.node("b2").mean;
    CHECK(level > -200.0);
    CHECK(level < 400.0);
}

TEST_CASE("underdetermined sincos window still yields a proper posterior") {
    const auto series = ObservationSeries{{50.0, 52.0, 51.0, 53.0}, {}};
    const auto design = build_design(series, ModelKind::GM_SINCOS, 1.0);  // 3 rows, 4 cols
    BayesConfig cfg;
    cfg.samples = 1500;
    cfg.burn_in = 500;
    cfg.seed = 8;
    const auto fit = sample_posterior(design, cfg);
    for (const auto& node : fit.summary.nodes) {
        CHECK(std::isfinite(node.mean));
        CHECK(node.sd >= 0.0);
        CHECK(node.count == 1000);
    }
}

TEST_CASE("summarize computes order-statistics quantiles") {
    Chain constant;
    constant.names = {"x"};
    constant.draws = {std::vector<double>(100, 5.0)};
    const auto s = summarize(constant);
    CHECK(s.node("x").mean == 5.0);
    CHECK(s.node("x").sd == 0.0);
    CHECK(s.node("x").q2_5 == 5.0);
    CHECK(s.node("x").q97_5 == 5.0);

    Chain ramp;
    ramp.names = {"x"};
    ramp.draws.emplace_back();
    for (int i = 1; i <= 4500; ++i) ramp.draws[0].push_back(static_cast<double>(i));
    const auto r = summarize(ramp);
    CHECK(r.node("x").q50 == doctest::Approx(2250.5).epsilon(1e-12));
    CHECK(r.node("x").q2_5 == doctest::Approx(113.475).epsilon(1e-12));
    CHECK(r.node("x").q2_5 ==
          doctest::Approx(oracles::quantile(ramp.draws[0], 0.025)).epsilon(1e-12));

    // quantiles are nondecreasing on arbitrary chains
    RandomSource rng(404);
    Chain noisy;
    noisy.names = {"x"};
    noisy.draws.emplace_back();
    for (int i = 0; i < 777; ++i) noisy.draws[0].push_back(rng.normal(0.0, 3.0));
    const auto q = summarize(noisy).node("x");
    CHECK(q.q2_5 <= q.q25);
    CHECK(q.q25 <= q.q50);
    CHECK(q.q50 <= q.q75);
    CHECK(q.q75 <= q.q97_5);

    CHECK_THROWS_AS(summarize(Chain{}), std::domain_error);
}

TEST_CASE("deviance node is summarized like any parameter") {
    const auto series = ObservationSeries{{52.0, 54.5, 53.0, 55.5}, {}};
    const auto design = build_design(series, ModelKind::GM11);
    BayesConfig cfg;
    cfg.samples = 800;
    cfg.burn_in = 300;
    cfg.seed = 15;
    const auto fit = sample_posterior(design, cfg);
    const auto& dev = fit.summary.node("deviance");
    CHECK(dev.count == 500);
    CHECK(std::isfinite(dev.mean));
    CHECK(dev.q2_5 <= dev.q97_5);
}

TEST_CASE("posterior means map onto grey parameters by column role") {
    const auto series = ObservationSeries{{52.0, 54.5, 53.0, 55.5, 54.0}, {}};
    const auto design = build_design(series, ModelKind::GM_SINCOS, 1.2);
    BayesConfig cfg;
    cfg.samples = 700;
    cfg.burn_in = 200;
    cfg.seed = 4;
    const auto fit = sample_posterior(design, cfg);
    const auto p = posterior_mean_parameters(design, fit.summary);
    CHECK(p.kind == ModelKind::GM_SINCOS);
    CHECK(p.a == fit.summary.node("a").mean);
    CHECK(p.b1() == fit.summary.node("b1").mean);
    CHECK(p.b2() == fit.summary.node("b2").mean);
    CHECK(p.b3() == fit.summary.node("b3").mean);
    REQUIRE(p.omega.has_value());
    CHECK(*p.omega == fit.summary.node("omega").mean);
    REQUIRE(p.tau.has_value());
    CHECK(*p.tau == fit.summary.node("tau").mean);
}

TEST_CASE("config validation") {
    BayesConfig cfg;
    cfg.samples = 100;
    cfg.burn_in = 100;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = BayesConfig{};
    cfg.tau_prior_shape = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = BayesConfig{};
    cfg.omega_proposal_sd = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
