#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "greycast/bayes.hpp"
#include "greycast/design.hpp"
#include "greycast/errors.hpp"
#include "greycast/lse.hpp"
#include "greycast/model.hpp"
#include "greycast/predict.hpp"
#include "greycast/series.hpp"

namespace greycast {

enum class Estimator { LSE, BAYES };

inline std::string estimator_name(Estimator e) { return e == Estimator::LSE ? "lse" : "bayes"; }

inline Estimator parse_estimator(const std::string& name) {
    if (name == "lse") return Estimator::LSE;
    if (name == "bayes") return Estimator::BAYES;
    throw std::invalid_argument("unknown estimator name: " + name);
}

struct RollingConfig {
    std::size_t window = 4;
    ModelKind kind = ModelKind::GM11;
    Estimator estimator = Estimator::LSE;
    BayesConfig bayes;
    std::optional<double> fixed_omega;   // required for LSE on trig variants
    bool global_time_index = false;      // trig t runs on the global clock instead
                                         // of restarting at 2 inside each window
    bool carry_forward_priors = false;   // seed each window's priors with the
                                         // previous posterior means

    void validate() const {
        if (window < 2)
            throw std::invalid_argument("rolling window must be >= 2");
        if (estimator == Estimator::LSE && is_trigonometric(kind)) {
            if (!fixed_omega)
                throw std::invalid_argument(
                    "LSE on a trigonometric model needs a fixed omega (or a grid search)");
            if (!std::isfinite(*fixed_omega) || *fixed_omega <= 0.0)
                throw std::invalid_argument("fixed omega must be finite and positive");
        }
        if (estimator == Estimator::BAYES) bayes.validate();
    }
};

struct PredictionRecord {
    std::size_t k = 0;  // 1-based index of the predicted observation
    double predicted = 0.0;
    double observed = 0.0;
};

struct RollingRunResult {
    ModelKind kind = ModelKind::GM11;
    Estimator estimator = Estimator::LSE;
    std::vector<PredictionRecord> predictions;        // k = w+1 .. n
    std::vector<GreyParameters> parameter_trace;      // fit ending at k = w .. n-1
    std::vector<PosteriorSummary> posterior_trace;    // BAYES only, parallel
    double mse = 0.0;
    std::vector<std::string> warnings;
};

/**
 * Streams through the series, refitting on the trailing `window` observations
 * at every step and predicting one step ahead. Each window is treated as a
 * fresh series: its first value anchors the prediction equation.
 *
 * A window where estimation or prediction degenerates (snap of a, vanishing
 * Verhulst denominator, overflow) falls back to persistence - repeat the last
 * observation - and records a warning instead of aborting the run.
 */
inline RollingRunResult run_rolling(const ObservationSeries& series,
                                    const RollingConfig& config) {
    config.validate();
    validate_positive(series);
    const std::size_t n = series.size();
    const std::size_t w = config.window;
    if (n <= w)
        throw std::domain_error("rolling run needs more observations than the window size");

    RollingRunResult result;
    result.kind = config.kind;
    result.estimator = config.estimator;

    const std::size_t n_cols = column_roles(config.kind).size();
    if (w - 1 < n_cols)
        result.warnings.push_back("window gives " + std::to_string(w - 1) +
                                  " regression rows for " + std::to_string(n_cols) +
                                  " parameters; minimum-norm fits will be used");

    std::vector<double> carried_prior_mean;
    double carried_omega = config.bayes.omega_init;

    double sum_sq_err = 0.0;
    std::size_t window_index = 0;
    for (std::size_t k = w; k < n; ++k, ++window_index) {
        ObservationSeries window_series;
        window_series.values.assign(series.values.begin() + static_cast<long>(k - w),
                                    series.values.begin() + static_cast<long>(k));
        const long time_offset =
            config.global_time_index ? static_cast<long>(k - w) : 0;

        // A flat window carries no identifiable dynamics; estimating on it is
        // ill-posed (the Verhulst form cannot even represent a constant
        // process), so the step degrades to persistence.
        const auto [min_it, max_it] =
            std::minmax_element(window_series.values.begin(), window_series.values.end());
        if (*max_it - *min_it <= 1e-12 * std::max(std::abs(*max_it), 1.0)) {
            const double predicted = window_series.values.back();
            const double observed = series.values[k];
            result.predictions.push_back({k + 1, predicted, observed});
            GreyParameters flat;
            flat.kind = config.kind;
            flat.b.assign(parameter_names(config.kind).size() - 1, 0.0);
            if (is_trigonometric(config.kind) && config.fixed_omega)
                flat.omega = *config.fixed_omega;
            result.parameter_trace.push_back(flat);
            if (config.estimator == Estimator::BAYES)
                result.posterior_trace.emplace_back();
            result.warnings.push_back("window ending at k=" + std::to_string(k) +
                                      ": constant window, persistence fallback");
            sum_sq_err += (predicted - observed) * (predicted - observed);
            continue;
        }

        GreyParameters params;
        std::optional<PosteriorSummary> posterior;

        if (config.estimator == Estimator::LSE) {
            const DesignSystem design =
                build_design(window_series, config.kind, config.fixed_omega, time_offset);
            params = solve_lse(design);
            if (params.rank_warning)
                result.warnings.push_back("window ending at k=" + std::to_string(k) +
                                          ": rank-deficient design, minimum-norm fit");
        } else {
            BayesConfig cfg = config.bayes;
            cfg.seed = config.bayes.seed ^ static_cast<std::uint64_t>(window_index);
            if (config.carry_forward_priors && !carried_prior_mean.empty()) {
                cfg.coef_prior_mean = carried_prior_mean;
                cfg.omega_init = carried_omega;
            }
            const DesignSystem design =
                build_design(window_series, config.kind, cfg.omega_init, time_offset);
            BayesFit fit = sample_posterior(design, cfg);
            params = posterior_mean_parameters(design, fit.summary);
            if (fit.chain.tuning_warning)
                result.warnings.push_back("window ending at k=" + std::to_string(k) +
                                          ": omega proposal poorly tuned (acceptance " +
                                          std::to_string(fit.chain.omega_acceptance) + ")");
            if (config.carry_forward_priors) {
                carried_prior_mean.clear();
                for (const auto& name : parameter_names(config.kind))
                    carried_prior_mean.push_back(fit.summary.node(name).mean);
                if (is_trigonometric(config.kind)) {
                    const double om = fit.summary.node("omega").mean;
                    if (std::isfinite(om) && om > 0.0) carried_omega = om;
                }
            }
            posterior = std::move(fit.summary);
        }

        if (snap_development_coefficient(params))
            result.warnings.push_back("window ending at k=" + std::to_string(k) +
                                      ": |a| below " + std::to_string(kEpsilonA) +
                                      ", snapped before prediction");

        double predicted;
        try {
            predicted = predict_one(params, window_series.values.front(),
                                    static_cast<int>(w));
        } catch (const SingularityError& err) {
            predicted = window_series.values.back();
            result.warnings.push_back("window ending at k=" + std::to_string(k) +
                                      ": " + err.what() + "; persistence fallback");
        }

        const double observed = series.values[k];
        result.predictions.push_back({k + 1, predicted, observed});
        result.parameter_trace.push_back(std::move(params));
        if (posterior) result.posterior_trace.push_back(std::move(*posterior));
        sum_sq_err += (predicted - observed) * (predicted - observed);
    }

    result.mse = sum_sq_err / static_cast<double>(result.predictions.size());
    return result;
}

/// One LSE/BAYES result pair for the same model on the same series.
struct ModelRunPair {
    RollingRunResult lse;
    RollingRunResult bayes;
};

struct MetricEntry {
    ModelKind kind = ModelKind::GM11;
    Estimator estimator = Estimator::LSE;
    double mse = 0.0;
    std::optional<double> improvement_pct;  // BAYES rows: 100 (mse_L - mse_B)/mse_L
};

struct MetricReport {
    std::vector<MetricEntry> entries;
};

inline double improvement_pct(double mse_lse, double mse_bayes) {
    return 100.0 * (mse_lse - mse_bayes) / mse_lse;
}

/// MSE table plus the per-model percent improvement of BAYES over LSE.
inline MetricReport compute_metrics(const std::vector<ModelRunPair>& pairs) {
    MetricReport report;
    for (const auto& pair : pairs) {
        if (pair.lse.kind != pair.bayes.kind)
            throw std::invalid_argument("metric pair mixes model kinds");
        if (pair.lse.estimator != Estimator::LSE || pair.bayes.estimator != Estimator::BAYES)
            throw std::invalid_argument("metric pair must hold one LSE and one BAYES run");
        if (pair.lse.predictions.size() != pair.bayes.predictions.size())
            throw std::invalid_argument("metric pair was not run on identical series");
        for (std::size_t i = 0; i < pair.lse.predictions.size(); ++i)
            if (pair.lse.predictions[i].observed != pair.bayes.predictions[i].observed ||
                pair.lse.predictions[i].k != pair.bayes.predictions[i].k)
                throw std::invalid_argument("metric pair was not run on identical series");

        report.entries.push_back({pair.lse.kind, Estimator::LSE, pair.lse.mse, std::nullopt});
        report.entries.push_back({pair.bayes.kind, Estimator::BAYES, pair.bayes.mse,
                                  improvement_pct(pair.lse.mse, pair.bayes.mse)});
    }
    return report;
}

struct GridSpec {
    double lo = 0.01;
    double hi = 12.0;
    double step = 0.01;
};

struct OmegaSearchResult {
    double omega = 0.0;
    double mse = 0.0;
};

/**
 * Picks the fixed omega for an LSE trig model by exhaustive grid search on
 * rolling one-step MSE over the calibration series. Ties break toward the
 * smaller omega (ascending scan with strict improvement).
 */
inline OmegaSearchResult grid_search_omega(const ObservationSeries& series, ModelKind kind,
                                           const GridSpec& grid, std::size_t window = 4,
                                           bool global_time_index = false) {
    if (!is_trigonometric(kind))
        throw std::invalid_argument("omega grid search applies to trigonometric models only");
    if (!(grid.step > 0.0) || grid.hi < grid.lo)
        throw std::invalid_argument("omega grid is empty");

    OmegaSearchResult best;
    bool have_best = false;
    const auto count =
        static_cast<std::size_t>(std::floor((grid.hi - grid.lo) / grid.step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
        const double omega = grid.lo + static_cast<double>(i) * grid.step;
        RollingConfig config;
        config.window = window;
        config.kind = kind;
        config.estimator = Estimator::LSE;
        config.fixed_omega = omega;
        config.global_time_index = global_time_index;
        const double mse = run_rolling(series, config).mse;
        if (!have_best || mse < best.mse) {
            best = {omega, mse};
            have_best = true;
        }
    }
    return best;
}

}  // namespace greycast
