#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "greycast/design.hpp"
#include "greycast/model.hpp"
#include "greycast/rng.hpp"

namespace greycast {

enum class OmegaPrior {
    ChiSquared,  // chi^2(df), df defaults to 0.001 (mass piled near 0)
    Uniform      // uniform(0, omega_uniform_max); experimental alternative
};

/**
 * Sampler configuration. Defaults reproduce the reference setup:
 * 5000 samples with 500 burn-in, normal(0, precision 1e-4) coefficient
 * priors, gamma(1e-3, 1e-3) noise-precision prior and a chi^2(1e-3) omega
 * prior. The omega random-walk proposal is adapted during burn-in toward
 * ~0.4 acceptance and frozen afterwards.
 */
struct BayesConfig {
    std::size_t samples = 5000;
    std::size_t burn_in = 500;
    std::uint64_t seed = 0;

    double coef_prior_precision = 1e-4;
    std::vector<double> coef_prior_mean;  // empty = zero vector; set by the
                                          // carry-forward rolling mode

    double tau_prior_shape = 1e-3;
    double tau_prior_rate = 1e-3;

    OmegaPrior omega_prior = OmegaPrior::ChiSquared;
    double omega_prior_df = 1e-3;
    double omega_uniform_max = 12.0;
    double omega_proposal_sd = 0.25;
    bool adapt_omega_proposal = true;
    double omega_init = 1.0;

    void validate() const {
        if (samples <= burn_in)
            throw std::invalid_argument("bayes config: samples must exceed burn_in");
        if (!(coef_prior_precision > 0.0) || !(tau_prior_shape > 0.0) ||
            !(tau_prior_rate > 0.0) || !(omega_prior_df > 0.0))
            throw std::invalid_argument("bayes config: prior hyperparameters must be positive");
        if (!(omega_proposal_sd > 0.0) || !(omega_init > 0.0) || !(omega_uniform_max > 0.0))
            throw std::invalid_argument("bayes config: omega settings must be positive");
    }
};

/// Retained MCMC draws, one vector per node, in iteration order.
struct Chain {
    std::vector<std::string> names;
    std::vector<std::vector<double>> draws;
    double omega_acceptance = std::numeric_limits<double>::quiet_NaN();
    bool tuning_warning = false;

    std::size_t retained() const { return draws.empty() ? 0 : draws.front().size(); }

    const std::vector<double>& node(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return draws[i];
        throw std::invalid_argument("chain has no node named " + name);
    }
};

struct NodeSummary {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;
    double q2_5 = 0.0;
    double q25 = 0.0;
    double q50 = 0.0;
    double q75 = 0.0;
    double q97_5 = 0.0;
    std::size_t count = 0;
};

struct PosteriorSummary {
    std::vector<NodeSummary> nodes;

    const NodeSummary& node(const std::string& name) const {
        for (const auto& n : nodes)
            if (n.name == name) return n;
        throw std::invalid_argument("summary has no node named " + name);
    }
};

namespace detail {

/// Quantile by linear interpolation of order statistics (R type 7).
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted.front();
    const double h = static_cast<double>(n - 1) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

/// Empirical mean/sd/quantiles per node.
inline PosteriorSummary summarize(const Chain& chain) {
    if (chain.retained() == 0)
        throw std::domain_error("cannot summarize an empty chain");
    PosteriorSummary summary;
    summary.nodes.reserve(chain.names.size());
    for (std::size_t i = 0; i < chain.names.size(); ++i) {
        const auto& d = chain.draws[i];
        NodeSummary s;
        s.name = chain.names[i];
        s.count = d.size();
        double mean = 0.0;
        for (double v : d) mean += v;
        mean /= static_cast<double>(d.size());
        double ss = 0.0;
        for (double v : d) ss += (v - mean) * (v - mean);
        s.mean = mean;
        s.sd = d.size() > 1 ? std::sqrt(ss / static_cast<double>(d.size() - 1)) : 0.0;
        std::vector<double> sorted = d;
        std::sort(sorted.begin(), sorted.end());
        s.q2_5 = detail::quantile_sorted(sorted, 0.025);
        s.q25 = detail::quantile_sorted(sorted, 0.25);
        s.q50 = detail::quantile_sorted(sorted, 0.50);
        s.q75 = detail::quantile_sorted(sorted, 0.75);
        s.q97_5 = detail::quantile_sorted(sorted, 0.975);
        summary.nodes.push_back(std::move(s));
    }
    return summary;
}

struct BayesFit {
    Chain chain;
    PosteriorSummary summary;
};

namespace detail {

inline double sum_squared_residuals(const Eigen::VectorXd& y, const Eigen::MatrixXd& b,
                                    const Eigen::VectorXd& theta) {
    return (y - b * theta).squaredNorm();
}

/// log target for omega in log-space (likelihood + prior + Jacobian), up to a
/// constant. chi^2(nu): (nu/2 - 1) log w - w/2, plus Jacobian log w.
inline double omega_log_target(double omega, double tau, double ssr,
                               const BayesConfig& config) {
    double lp;
    if (config.omega_prior == OmegaPrior::ChiSquared) {
        lp = (0.5 * config.omega_prior_df) * std::log(omega) - 0.5 * omega;
    } else {
        if (omega >= config.omega_uniform_max)
            return -std::numeric_limits<double>::infinity();
        lp = std::log(omega);  // Jacobian only
    }
    return lp - 0.5 * tau * ssr;
}

}  // namespace detail

/**
 * Metropolis-within-Gibbs draws from the posterior of
 *   y_k = theta . B_k(omega) + eps,   eps ~ normal(0, 1/tau).
 *
 * The linear coefficients and tau have conjugate full conditionals and are
 * sampled exactly; omega (trig variants) moves by random-walk Metropolis on
 * log omega. A zero-row design samples the priors.
 */
inline BayesFit sample_posterior(const DesignSystem& design, const BayesConfig& config) {
    config.validate();
    if (design.b.rows() > 0 && (!design.b.allFinite() || !design.y.allFinite()))
        throw std::domain_error("design system contains non-finite entries");

    const auto n_rows = design.b.rows();
    const auto n_coef = design.b.cols();
    const bool trig = is_trigonometric(design.kind);

    Eigen::VectorXd prior_mean = Eigen::VectorXd::Zero(n_coef);
    if (!config.coef_prior_mean.empty()) {
        if (config.coef_prior_mean.size() != static_cast<std::size_t>(n_coef))
            throw std::invalid_argument("coef_prior_mean size does not match design columns");
        for (Eigen::Index i = 0; i < n_coef; ++i)
            prior_mean(i) = config.coef_prior_mean[static_cast<std::size_t>(i)];
    }

    RandomSource rng(config.seed);

    DesignSystem work = design;
    double omega = config.omega_init;
    if (trig) refresh_trig_columns(work, omega);

    // Warm start: LSE solution when identifiable, prior mean otherwise.
    Eigen::VectorXd theta = prior_mean;
    double tau = 1.0;
    if (n_rows > 0) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(work.b);
        if (cod.rank() == n_coef) {
            theta = cod.solve(work.y);
            const double ssr0 = detail::sum_squared_residuals(work.y, work.b, theta);
            const auto dof = n_rows - n_coef;
            if (dof > 0 && ssr0 > 0.0) {
                const double s2 = ssr0 / static_cast<double>(dof);
                if (std::isfinite(s2) && s2 > 0.0) tau = 1.0 / s2;
            }
        }
    }

    // Re-draw from the priors if initialization gives a non-finite likelihood.
    for (int attempt = 0; attempt < 16; ++attempt) {
        const double ssr = detail::sum_squared_residuals(work.y, work.b, theta);
        if (std::isfinite(ssr) && std::isfinite(tau) && tau > 0.0) break;
        if (attempt == 15)
            throw std::runtime_error("sampler initialization failed: non-finite likelihood");
        const double prior_sd = 1.0 / std::sqrt(config.coef_prior_precision);
        for (Eigen::Index i = 0; i < n_coef; ++i)
            theta(i) = rng.normal(prior_mean(i), prior_sd);
        tau = rng.gamma(config.tau_prior_shape, config.tau_prior_rate);
    }

    const std::size_t retained = config.samples - config.burn_in;

    Chain chain;
    chain.names = parameter_names(design.kind);
    if (trig) chain.names.push_back("omega");
    chain.names.push_back("tau");
    chain.names.push_back("deviance");
    chain.draws.assign(chain.names.size(), {});
    for (auto& d : chain.draws) d.reserve(retained);

    // Node layout: coefficients in design-column order, then omega/tau/deviance.
    const std::size_t tau_slot = chain.names.size() - 2;
    const std::size_t dev_slot = chain.names.size() - 1;

    double proposal_sd = config.omega_proposal_sd;
    std::size_t accepted_tuning = 0, proposed_tuning = 0;
    std::size_t accepted_post = 0, proposed_post = 0;

    const Eigen::MatrixXd prior_precision =
        config.coef_prior_precision *
        Eigen::MatrixXd::Identity(n_coef, n_coef);
    double ssr = detail::sum_squared_residuals(work.y, work.b, theta);

    for (std::size_t iter = 0; iter < config.samples; ++iter) {
        // Linear coefficients: conjugate multivariate normal.
        const Eigen::MatrixXd precision =
            prior_precision + tau * (work.b.transpose() * work.b);
        const Eigen::LLT<Eigen::MatrixXd> llt(precision);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("coefficient full conditional is not positive definite");
        const Eigen::VectorXd rhs = config.coef_prior_precision * prior_mean +
                                    tau * (work.b.transpose() * work.y);
        const Eigen::VectorXd mean = llt.solve(rhs);
        Eigen::VectorXd z(n_coef);
        for (Eigen::Index i = 0; i < n_coef; ++i) z(i) = rng.normal();
        theta = mean + llt.matrixU().solve(z);

        // Noise precision: conjugate gamma. Tiny shapes (prior-only sampling)
        // can underflow to zero in double precision; floor at the smallest
        // normal so tau stays positive and log(tau) finite.
        ssr = detail::sum_squared_residuals(work.y, work.b, theta);
        tau = std::max(rng.gamma(config.tau_prior_shape + 0.5 * static_cast<double>(n_rows),
                                 config.tau_prior_rate + 0.5 * ssr),
                       std::numeric_limits<double>::min());

        // Omega: random-walk Metropolis on log omega.
        if (trig) {
            const double log_omega = std::log(omega);
            const double cand = std::exp(log_omega + proposal_sd * rng.normal());
            DesignSystem cand_design = work;
            refresh_trig_columns(cand_design, cand);
            const double cand_ssr =
                detail::sum_squared_residuals(cand_design.y, cand_design.b, theta);
            const double log_ratio = detail::omega_log_target(cand, tau, cand_ssr, config) -
                                     detail::omega_log_target(omega, tau, ssr, config);
            const bool in_burn_in = iter < config.burn_in;
            (in_burn_in ? proposed_tuning : proposed_post)++;
            if (std::log(rng.uniform01()) < log_ratio) {
                omega = cand;
                work.b = cand_design.b;
                work.omega = cand;
                ssr = cand_ssr;
                (in_burn_in ? accepted_tuning : accepted_post)++;
            }
            if (config.adapt_omega_proposal && in_burn_in && proposed_tuning % 25 == 0) {
                const double rate =
                    static_cast<double>(accepted_tuning) / static_cast<double>(proposed_tuning);
                proposal_sd = std::clamp(proposal_sd * std::exp(0.66 * (rate - 0.4)),
                                         1e-4, 10.0);
            }
        }

        if (iter >= config.burn_in) {
            for (Eigen::Index i = 0; i < n_coef; ++i)
                chain.draws[static_cast<std::size_t>(i)].push_back(theta(i));
            if (trig) chain.draws[static_cast<std::size_t>(n_coef)].push_back(omega);
            chain.draws[tau_slot].push_back(tau);
            const double n = static_cast<double>(n_rows);
            constexpr double two_pi = 6.283185307179586476925287;
            chain.draws[dev_slot].push_back(n * std::log(two_pi) - n * std::log(tau) +
                                            tau * ssr);
        }
    }

    if (trig && proposed_post > 0) {
        chain.omega_acceptance =
            static_cast<double>(accepted_post) / static_cast<double>(proposed_post);
        chain.tuning_warning =
            chain.omega_acceptance <= 0.05 || chain.omega_acceptance >= 0.95;
    }

    BayesFit fit;
    fit.summary = summarize(chain);
    fit.chain = std::move(chain);
    return fit;
}

/// Point estimates for prediction: posterior means mapped onto the grey
/// parameter vector by column role.
inline GreyParameters posterior_mean_parameters(const DesignSystem& design,
                                                const PosteriorSummary& summary) {
    GreyParameters params;
    params.kind = design.kind;
    const auto names = parameter_names(design.kind);
    params.a = summary.node("a").mean;
    for (std::size_t i = 1; i < names.size(); ++i)
        params.b.push_back(summary.node(names[i]).mean);
    if (is_trigonometric(design.kind))
        params.omega = summary.node("omega").mean;
    params.tau = summary.node("tau").mean;
    return params;
}

}  // namespace greycast
