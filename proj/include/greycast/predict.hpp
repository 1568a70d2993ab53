#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "greycast/errors.hpp"
#include "greycast/model.hpp"

namespace greycast {

// Closed-form time responses of the whitenization equations
// dx/dt + a x = f(t), anchored at x(1)(1) = x0_1.
//
// For the linear variants the solution is x(1)(t) = C e^{-at} + x_p(t) with
// C = e^{a} (x0_1 - x_p(1)); x_p is the stationary/particular response:
//
//   GM11      x_p = b/a
//   GM_SIN    x_p = b1 (a sin(wt) - w cos(wt)) / (a^2 + w^2) + b2/a
//   GM_COS    x_p = b1 (w sin(wt) + a cos(wt)) / (a^2 + w^2) + b2/a
//   GM_SINCOS x_p = ((a b1 + w b2) sin(wt) + (a b2 - w b1) cos(wt)) / (a^2 + w^2)
//             + b3/a
//
// The Verhulst equation dx/dt + a x = b x^2 has the exact logistic solution
//   x(1)(t) = a x0_1 / (b x0_1 + (a - b x0_1) e^{a(t-1)}).
//
// One-step predictions difference the accumulated response:
//   x_hat(0)(k+1) = x(1)(k+1) - x(1)(k).

namespace detail {

inline void require_development_coefficient(const GreyParameters& params) {
    if (!std::isfinite(params.a) || std::abs(params.a) < kEpsilonA)
        throw SingularityError("development coefficient a = " + std::to_string(params.a) +
                               " is below the admissible magnitude " +
                               std::to_string(kEpsilonA));
}

/// Particular solution x_p(t) of the linear whitenization equations.
inline double particular_solution(const GreyParameters& params, double t) {
    const double a = params.a;
    switch (params.kind) {
        case ModelKind::GM11:
            return params.b1() / a;
        case ModelKind::GM_SIN: {
            const double w = *params.omega;
            const double d = a * a + w * w;
            return params.b1() * (a * std::sin(w * t) - w * std::cos(w * t)) / d +
                   params.b2() / a;
        }
        case ModelKind::GM_COS: {
            const double w = *params.omega;
            const double d = a * a + w * w;
            return params.b1() * (w * std::sin(w * t) + a * std::cos(w * t)) / d +
                   params.b2() / a;
        }
        case ModelKind::GM_SINCOS: {
            const double w = *params.omega;
            const double d = a * a + w * w;
            return ((a * params.b1() + w * params.b2()) * std::sin(w * t) +
                    (a * params.b2() - w * params.b1()) * std::cos(w * t)) /
                       d +
                   params.b3() / a;
        }
        case ModelKind::GVM:
            break;
    }
    throw SingularityError("no particular solution for this model kind");
}

inline double verhulst_x1(const GreyParameters& params, double x0_1, double t) {
    const double a = params.a;
    const double b = params.b1();
    const double lead = b * x0_1;
    const double tail = (a - b * x0_1) * std::exp(a * (t - 1.0));
    const double den = lead + tail;
    if (std::abs(den) < 1e-12 * (std::abs(lead) + std::abs(tail)) || den == 0.0)
        throw SingularityError("Verhulst denominator vanishes at t = " + std::to_string(t));
    return a * x0_1 / den;
}

}  // namespace detail

/// Homogeneous-term constant C = e^{a} (x0_1 - x_p(1)) fixed by the initial
/// condition (linear variants only).
inline double integration_constant(const GreyParameters& params, double x0_1) {
    detail::require_development_coefficient(params);
    if (params.kind == ModelKind::GVM)
        throw SingularityError("the Verhulst response has no integration constant C");
    return std::exp(params.a) * (x0_1 - detail::particular_solution(params, 1.0));
}

/// Closed-form accumulated response x(1)(t) for any model kind.
inline double time_response(const GreyParameters& params, double x0_1, double t) {
    detail::require_development_coefficient(params);
    if (params.kind == ModelKind::GVM)
        return detail::verhulst_x1(params, x0_1, t);
    const double c = std::exp(params.a) * (x0_1 - detail::particular_solution(params, 1.0));
    const double x = c * std::exp(-params.a * t) + detail::particular_solution(params, t);
    if (!std::isfinite(x))
        throw SingularityError("time response overflowed at t = " + std::to_string(t));
    return x;
}

namespace detail {

inline double differenced_prediction(const GreyParameters& params, double x0_1, int k) {
    if (k < 1)
        throw SingularityError("prediction index k must be >= 1");
    const double x0_hat = time_response(params, x0_1, static_cast<double>(k) + 1.0) -
                          time_response(params, x0_1, static_cast<double>(k));
    if (!std::isfinite(x0_hat))
        throw SingularityError("prediction overflowed at k = " + std::to_string(k));
    return x0_hat;
}

inline void require_kind(const GreyParameters& params, ModelKind kind) {
    if (params.kind != kind)
        throw std::invalid_argument("parameters were fit for " + model_name(params.kind) +
                                    ", not " + model_name(kind));
}

}  // namespace detail

/// x_hat(0)(k+1) for GM(1,1): (1 - e^a)(x0_1 - b/a) e^{-ak}.
inline double predict_gm11(const GreyParameters& params, double x0_1, int k) {
    detail::require_kind(params, ModelKind::GM11);
    return detail::differenced_prediction(params, x0_1, k);
}

inline double predict_gvm(const GreyParameters& params, double x0_1, int k) {
    detail::require_kind(params, ModelKind::GVM);
    return detail::differenced_prediction(params, x0_1, k);
}

inline double predict_gm_sin(const GreyParameters& params, double x0_1, int k) {
    detail::require_kind(params, ModelKind::GM_SIN);
    return detail::differenced_prediction(params, x0_1, k);
}

inline double predict_gm_cos(const GreyParameters& params, double x0_1, int k) {
    detail::require_kind(params, ModelKind::GM_COS);
    return detail::differenced_prediction(params, x0_1, k);
}

inline double predict_gm_sincos(const GreyParameters& params, double x0_1, int k) {
    detail::require_kind(params, ModelKind::GM_SINCOS);
    return detail::differenced_prediction(params, x0_1, k);
}

/// Dispatches to the predictor matching params.kind.
inline double predict_one(const GreyParameters& params, double x0_1, int k) {
    return detail::differenced_prediction(params, x0_1, k);
}

/// One prediction step with its integration constant where the model has one.
struct PredictionStep {
    int k = 0;
    double x0_hat = 0.0;
    std::optional<double> c;
};

inline PredictionStep predict_step(const GreyParameters& params, double x0_1, int k) {
    PredictionStep step;
    step.k = k;
    step.x0_hat = predict_one(params, x0_1, k);
    if (params.kind == ModelKind::GM_COS || params.kind == ModelKind::GM_SINCOS)
        step.c = integration_constant(params, x0_1);
    return step;
}

}  // namespace greycast
