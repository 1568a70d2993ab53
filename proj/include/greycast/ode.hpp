#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "greycast/model.hpp"

namespace greycast {

/**
 * The continuous whitenization equation dx/dt + a x = f(t, x) behind a grey
 * model, anchored at x(1) = x0_1. Integrated numerically it provides the
 * independent route against which the closed-form time responses are checked.
 */
struct WhitenizationODE {
    ModelKind kind = ModelKind::GM11;
    GreyParameters parameters;
    double x0_1 = 1.0;

    double forcing(double t, double x) const {
        const auto& p = parameters;
        switch (kind) {
            case ModelKind::GM11:   return p.b1();
            case ModelKind::GVM:    return p.b1() * x * x;
            case ModelKind::GM_SIN: return p.b1() * std::sin(*p.omega * t) + p.b2();
            case ModelKind::GM_COS: return p.b1() * std::cos(*p.omega * t) + p.b2();
            case ModelKind::GM_SINCOS:
                return p.b1() * std::sin(*p.omega * t) + p.b2() * std::cos(*p.omega * t) + p.b3();
        }
        throw std::invalid_argument("unknown model kind");
    }

    double derivative(double t, double x) const { return forcing(t, x) - parameters.a * x; }
};

struct OdeSample {
    double t;
    double x;
};

/**
 * Classical fourth-order Runge-Kutta integration of the whitenization
 * equation from t = 1 to t_end, returning the sampled x(1) trajectory
 * (including both endpoints). Throws on overflow mid-integration.
 */
inline std::vector<OdeSample> ode_oracle(const WhitenizationODE& ode, double t_end,
                                         double step) {
    if (!(step > 0.0))
        throw std::invalid_argument("ode_oracle: step must be positive");
    if (t_end < 1.0)
        throw std::invalid_argument("ode_oracle: t_end must be >= 1");

    std::vector<OdeSample> trajectory;
    const auto n_steps = static_cast<std::size_t>(std::ceil((t_end - 1.0) / step - 1e-12));
    trajectory.reserve(n_steps + 1);

    double t = 1.0;
    double x = ode.x0_1;
    trajectory.push_back({t, x});
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double h = std::min(step, t_end - t);
        const double k1 = ode.derivative(t, x);
        const double k2 = ode.derivative(t + 0.5 * h, x + 0.5 * h * k1);
        const double k3 = ode.derivative(t + 0.5 * h, x + 0.5 * h * k2);
        const double k4 = ode.derivative(t + h, x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        if (!std::isfinite(x) || std::abs(x) > 1e300)
            throw std::runtime_error("ode_oracle: trajectory diverged near t = " +
                                     std::to_string(t));
        trajectory.push_back({t, x});
    }
    return trajectory;
}

/// Convenience: x(1)(t_end) from the RK4 trajectory.
inline double ode_solution_at(const WhitenizationODE& ode, double t_end, double step) {
    return ode_oracle(ode, t_end, step).back().x;
}

}  // namespace greycast
