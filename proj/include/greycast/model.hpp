#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace greycast {

/// Development coefficients with |a| below this are snapped (with a warning)
/// before prediction, so b/a and e^a terms stay representable.
inline constexpr double kEpsilonA = 1e-8;

enum class ModelKind {
    GM11,      // dx/dt + a x = b
    GVM,       // dx/dt + a x = b x^2           (grey Verhulst)
    GM_SIN,    // dx/dt + a x = b1 sin(wt) + b2
    GM_COS,    // dx/dt + a x = b1 cos(wt) + b2
    GM_SINCOS  // dx/dt + a x = b1 sin(wt) + b2 cos(wt) + b3
};

inline bool is_trigonometric(ModelKind kind) {
    return kind == ModelKind::GM_SIN || kind == ModelKind::GM_COS ||
           kind == ModelKind::GM_SINCOS;
}

inline std::string model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::GM11:      return "gm11";
        case ModelKind::GVM:       return "gvm";
        case ModelKind::GM_SIN:    return "gm_sin";
        case ModelKind::GM_COS:    return "gm_cos";
        case ModelKind::GM_SINCOS: return "gm_sincos";
    }
    return "unknown";
}

inline ModelKind parse_model(const std::string& name) {
    if (name == "gm11") return ModelKind::GM11;
    if (name == "gvm") return ModelKind::GVM;
    if (name == "gm_sin") return ModelKind::GM_SIN;
    if (name == "gm_cos") return ModelKind::GM_COS;
    if (name == "gm_sincos") return ModelKind::GM_SINCOS;
    throw std::invalid_argument("unknown model name: " + name);
}

/// Which parameter a design-matrix column estimates.
enum class ColumnRole {
    NegMeanZ,      // -z(1)(k); coefficient is the development coefficient a
    MeanZSquared,  // z(1)(k)^2 (Verhulst forcing); coefficient is b
    SinOmegaT,     // sin(w t_k); coefficient is b1
    CosOmegaT,     // cos(w t_k); coefficient is b1 (COS) or b2 (SINCOS)
    Intercept      // constant 1; coefficient is b, b2 or b3
};

inline std::vector<ColumnRole> column_roles(ModelKind kind) {
    switch (kind) {
        case ModelKind::GM11:
            return {ColumnRole::NegMeanZ, ColumnRole::Intercept};
        case ModelKind::GVM:
            return {ColumnRole::NegMeanZ, ColumnRole::MeanZSquared};
        case ModelKind::GM_SIN:
            return {ColumnRole::NegMeanZ, ColumnRole::SinOmegaT, ColumnRole::Intercept};
        case ModelKind::GM_COS:
            return {ColumnRole::NegMeanZ, ColumnRole::CosOmegaT, ColumnRole::Intercept};
        case ModelKind::GM_SINCOS:
            return {ColumnRole::NegMeanZ, ColumnRole::SinOmegaT, ColumnRole::CosOmegaT,
                    ColumnRole::Intercept};
    }
    throw std::invalid_argument("unknown model kind");
}

/// Parameter names per column, in design-column order: a first, then the
/// b-coefficients as named in the model equations.
inline std::vector<std::string> parameter_names(ModelKind kind) {
    switch (kind) {
        case ModelKind::GM11:
        case ModelKind::GVM:
            return {"a", "b"};
        case ModelKind::GM_SIN:
        case ModelKind::GM_COS:
            return {"a", "b1", "b2"};
        case ModelKind::GM_SINCOS:
            return {"a", "b1", "b2", "b3"};
    }
    throw std::invalid_argument("unknown model kind");
}

/**
 * Estimated grey parameters for one window fit.
 *
 * `b` holds the forcing coefficients in equation order: {b} for GM11/GVM,
 * {b1, b2} for the single-trig models, {b1, b2, b3} for GM_SINCOS.
 * `tau` is the noise precision and is only present on Bayesian fits.
 */
struct GreyParameters {
    ModelKind kind = ModelKind::GM11;
    double a = 0.0;
    std::vector<double> b;
    std::optional<double> omega;
    std::optional<double> tau;
    bool rank_warning = false;

    double b1() const { return b.at(0); }
    double b2() const { return b.at(1); }
    double b3() const { return b.at(2); }

    /// The constant forcing term (b, b2 or b3 depending on the variant).
    double intercept() const { return b.back(); }

    bool finite() const {
        if (!std::isfinite(a)) return false;
        for (double v : b)
            if (!std::isfinite(v)) return false;
        if (omega && !std::isfinite(*omega)) return false;
        return true;
    }
};

}  // namespace greycast
