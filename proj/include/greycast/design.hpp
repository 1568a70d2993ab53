#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "greycast/model.hpp"
#include "greycast/series.hpp"

namespace greycast {

/**
 * The regression pair (Y, B) for one model variant over one data window.
 *
 * Row k (0-based row k-2) corresponds to target x(0)(k), k = 2..n.
 * Column 1 is always -z(1)(k); trig columns are evaluated at
 * time_indices[row], which defaults to the local window index k.
 */
struct DesignSystem {
    ModelKind kind = ModelKind::GM11;
    Eigen::VectorXd y;
    Eigen::MatrixXd b;
    std::vector<ColumnRole> roles;
    std::vector<double> time_indices;  // t_k feeding sin/cos columns
    double omega = 0.0;                // omega the trig columns were built with
};

/**
 * Builds (Y, B) from a window of observations.
 *
 * `omega` is required for the trigonometric variants (their columns cannot be
 * evaluated without it); pass anything for GM11/GVM, it is ignored.
 * `time_offset` shifts the trig time index: t_k = k + time_offset, so 0 gives
 * the local per-window clock and a caller tracking a global clock passes the
 * window start position.
 */
inline DesignSystem build_design(const ObservationSeries& series, ModelKind kind,
                                 std::optional<double> omega = std::nullopt,
                                 long time_offset = 0) {
    if (series.size() < 2)
        throw std::domain_error("design system requires at least 2 observations");
    validate_positive(series);

    const bool trig = is_trigonometric(kind);
    if (trig) {
        if (!omega)
            throw std::invalid_argument("omega is required for trigonometric model designs");
        if (!std::isfinite(*omega))
            throw std::domain_error("omega must be finite");
    }

    const AccumulatedSeries acc = ago(series);
    const MeanSequence z = mean_sequence(acc);

    DesignSystem design;
    design.kind = kind;
    design.roles = column_roles(kind);
    design.omega = trig ? *omega : 0.0;

    const auto n = static_cast<Eigen::Index>(series.size());
    const auto cols = static_cast<Eigen::Index>(design.roles.size());
    design.y.resize(n - 1);
    design.b.resize(n - 1, cols);
    design.time_indices.reserve(static_cast<std::size_t>(n - 1));

    for (Eigen::Index row = 0; row < n - 1; ++row) {
        const double zk = z.values[static_cast<std::size_t>(row)];
        const double tk = static_cast<double>(row + 2 + time_offset);
        design.y(row) = series.values[static_cast<std::size_t>(row + 1)];
        design.time_indices.push_back(tk);
        for (Eigen::Index col = 0; col < cols; ++col) {
            switch (design.roles[static_cast<std::size_t>(col)]) {
                case ColumnRole::NegMeanZ:     design.b(row, col) = -zk; break;
                case ColumnRole::MeanZSquared: design.b(row, col) = zk * zk; break;
                case ColumnRole::SinOmegaT:    design.b(row, col) = std::sin(design.omega * tk); break;
                case ColumnRole::CosOmegaT:    design.b(row, col) = std::cos(design.omega * tk); break;
                case ColumnRole::Intercept:    design.b(row, col) = 1.0; break;
            }
        }
    }
    return design;
}

/// Rewrites the sin/cos columns of a trig design for a new omega, in place.
/// Used by the Bayesian sampler, whose omega moves during sampling.
inline void refresh_trig_columns(DesignSystem& design, double omega) {
    if (!is_trigonometric(design.kind))
        return;
    design.omega = omega;
    for (Eigen::Index col = 0; col < design.b.cols(); ++col) {
        const ColumnRole role = design.roles[static_cast<std::size_t>(col)];
        if (role != ColumnRole::SinOmegaT && role != ColumnRole::CosOmegaT)
            continue;
        for (Eigen::Index row = 0; row < design.b.rows(); ++row) {
            const double t = design.time_indices[static_cast<std::size_t>(row)];
            design.b(row, col) =
                role == ColumnRole::SinOmegaT ? std::sin(omega * t) : std::cos(omega * t);
        }
    }
}

}  // namespace greycast
