#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "greycast/design.hpp"
#include "greycast/model.hpp"

namespace greycast {

/**
 * Least-squares fit of a design system.
 *
 * Solved through a complete orthogonal factorization rather than the normal
 * equations, so near-collinear trig columns do not lose precision; a
 * rank-deficient B yields the minimum-norm minimizer with rank_warning set.
 */
inline GreyParameters solve_lse(const DesignSystem& design) {
    if (!design.b.allFinite() || !design.y.allFinite())
        throw std::domain_error("design system contains non-finite entries");
    if (design.b.rows() == 0)
        throw std::domain_error("design system has no rows");
    if (design.roles.size() != static_cast<std::size_t>(design.b.cols()))
        throw std::invalid_argument("design roles do not match its column count");

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design.b);
    if (cod.rank() == 0)
        throw std::domain_error("design matrix has rank 0 (all-zero regressors)");
    const Eigen::VectorXd theta = cod.solve(design.y);

    GreyParameters params;
    params.kind = design.kind;
    params.rank_warning = cod.rank() < design.b.cols();
    if (is_trigonometric(design.kind))
        params.omega = design.omega;

    // Column 1 stores -z, so its coefficient is the development coefficient a.
    for (Eigen::Index col = 0; col < theta.size(); ++col) {
        if (design.roles[static_cast<std::size_t>(col)] == ColumnRole::NegMeanZ)
            params.a = theta(col);
        else
            params.b.push_back(theta(col));
    }
    return params;
}

/**
 * Snaps |a| < kEpsilonA to sign(a)*kEpsilonA so the prediction equations'
 * b/a and e^a terms stay representable. Returns true if a snap happened
 * (callers record a warning).
 */
inline bool snap_development_coefficient(GreyParameters& params) {
    if (std::abs(params.a) >= kEpsilonA)
        return false;
    params.a = params.a < 0.0 ? -kEpsilonA : kEpsilonA;
    return true;
}

}  // namespace greycast
