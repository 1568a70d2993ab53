#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace greycast {

/**
 * Raw positive observation series x(0), e.g. speeds in mph.
 * Timestamps are optional carry-along metadata; the math never reads them.
 *
 * Indexing note: the grey-model literature is 1-based (x(0)(1)..x(0)(n));
 * vectors here are 0-based, so x(0)(k) lives at values[k-1].
 */
struct ObservationSeries {
    std::vector<double> values;
    std::vector<double> timestamps;  // empty or same length as values

    std::size_t size() const { return values.size(); }
};

/// First-order accumulated series x(1) (running prefix sums of x(0)).
struct AccumulatedSeries {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Adjacent-mean sequence z(1)(k) = (x(1)(k-1) + x(1)(k)) / 2, k = 2..n.
struct MeanSequence {
    std::vector<double> values;  // values[i] holds z(1)(i+2)

    std::size_t size() const { return values.size(); }
};

inline void validate_positive(const ObservationSeries& series) {
    if (series.values.empty())
        throw std::domain_error("observation series is empty");
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        const double v = series.values[i];
        if (!std::isfinite(v) || v <= 0.0)
            throw std::domain_error("observation series requires positive values; element " +
                                    std::to_string(i + 1) + " is " + std::to_string(v));
    }
}

/// Accumulating generation operator: result[k] = sum of series[1..k].
inline AccumulatedSeries ago(const ObservationSeries& series) {
    validate_positive(series);
    AccumulatedSeries acc;
    acc.values.reserve(series.size());
    double sum = 0.0;
    for (double v : series.values) {
        sum += v;
        acc.values.push_back(sum);
    }
    return acc;
}

/// Inverse AGO (first differencing): exactly inverts ago().
inline ObservationSeries iago(const AccumulatedSeries& acc) {
    if (acc.values.empty())
        throw std::domain_error("accumulated series is empty");
    ObservationSeries out;
    out.values.reserve(acc.size());
    out.values.push_back(acc.values.front());
    for (std::size_t k = 1; k < acc.values.size(); ++k)
        out.values.push_back(acc.values[k] - acc.values[k - 1]);
    return out;
}

/// Adjacent-mean sequence of an accumulated series; length n-1.
inline MeanSequence mean_sequence(const AccumulatedSeries& acc) {
    if (acc.values.size() < 2)
        throw std::domain_error("mean sequence requires at least 2 accumulated values");
    MeanSequence z;
    z.values.reserve(acc.size() - 1);
    for (std::size_t k = 1; k < acc.values.size(); ++k)
        z.values.push_back(0.5 * (acc.values[k - 1] + acc.values[k]));
    return z;
}

}  // namespace greycast
