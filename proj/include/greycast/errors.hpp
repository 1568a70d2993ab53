#pragma once

#include <stdexcept>
#include <string>

namespace greycast {

/// Thrown when a prediction equation hits a vanishing denominator or
/// produces a non-finite value; the rolling engine catches this and
/// falls back to persistence.
class SingularityError : public std::runtime_error {
public:
    explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace greycast
