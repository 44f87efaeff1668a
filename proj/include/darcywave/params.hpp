#pragma once

#include <cmath>

#include "darcywave/errors.hpp"

namespace darcywave {

/// Nondimensional parameters: inverse Froude number g, wave speed c, conformal depth h.
struct PhysicalParams {
    double g = 1.0;
    double c = 1.0;
    double h = 1.0;

    /// Throws unless g >= 0, h > 0 and at least one of g > 0, c != 0 holds.
    void validate() const {
        if (!std::isfinite(g) || !std::isfinite(c) || !std::isfinite(h))
            throw DomainError("PhysicalParams: non-finite value");
        if (g < 0.0) throw DomainError("PhysicalParams: g must be nonnegative");
        if (!(h > 0.0)) throw DomainError("PhysicalParams: h must be positive");
        if (!(g > 0.0) && c == 0.0) throw SingularOperatorError("PhysicalParams: g = c = 0 leaves no ellipticity gate");
    }

    bool operator==(const PhysicalParams&) const = default;
};

}  // namespace darcywave
