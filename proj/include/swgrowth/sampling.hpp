#pragma once

#include <numbers>
#include <random>

#include "swgrowth/core.hpp"

namespace swgrowth {

/// One parameter draw: lambda in (-0.95, 0.95), theta away from 0 and 2pi,
/// offset components in [-1, 1], r in [0, 1.5].
inline SystemParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> angle(0.05, 2.0 * std::numbers::pi - 0.05);
    std::uniform_real_distribution<double> radius(0.0, 1.5);
    const double lambda = 0.95 * unit(rng);
    const double theta = angle(rng);
    const Vec2 offset0{unit(rng), unit(rng)};
    const double r = radius(rng);
    const double phi = std::numbers::pi * unit(rng);
    return SystemParams::from_polar(lambda, theta, offset0, r, phi);
}

/// Offset with components uniform in [-1, 1].
inline Vec2 random_offset(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double x = unit(rng);
    return {x, unit(rng)};
}

}  // namespace swgrowth
