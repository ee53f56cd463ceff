#pragma once

#include "maslov/symplectic.hpp"

#include <cstdint>
#include <vector>

namespace maslov {

/// Halton points in the box center + [-half_width, half_width]^dim. Deterministic.
std::vector<PhasePoint> halton_points(int dim, std::size_t count, const Vector& center, double half_width,
                                      std::size_t skip = 20);

}  // namespace maslov
