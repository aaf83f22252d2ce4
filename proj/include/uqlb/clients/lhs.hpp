#pragma once

#include <cstdint>
#include <vector>

#include "uqlb/parameter_box.hpp"

namespace uqlb::clients {

enum class LhsPlacement { Midpoint, Jittered };

// n points in the box; in every dimension each of the n equal strata holds
// exactly one point. Strata are assigned by an independent seeded
// permutation per dimension.
std::vector<std::vector<double>> lhs_sample(const ParameterBox& box, std::size_t n, std::uint64_t seed,
                                            LhsPlacement placement = LhsPlacement::Midpoint);

}  // namespace uqlb::clients
