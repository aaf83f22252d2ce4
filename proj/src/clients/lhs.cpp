#include "uqlb/clients/lhs.hpp"

#include <numeric>

#include "uqlb/distribution.hpp"
#include "uqlb/error.hpp"

namespace uqlb::clients {

std::vector<std::vector<double>> lhs_sample(const ParameterBox& box, std::size_t n, std::uint64_t seed,
                                            LhsPlacement placement) {
  box.validate();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "lhs_sample needs n >= 1");
  std::vector<std::vector<double>> points(n, std::vector<double>(box.size()));
  Rng rng(seed);
  std::vector<std::size_t> strata(n);
  for (std::size_t d = 0; d < box.size(); ++d) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(strata[i - 1], strata[rng.below(i)]);
    const auto& range = box.dims[d];
    const double width = (range.max - range.min) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double offset = placement == LhsPlacement::Midpoint ? 0.5 : rng.uniform01();
      points[i][d] = range.min + (static_cast<double>(strata[i]) + offset) * width;
    }
  }
  return points;
}

}  // namespace uqlb::clients
