#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace uqlb {

struct ParameterRange {
  std::string name;
  double min = 0.0;
  double max = 1.0;
};

// Axis-aligned box of named parameters; min < max in every dimension.
struct ParameterBox {
  std::vector<ParameterRange> dims;

  std::size_t size() const noexcept { return dims.size(); }
  void validate() const;
  bool contains(const std::vector<double>& x) const;
};

// The seven inputs varied in the gyrokinetic study, in their published bounds.
ParameterBox gs2_parameter_box();

ParameterBox parameter_box_from_json(const nlohmann::json& j);
nlohmann::json parameter_box_to_json(const ParameterBox& box);

}  // namespace uqlb
