#include "uqlb/parameter_box.hpp"

#include "uqlb/error.hpp"

namespace uqlb {

void ParameterBox::validate() const {
  if (dims.empty()) throw Error(ErrorCode::InvalidArgument, "parameter box has no dimensions");
  for (const auto& d : dims) {
    if (!(d.min < d.max)) {
      throw Error(ErrorCode::InvalidArgument, "parameter '" + d.name + "' needs min < max");
    }
  }
}

bool ParameterBox::contains(const std::vector<double>& x) const {
  if (x.size() != dims.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < dims[i].min || x[i] > dims[i].max) return false;
  }
  return true;
}

ParameterBox gs2_parameter_box() {
  return ParameterBox{{
      {"safety_factor", 2.0, 9.0},
      {"magnetic_shear", 0.0, 5.0},
      {"electron_density_gradient", 0.0, 10.0},
      {"electron_temperature_gradient", 0.5, 6.0},
      {"plasma_beta", 0.0, 0.3},
      {"collision_frequency", 0.0, 0.1},
      {"binormal_wavelength", 0.0, 1.0},
  }};
}

ParameterBox parameter_box_from_json(const nlohmann::json& j) {
  const auto& dims = j.is_object() && j.contains("dims") ? j["dims"] : j;
  if (!dims.is_array()) throw Error(ErrorCode::InvalidArgument, "parameter box must be a list of {name,min,max}");
  ParameterBox box;
  for (const auto& d : dims) {
    try {
      box.dims.push_back({d.value("name", "x" + std::to_string(box.dims.size())), d.at("min").get<double>(),
                          d.at("max").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, std::string("parameter box: ") + e.what());
    }
  }
  box.validate();
  return box;
}

nlohmann::json parameter_box_to_json(const ParameterBox& box) {
  nlohmann::json dims = nlohmann::json::array();
  for (const auto& d : box.dims) dims.push_back({{"name", d.name}, {"min", d.min}, {"max", d.max}});
  return {{"dims", dims}};
}

}  // namespace uqlb
