// serialize.hpp - JSON form of operators: {dim, re, im} with flat row-major arrays

#pragma once

#include <json.hpp>

#include "meanforce/operator.hpp"

namespace meanforce {

nlohmann::json operator_to_json(const Matrix& m);
Matrix operator_from_json(const nlohmann::json& j);

}  // namespace meanforce
