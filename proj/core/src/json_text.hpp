#pragma once

#include <string>

#include "json.hpp"

namespace wqkd::detail {

using Json = nlohmann::ordered_json;

// Like Json::dump, but floats are written with %.17g and non-finite floats as null.
std::string dump_json(const Json& value, int indent = 2);

}  // namespace wqkd::detail
