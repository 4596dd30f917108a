#pragma once

#include <yaml-cpp/yaml.h>

#include "weyl/region.hpp"
#include "weyl/symbol.hpp"

namespace weyl {

Region region_from_node(const YAML::Node& node);
SymbolSpec symbol_from_node(const YAML::Node& node);

}  // namespace weyl
