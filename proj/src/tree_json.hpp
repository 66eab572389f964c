#pragma once

#include <json.hpp>

#include "trees.hpp"

namespace survkit::detail {

nlohmann::ordered_json tree_to_json_obj(const TreeNode& node);
std::unique_ptr<TreeNode> tree_from_json_obj(const nlohmann::json& j);

}  // namespace survkit::detail
