#pragma once

// Internal JSON bridge shared by the scenario loader and the experiment config loaders.

#include <json.hpp>

#include <string>
#include <vector>

#include "fbgather/scenario.hpp"

namespace fbgather::detail {

/// Sets `a.b.c` in `doc` to `value`, parsing value as JSON when possible and as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& scenario);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace fbgather::detail
