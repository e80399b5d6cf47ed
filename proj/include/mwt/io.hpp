#pragma once

// Weight files and CSV tables.
//
// A weight file is one JSON document
//   {"d", "nu", "L_max", "resolution", "p": [...], "omega": [...], "sigma": [[...], ...]}
// with optional "p_total" (declared joint exponent) and "f" (test functions,
// one flat array per sigma). Arrays are row-major over the finest lattice.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwt/grid.hpp"
#include "mwt/weights.hpp"

namespace mwt {

/// ValidationError naming the key on a missing or mistyped entry.
WeightInput parse_weight_input(const nlohmann::json& j);

struct LoadedInput {
  WeightInput input;
  std::string bytes;  // raw file contents, for the manifest digest
};

/// ValidationError("input", ...) when the file is unreadable or not JSON.
LoadedInput read_weight_file(const std::filesystem::path& path);

nlohmann::json weight_input_json(const WeightInput& in);
WeightInput to_input(const WeightSystem& ws, const std::vector<std::vector<double>>& f = {});

/// cell,x_0,...,x_{d-1},<columns...> with one row per lattice cell.
std::string cell_csv(const GridConfig& g, const std::vector<std::string>& names,
                     const std::vector<std::span<const double>>& columns);

/// omega and every sigma_i as columns.
std::string weights_csv(const WeightSystem& ws);

}  // namespace mwt
