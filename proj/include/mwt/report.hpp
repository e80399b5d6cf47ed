#pragma once

// Report plumbing shared by every module: JSON encodings of cubes and
// non-finite numbers, canonical serialization and the run manifest.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "mwt/grid.hpp"

namespace mwt {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Finite values as numbers; inf, -inf and nan as the strings "inf", "-inf", "nan".
nlohmann::json number_json(double v);
/// Inverse of number_json.
double json_number(const nlohmann::json& j);

/// {grid_id, level, offset, corner, side}; level is null for lattice cubes.
nlohmann::json cube_json(const GridConfig& g, const Cube& q);
nlohmann::json cube_json(const GridConfig& g, const std::optional<Cube>& q);

/// Sorted keys, no whitespace, doubles printed with %.17g. Byte-stable for
/// equal documents.
std::string canonical_dump(const nlohmann::json& j);

struct RunManifest {
  std::string command;
  std::string input;          // path as given
  std::string input_digest;   // FNV-1a 64 of the input bytes, hex
  nlohmann::json parameters;  // every option that influenced the run
  std::string timestamp;      // see reproducible_timestamp

  nlohmann::json to_json() const;
};

std::string fnv1a_hex(const std::string& bytes);
/// UTC ISO-8601 of SOURCE_DATE_EPOCH when set, else of the wall clock.
std::string reproducible_timestamp();

/// Writes `text` to `path`; std::runtime_error when the file cannot be written.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mwt
