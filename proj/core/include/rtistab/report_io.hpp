#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "rtistab/realize.hpp"

namespace rtistab {

struct PlantSpec {
  std::string label;
  RationalTF tf;
};

// Accepts either {"numerator": [...], "denominator": [...]} or
// {"zeros": [{re,im}...], "poles": [{re,im}...], "gain": g}, with an
// optional "label". Exactly one representation must be present and the
// plant must be proper; violations throw InvalidInput naming the field.
[[nodiscard]] PlantSpec parse_plant_spec(const nlohmann::json& j);
[[nodiscard]] PlantSpec load_plant_spec(const std::filesystem::path& path);

// Serialized design report. Doubles round-trip exactly (shortest-exact
// encoding, up to 17 significant digits).
[[nodiscard]] nlohmann::json report_to_json(const DesignResult& result,
                                            std::uint64_t rng_seed);

struct LoadedReport {
  CoprimeFactorization factorization;
  UProduct u;
  RationalTF controller;
  VerificationReport verification;
  PipReport pip;
};

[[nodiscard]] LoadedReport report_from_json(const nlohmann::json& j);
[[nodiscard]] LoadedReport load_report(const std::filesystem::path& path);

// Atomic file writes (temp + rename in the target directory).
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j);

[[nodiscard]] std::string tool_version();

}  // namespace rtistab
