#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mondrian/estimation.hpp"
#include "mondrian/sampler.hpp"

namespace mondrian {

inline constexpr int kSchemaVersion = 1;

// Shortest decimal form that parses back to the same double; '.' always.
std::string format_double(double v);

nlohmann::json tessellation_to_json(const Tessellation& tess);
// Rejects unknown schema versions and invalid edge structures (1e-9 slack).
Tessellation tessellation_from_json(const nlohmann::json& j);

std::string tessellation_to_svg(const Tessellation& tess, bool color_by_birth = false);

// Writes via a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

std::string csv_line(const std::vector<std::string>& fields);

nlohmann::json moment_report_json(const MomentReport& rep);
nlohmann::json k_report_json(const KReport& rep);
std::string moment_report_csv(const MomentReport& rep);
std::string k_report_csv(const std::vector<KReport>& reps);

}  // namespace mondrian
