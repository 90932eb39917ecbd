#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace gkdv {

// 17 significant digits, '.' separator; round-trips doubles exactly.
std::string format_double(double v);

// Atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// rows[i] must have one value per header column; LF line endings.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Canonical serialization (sorted keys, fixed float formatting) of a JSON document.
std::string canonical_json(const nlohmann::json& j);

// FNV-1a 64-bit hex digest of the canonical serialization.
std::string config_hash(const nlohmann::json& config);

struct StageTiming {
    std::string name;
    double seconds;
};

// Writes manifest.json listing the produced files (with sizes), the config hash,
// tool version and per-stage timings.
void write_manifest(const std::filesystem::path& out_dir, const nlohmann::json& config,
                    const std::vector<std::filesystem::path>& files,
                    const std::vector<StageTiming>& timings);

inline const char* tool_version() { return "gkdv-lab 1.0.0"; }

}  // namespace gkdv
