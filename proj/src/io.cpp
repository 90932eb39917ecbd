#include "gkdv/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gkdv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << contents;
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    for (std::size_t j = 0; j < header.size(); ++j)
        os << header[j] << (j + 1 < header.size() ? "," : "");
    os << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("write_csv: row width != header width");
        for (std::size_t j = 0; j < row.size(); ++j)
            os << format_double(row[j]) << (j + 1 < row.size() ? "," : "");
        os << "\n";
    }
    write_file_atomic(path, os.str());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

namespace {

void canonical_impl(const nlohmann::json& j, std::ostringstream& os) {
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            os << '{';
            // nlohmann::json objects iterate in sorted key order already
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ',';
                first = false;
                os << '"' << it.key() << "\":";
                canonical_impl(it.value(), os);
            }
            os << '}';
            break;
        }
        case nlohmann::json::value_t::array: {
            os << '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ',';
                canonical_impl(j[i], os);
            }
            os << ']';
            break;
        }
        case nlohmann::json::value_t::number_float:
            os << format_double(j.get<double>());
            break;
        default:
            os << j.dump();
    }
}

}  // namespace

std::string canonical_json(const nlohmann::json& j) {
    std::ostringstream os;
    canonical_impl(j, os);
    return os.str();
}

std::string config_hash(const nlohmann::json& config) {
    std::string s = canonical_json(config);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

void write_manifest(const std::filesystem::path& out_dir, const nlohmann::json& config,
                    const std::vector<std::filesystem::path>& files,
                    const std::vector<StageTiming>& timings) {
    nlohmann::json m;
    m["config_hash"] = config_hash(config);
    m["tool_version"] = tool_version();
    nlohmann::json fl = nlohmann::json::array();
    for (const auto& f : files) {
        if (!std::filesystem::exists(f))
            throw std::runtime_error("manifest lists missing file: " + f.string());
        fl.push_back({{"name", f.filename().string()},
                      {"size", std::uintmax_t(std::filesystem::file_size(f))}});
    }
    m["files"] = fl;
    nlohmann::json tl = nlohmann::json::array();
    for (const auto& t : timings) tl.push_back({{"stage", t.name}, {"seconds", t.seconds}});
    m["timings"] = tl;
    write_json(out_dir / "manifest.json", m);
}

}  // namespace gkdv
