#pragma once

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "mfbounds/error.hpp"
#include "mfbounds/io.hpp"

namespace mfbounds {

struct RunRecord {
    std::string id;
    nlohmann::json config;
    std::vector<std::string> manifest;  // file names relative to `directory`
    std::string directory;
    double seconds = 0.0;
    std::string status;  // "ok" or "failed"
    std::string error;
};

inline nlohmann::json to_json_value(const RunRecord& r) {
    nlohmann::json j{{"id", r.id},           {"config", r.config},   {"manifest", r.manifest},
                     {"directory", r.directory}, {"seconds", r.seconds}, {"status", r.status}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
    RunRecord r;
    r.id = j.at("id").get<std::string>();
    r.config = j.at("config");
    r.manifest = j.at("manifest").get<std::vector<std::string>>();
    r.directory = j.at("directory").get<std::string>();
    r.seconds = j.at("seconds").get<double>();
    r.status = j.at("status").get<std::string>();
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
    return r;
}

// Root holding `runs.jsonl` and one directory per run. MFBOUNDS_RUNS_DIR
// overrides the default `runs`.
inline std::filesystem::path runs_root() {
    if (const char* env = std::getenv("MFBOUNDS_RUNS_DIR"); env && *env) return env;
    return "runs";
}

inline std::filesystem::path registry_file(const std::filesystem::path& root) { return root / "runs.jsonl"; }

// Appends one line under an exclusive lock so concurrent writers never
// interleave records.
inline void registry_append(const std::filesystem::path& root, const RunRecord& record) {
    std::filesystem::create_directories(root);
    const auto file = registry_file(root);
    const std::string line = to_json_value(record).dump() + "\n";
    const int fd = ::open(file.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw Error("cannot open registry " + file.string() + ": " + std::strerror(errno));
    if (::flock(fd, LOCK_EX) != 0) {
        ::close(fd);
        throw Error("cannot lock registry " + file.string());
    }
    std::size_t done = 0;
    while (done < line.size()) {
        const ssize_t w = ::write(fd, line.data() + done, line.size() - done);
        if (w < 0) {
            if (errno == EINTR) continue;
            ::flock(fd, LOCK_UN);
            ::close(fd);
            throw Error("cannot write registry " + file.string());
        }
        done += static_cast<std::size_t>(w);
    }
    ::flock(fd, LOCK_UN);
    ::close(fd);
}

inline std::vector<RunRecord> registry_list(const std::filesystem::path& root) {
    const auto file = registry_file(root);
    if (!std::filesystem::exists(file)) return {};
    std::istringstream in(io::read_file(file));
    std::vector<RunRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            records.push_back(run_record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw LoadError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return records;
}

// The most recent record with this id.
inline RunRecord registry_get(const std::filesystem::path& root, const std::string& id) {
    const auto records = registry_list(root);
    for (auto it = records.rbegin(); it != records.rend(); ++it)
        if (it->id == id) return *it;
    throw NotFoundError("no run with id '" + id + "'");
}

}  // namespace mfbounds
