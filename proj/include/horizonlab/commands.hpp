#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "horizonlab/config.hpp"

namespace hzl {

struct OutputFile {
    std::string name;     // relative to the output directory
    std::string content;
};

// Table commands; each returns the files it would write.
std::vector<OutputFile> cmd_poles(const RunConfig& cfg);
std::vector<OutputFile> cmd_greens(const RunConfig& cfg);
std::vector<OutputFile> cmd_scattering(const RunConfig& cfg);
std::vector<OutputFile> cmd_twopoint(const RunConfig& cfg);
std::vector<OutputFile> cmd_radiation(const RunConfig& cfg);

// Canonical text of the settings a command depends on, plus the code version.
std::string cache_identity(const std::string& command, const RunConfig& cfg);
std::string sha256_hex(const std::string& data);

// Content-addressed store of command outputs. Entries carry a digest of
// their payload; a mismatch is reported as CacheCorruption and the entry is
// treated as missing.
class ResultCache {
public:
    explicit ResultCache(std::string dir) : dir_(std::move(dir)) {}
    std::string path_for(const std::string& key) const;
    // Throws CacheCorruption for damaged entries.
    std::optional<std::vector<OutputFile>> load(const std::string& key) const;
    void store(const std::string& key, const std::vector<OutputFile>& files) const;

private:
    std::string dir_;
};

struct CachedResult {
    std::vector<OutputFile> files;
    bool from_cache = false;
    std::vector<std::string> warnings;
};
// Runs `compute` unless a sound cache entry for (command, cfg) exists.
CachedResult run_cached(const std::string& command, const RunConfig& cfg, const ResultCache* cache,
                        const std::function<std::vector<OutputFile>()>& compute);

void write_outputs(const std::string& dir, const std::vector<OutputFile>& files);

}  // namespace hzl
