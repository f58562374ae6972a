#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bell {

inline constexpr const char* kToolVersion = "bellpoly 1.0.0";

std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);
std::string fnv1a64_file_hex(const std::string& path);  // throws on missing file

// Provenance embedded in every output artifact. Wall time is reported on the
// command's stderr stream, not stored here: artifacts must be byte-identical
// across reruns of the same command + inputs + seed.
struct RunManifest {
    std::string version = kToolVersion;
    std::string command;
    std::string backend;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;  // (path, fnv1a64 hex)

    std::string json() const;  // single-line JSON object
};

}  // namespace bell
