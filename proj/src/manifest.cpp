#include "bell/manifest.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bell {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view data) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(data);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

std::string fnv1a64_file_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for hashing: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a64_hex(buf.str());
}

std::string RunManifest::json() const {
    nlohmann::ordered_json j;
    j["version"] = version;
    j["command"] = command;
    j["backend"] = backend;
    j["seed"] = seed;
    nlohmann::ordered_json ins = nlohmann::ordered_json::array();
    for (const auto& [path, hash] : inputs) ins.push_back({{"path", path}, {"fnv1a64", hash}});
    j["inputs"] = ins;
    return j.dump();
}

}  // namespace bell
