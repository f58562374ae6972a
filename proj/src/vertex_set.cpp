#include "bell/vertex_set.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bell {

void sort_dedup(VertexSet& vs) {
    std::sort(vs.tables.begin(), vs.tables.end());
    vs.tables.erase(std::unique(vs.tables.begin(), vs.tables.end()), vs.tables.end());
}

void rescale_to(VertexSet& vs, std::int64_t new_denom) {
    if (new_denom == vs.denom) return;
    if (new_denom % vs.denom != 0) throw std::invalid_argument("rescale_to: denominator not a multiple");
    std::int64_t f = new_denom / vs.denom;
    for (auto& t : vs.tables)
        for (auto& v : t) v = static_cast<std::int32_t>(v * f);
    vs.denom = new_denom;
}

VertexSet merge_sets(const std::vector<VertexSet>& sets, const std::string& model_name, bool ns_model) {
    if (sets.empty()) throw std::invalid_argument("merge_sets: no parts");
    VertexSet out;
    out.scenario = sets.front().scenario;
    out.model = model_name;
    out.ns_model = ns_model;
    out.denom = 1;
    for (const auto& s : sets) {
        if (s.scenario != out.scenario) throw std::invalid_argument("merge_sets: scenario mismatch");
        out.denom = std::lcm(out.denom, s.denom);
    }
    std::size_t total = 0;
    for (const auto& s : sets) total += s.size();
    out.tables.reserve(total);
    for (const auto& s : sets) {
        std::int64_t f = out.denom / s.denom;
        for (const auto& t : s.tables) {
            auto scaled = t;
            if (f != 1)
                for (auto& v : scaled) v = static_cast<std::int32_t>(v * f);
            out.tables.push_back(std::move(scaled));
        }
    }
    sort_dedup(out);
    return out;
}

}  // namespace bell
