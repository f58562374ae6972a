#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bell/behavior.hpp"
#include "bell/correlators.hpp"

namespace bell {

// Extreme points of a correlation model, stored exactly as integer numerator
// tables over one common denominator. All catalog models have tiny dyadic
// entries, so this keeps even the NS[3/1] stretch set (860k points) compact
// while preserving exact dedup and exact LP columns.
struct VertexSet {
    Scenario scenario{1};
    std::string model = "POINTS";
    bool ns_model = false;
    std::int64_t denom = 1;
    std::vector<std::vector<std::int32_t>> tables;

    std::size_t size() const { return tables.size(); }

    Rat entry(std::size_t v, int cell) const { return Rat(tables[v][cell], denom); }

    BehaviorQ behavior(std::size_t v) const {
        BehaviorQ b(scenario);
        for (int i = 0; i < scenario.cells(); ++i) b.p[i] = entry(v, i);
        return b;
    }

    CorrelatorVector<Rat> correlators(std::size_t v) const { return to_correlators(behavior(v)); }
};

// Sorts lexicographically and removes exact duplicates.
void sort_dedup(VertexSet& vs);

// Rescales numerators to a multiple of the current denominator.
void rescale_to(VertexSet& vs, std::int64_t new_denom);

// Concatenates sets over a common denominator (lcm), then sort_dedup.
VertexSet merge_sets(const std::vector<VertexSet>& sets, const std::string& model_name, bool ns_model);

}  // namespace bell
