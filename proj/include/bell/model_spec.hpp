#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "bell/scenario.hpp"

namespace bell {

enum class ModelKind {
    Local,     // L[n]
    Sv21,      // SV[2|1]: biseparable, unrestricted (two-way signaling) bipartite blocks
    PtoPair,   // PTO[A<B]: one grouping, one-way signaling block, fixed direction
    PtoOrder,  // PTO[order=A<B<C]: the three directed pairs consistent with a total order
    PtoFull,   // PTO[2/1]: all groupings and directions
    NsPair,    // NS[A,B]: one grouping, non-signaling bipartite block
    Ns21,      // NS[2/1]: all three pair groupings
    Ns22,      // NS[2/2]: n=4, two-vs-two groupings
    Ns31,      // NS[3/1]:ns3=<path>: n=4, three-vs-one groupings, tripartite NS vertices from file
    Hull,      // HULL(spec;spec;...): union of constituent vertex sets
};

struct ModelParseError : std::runtime_error {
    std::size_t position;
    ModelParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

struct ModelSpec {
    ModelKind kind = ModelKind::Local;
    Scenario scenario{2};
    int signaler = -1, receiver = -1;      // PtoPair
    std::vector<int> order;                // PtoOrder: party indices in temporal order
    int pair_a = -1, pair_b = -1;          // NsPair
    std::vector<ModelSpec> parts;          // Hull
    std::string ns3_path;                  // Ns31

    // True when every vertex of the model is non-signaling, so the correlator
    // embedding is faithful and the LP may run in correlator space.
    bool is_ns() const {
        switch (kind) {
            case ModelKind::Local:
            case ModelKind::NsPair:
            case ModelKind::Ns21:
            case ModelKind::Ns22:
            case ModelKind::Ns31:
                return true;
            case ModelKind::Hull:
                for (const auto& p : parts)
                    if (!p.is_ns()) return false;
                return true;
            default:
                return false;
        }
    }

    std::string str() const;
};

// Grammar: "L[3]" | "SV[2|1]" | "PTO[A<B]" | "PTO[order=B<C<A]" | "PTO[2/1]"
//        | "NS[A,B]" | "NS[2/1]" | "NS[2/2]" | "NS[3/1]:ns3=<path>"
//        | "HULL(spec;spec;...)"
// Unknown tokens are hard errors with a position.
ModelSpec parse_model(const std::string& text);

}  // namespace bell
