#pragma once

#include "bell/model_spec.hpp"
#include "bell/vertex_set.hpp"

namespace bell {

enum class PairKind {
    OneWay,         // first party signals second: a = f(x), b = g(x,y); 64 points
    TwoWay,         // unrestricted deterministic: a = f(x,y), b = g(x,y); 256 points
    NonSignaling,   // bipartite NS extremals: 16 local deterministic + 8 PR boxes
};

// All deterministic strategies (one output function per party): 4^n points.
VertexSet local_vertices(Scenario s);

// Extremal bipartite blocks used to assemble biseparable models.
VertexSet bipartite_blocks(PairKind kind);

// Reads a tripartite NS vertex file (vertex file format, n=3) for NS[3/1].
VertexSet read_ns3_file(const std::string& path);

// Deduplicated vertex set of a model: union over allowed groupings of tensor
// products of group-extremal points with single-party deterministic points.
VertexSet build_vertices(const ModelSpec& spec);

}  // namespace bell
