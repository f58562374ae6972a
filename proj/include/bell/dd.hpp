#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bell/rational.hpp"

namespace bell {

struct LinearInequality {
    std::vector<Rat> a;  // a.x <= b
    Rat b = 0;
};

struct DdOptions {
    std::string checkpoint_path;     // empty = no checkpointing
    long checkpoint_every = 10000;   // new rays between checkpoints
    bool resume = false;             // load checkpoint_path before starting
    int threads = 0;
    std::function<void(const std::string&)> log;  // progress callback (long runs)
};

struct FacetResult {
    int dim = 0;                               // dimension of the affine hull
    std::vector<LinearInequality> facets;      // irredundant, primitive integer coefficients
    std::vector<LinearInequality> equalities;  // affine hull description (empty when full-dimensional)
};

// V -> H by double description on the polar cone, exact rational arithmetic.
// Points of a lower-dimensional hull are handled by affine-hull preprocessing
// (DD runs inside the hull, facets are re-embedded, the hull itself is
// returned as equalities). Every facet is valid on all points and tight on at
// least dim affinely independent ones.
FacetResult facet_enumerate(const std::vector<std::vector<Rat>>& points, const DdOptions& opts = {});

struct VertexResult {
    std::vector<std::vector<Rat>> vertices;
    std::vector<std::vector<Rat>> rays;  // empty for bounded systems
};

// H -> V via homogenization, same engine.
VertexResult vertex_enumerate(const std::vector<LinearInequality>& system, const DdOptions& opts = {});

}  // namespace bell
