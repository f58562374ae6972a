#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "bell/behavior.hpp"
#include "bell/inequality.hpp"
#include "bell/simplex.hpp"
#include "bell/vertex_set.hpp"

namespace bell {

struct LpQueryOptions {
    double tol = 1e-9;                      // float backend feasibility/pricing tolerance
    std::size_t colgen_threshold = 100000;  // switch to column generation above this many vertices
    std::size_t colgen_batch = 32;          // columns added per pricing round
    int threads = 0;                        // 0 = hardware concurrency
    long max_iters = 1000000;
};

struct LpFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Separating hyperplane g.z <= offset valid on every vertex and violated by
// the query, in whichever space the LP ran (correlator coords for NS models
// with NS queries, probability-table cells otherwise).
template <class T>
struct SeparatingCertificate {
    bool correlator_space = false;
    std::vector<T> coeffs;
    T offset{};
    T query_value{};
    T vertex_max{};  // re-evaluated against every vertex, independent of the solver
};

template <class T>
struct MembershipResult {
    bool inside = false;
    std::vector<std::pair<std::size_t, T>> weights;  // inside: convex decomposition over vertex indices
    SeparatingCertificate<T> certificate;            // outside
    long lp_iterations = 0;
    bool used_colgen = false;
};

template <class T>
struct VisibilityResult {
    T v{};
    std::vector<std::pair<std::size_t, T>> weights;  // decomposition of mix(P, v)
    long lp_iterations = 0;
    bool used_colgen = false;
};

// Feasibility LP over convex weights: is the query in conv(vertices)?
template <class T>
MembershipResult<T> membership(const Behavior<T>& query, const VertexSet& model, const LpQueryOptions& opts = {});

// Single LP maximizing v with mix(query, v, noise) in conv(vertices).
template <class T>
VisibilityResult<T> visibility(const Behavior<T>& query, const VertexSet& model, const Behavior<T>& noise,
                               const LpQueryOptions& opts = {});

template <class T>
VisibilityResult<T> visibility(const Behavior<T>& query, const VertexSet& model, const LpQueryOptions& opts = {});

struct VertexMax {
    Rat value;
    std::size_t index = 0;
};

// Exact maximum of the inequality's linear functional over the vertex set.
VertexMax max_over_vertices(const BellInequality& ineq, const VertexSet& model, int threads = 0);

extern template MembershipResult<Rat> membership<Rat>(const BehaviorQ&, const VertexSet&, const LpQueryOptions&);
extern template MembershipResult<double> membership<double>(const BehaviorD&, const VertexSet&, const LpQueryOptions&);
extern template VisibilityResult<Rat> visibility<Rat>(const BehaviorQ&, const VertexSet&, const BehaviorQ&,
                                                      const LpQueryOptions&);
extern template VisibilityResult<double> visibility<double>(const BehaviorD&, const VertexSet&, const BehaviorD&,
                                                            const LpQueryOptions&);
extern template VisibilityResult<Rat> visibility<Rat>(const BehaviorQ&, const VertexSet&, const LpQueryOptions&);
extern template VisibilityResult<double> visibility<double>(const BehaviorD&, const VertexSet&, const LpQueryOptions&);

}  // namespace bell
