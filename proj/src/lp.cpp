#include "bell/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>

#include "bell/enumeration.hpp"
#include "bell/parallel.hpp"

namespace bell {

namespace {

template <class T>
T from_rat(const Rat& v);
template <>
Rat from_rat<Rat>(const Rat& v) {
    return v;
}
template <>
double from_rat<double>(const Rat& v) {
    return to_double(v);
}

template <class T>
bool strictly_pos(const T& v, double tol) {
    if constexpr (std::is_same_v<T, Rat>) return v > 0;
    else return v > tol;
}

// Per-correlator-code integer layout of a vertex set: the code-k correlator
// of vertex j is (signed sum of table numerators) / divisor[k].
struct CorrLayout {
    std::vector<std::int64_t> divisor;        // denom * #matching inputs
    std::vector<std::vector<int>> cells_pos;  // cell indices entering with +
    std::vector<std::vector<int>> cells_neg;
};

CorrLayout corr_layout(const VertexSet& vs) {
    const Scenario& s = vs.scenario;
    CorrLayout lay;
    int d = s.correlators();
    lay.divisor.resize(d);
    lay.cells_pos.resize(d);
    lay.cells_neg.resize(d);
    for (int code = 1; code <= d; ++code) {
        int mask = pattern_party_mask(code, s.n);
        int want = pattern_input_bits(code, s.n);
        int matches = 0;
        for (int x = 0; x < s.inputs(); ++x) {
            if ((x & mask) != want) continue;
            ++matches;
            for (int o = 0; o < s.outputs(); ++o) {
                bool neg = std::popcount(static_cast<unsigned>(o & mask)) & 1;
                (neg ? lay.cells_neg : lay.cells_pos)[code - 1].push_back(s.cell(x, o));
            }
        }
        lay.divisor[code - 1] = static_cast<std::int64_t>(vs.denom) * matches;
    }
    return lay;
}

std::int64_t corr_numerator(const VertexSet& vs, const CorrLayout& lay, std::size_t j, int k) {
    const auto& tab = vs.tables[j];
    std::int64_t acc = 0;
    for (int cell : lay.cells_pos[k]) acc += tab[cell];
    for (int cell : lay.cells_neg[k]) acc -= tab[cell];
    return acc;
}

// Writes the LP column of vertex j (without the convex row) into out[0..dim).
template <class T>
void vertex_column(const VertexSet& vs, const CorrLayout* lay, std::size_t j, bool correlator_space, T* out) {
    if (correlator_space) {
        int d = vs.scenario.correlators();
        for (int k = 0; k < d; ++k) {
            std::int64_t num = corr_numerator(vs, *lay, j, k);
            if constexpr (std::is_same_v<T, Rat>) out[k] = Rat(num, lay->divisor[k]);
            else out[k] = static_cast<double>(num) / static_cast<double>(lay->divisor[k]);
        }
    } else {
        int cells = vs.scenario.cells();
        for (int i = 0; i < cells; ++i) {
            if constexpr (std::is_same_v<T, Rat>) out[i] = Rat(vs.tables[j][i], vs.denom);
            else out[i] = static_cast<double>(vs.tables[j][i]) / static_cast<double>(vs.denom);
        }
    }
}

template <class T>
bool query_is_ns(const Behavior<T>& query, double tol) {
    if constexpr (std::is_same_v<T, Rat>) return is_nonsignaling(query);
    else return is_nonsignaling(query, tol);
}

template <class T>
std::vector<T> query_coords(const Behavior<T>& query, bool correlator_space) {
    if (correlator_space) return to_correlators(query).c;
    return query.p;
}

// Shared LP assembly and column-generation driver. The problem has `dim`
// coordinate rows plus one convex-combination row (plus, for visibility, one
// cap row) and one column per active vertex plus `extra` trailing columns.
template <class T>
struct QueryContext {
    const VertexSet& vs;
    const LpQueryOptions& opts;
    bool correlator_space;
    int dim;
    std::unique_ptr<CorrLayout> lay;

    QueryContext(const VertexSet& model, const LpQueryOptions& o, bool corr)
        : vs(model), opts(o), correlator_space(corr), dim(corr ? model.scenario.correlators() : model.scenario.cells()) {
        if (corr) lay = std::make_unique<CorrLayout>(corr_layout(model));
    }

    void fill_column(std::size_t j, T* out) const { vertex_column(vs, lay.get(), j, correlator_space, out); }

    // Dot product of the vertex column (coordinate rows only) with y.
    T price_column(std::size_t j, const std::vector<T>& y) const {
        T acc(0);
        if (correlator_space) {
            for (int k = 0; k < dim; ++k) {
                std::int64_t num = corr_numerator(vs, *lay, j, k);
                if (num == 0) continue;
                if constexpr (std::is_same_v<T, Rat>) acc += y[k] * Rat(num, lay->divisor[k]);
                else acc += y[k] * (static_cast<double>(num) / static_cast<double>(lay->divisor[k]));
            }
        } else {
            const auto& tab = vs.tables[j];
            for (int i = 0; i < dim; ++i) {
                if (tab[i] == 0) continue;
                if constexpr (std::is_same_v<T, Rat>) acc += y[i] * Rat(tab[i], vs.denom);
                else acc += y[i] * (static_cast<double>(tab[i]) / static_cast<double>(vs.denom));
            }
        }
        return acc;
    }
};

// Indices of the local deterministic points inside a (sorted) vertex set;
// they seed column generation and are guaranteed present in every model.
std::vector<std::size_t> local_seed_indices(const VertexSet& vs) {
    VertexSet local = local_vertices(vs.scenario);
    rescale_to(local, vs.denom);
    std::vector<std::size_t> out;
    out.reserve(local.size());
    for (const auto& tab : local.tables) {
        auto it = std::lower_bound(vs.tables.begin(), vs.tables.end(), tab);
        if (it == vs.tables.end() || *it != tab)
            throw LpFailure("column generation: local deterministic point missing from vertex set");
        out.push_back(static_cast<std::size_t>(it - vs.tables.begin()));
    }
    return out;
}

template <class T>
struct ColgenState {
    std::vector<std::size_t> active;  // restricted-problem column -> vertex index
    std::vector<std::uint8_t> in_active;

    void add(std::size_t j) {
        if (in_active[j]) return;
        in_active[j] = 1;
        active.push_back(j);
    }
};

// Scans all vertices for the best `batch` inactive columns whose full score
// y . [col; 1] = y_coords . col + shift clears the tolerance. Farkas pricing
// and reduced-cost pricing both reduce to this form; shift is the constant
// convex-row contribution shared by every vertex column.
template <class T>
std::vector<std::size_t> price_all(const QueryContext<T>& ctx, const ColgenState<T>& st, const std::vector<T>& y,
                                   const T& shift, std::size_t batch) {
    struct Cand {
        T score;
        std::size_t j;
    };
    int nt = resolve_threads(ctx.opts.threads);
    std::vector<std::vector<Cand>> per_chunk(std::max<std::size_t>(1, std::min<std::size_t>(nt, ctx.vs.size())));
    parallel_chunks(ctx.vs.size(), ctx.opts.threads, [&](std::size_t w, std::size_t begin, std::size_t end) {
        auto& out = per_chunk[w];
        for (std::size_t j = begin; j < end; ++j) {
            if (st.in_active[j]) continue;
            T score = ctx.price_column(j, y) + shift;
            if (!strictly_pos(score, ctx.opts.tol)) continue;
            out.push_back({std::move(score), j});
            if (out.size() > 4 * batch) {
                std::nth_element(out.begin(), out.begin() + batch, out.end(),
                                 [](const Cand& a, const Cand& b) { return a.score > b.score; });
                out.resize(batch);
            }
        }
    });
    std::vector<Cand> all;
    for (auto& chunk : per_chunk)
        for (auto& c : chunk) all.push_back(std::move(c));
    std::sort(all.begin(), all.end(), [](const Cand& a, const Cand& b) {
        return a.score != b.score ? a.score > b.score : a.j < b.j;
    });
    if (all.size() > batch) all.resize(batch);
    std::vector<std::size_t> out;
    out.reserve(all.size());
    for (auto& c : all) out.push_back(c.j);
    return out;
}

template <class T>
lp::LpOptions solver_options(const LpQueryOptions& opts) {
    lp::LpOptions lo;
    lo.tol = opts.tol;
    lo.max_iters = opts.max_iters;
    return lo;
}

// Builds and solves the restricted problem over the active columns.
// extra_cols appends dense trailing columns (visibility: the v and t
// columns); extra_rows appends full rows under the coordinate+convex block.
template <class T>
lp::LpSolution<T> solve_restricted(const QueryContext<T>& ctx, const std::vector<std::size_t>& active,
                                   const std::vector<T>& rhs, const std::vector<std::vector<T>>& extra_cols,
                                   const std::vector<T>& objective_extra) {
    int rows = static_cast<int>(rhs.size());
    int nv = static_cast<int>(active.size());
    int cols = nv + static_cast<int>(extra_cols.size());
    lp::LpProblem<T> prob;
    prob.rows = rows;
    prob.cols = cols;
    prob.a.assign(static_cast<std::size_t>(rows) * cols, T(0));
    prob.b = rhs;
    prob.c.assign(cols, T(0));
    std::vector<T> col(ctx.dim);
    for (int j = 0; j < nv; ++j) {
        ctx.fill_column(active[j], col.data());
        for (int i = 0; i < ctx.dim; ++i) prob.at(i, j) = col[i];
        prob.at(ctx.dim, j) = T(1);
    }
    for (std::size_t e = 0; e < extra_cols.size(); ++e) {
        if (static_cast<int>(extra_cols[e].size()) != rows) throw std::logic_error("extra column size");
        for (int i = 0; i < rows; ++i) prob.at(i, nv + static_cast<int>(e)) = extra_cols[e][i];
        prob.c[nv + static_cast<int>(e)] = objective_extra[e];
    }
    return lp::solve_lp(prob, solver_options<T>(ctx.opts));
}

// Column-generation loop around solve_restricted. On infeasibility the
// Farkas vector prices columns directly (y . col > 0 means the certificate
// misses that vertex); at an optimum the duals price reduced costs. Either
// way the scan adds the most violated batch and re-solves until stable.
template <class T>
struct ColgenOutcome {
    lp::LpSolution<T> sol;
    std::vector<std::size_t> active;
    long iterations = 0;
    bool used_colgen = false;
};

template <class T>
ColgenOutcome<T> run_query(const QueryContext<T>& ctx, const std::vector<T>& rhs,
                           const std::vector<std::vector<T>>& extra_cols, const std::vector<T>& objective_extra,
                           bool price_at_optimum) {
    ColgenOutcome<T> out;
    bool colgen = ctx.vs.size() > ctx.opts.colgen_threshold;
    out.used_colgen = colgen;
    ColgenState<T> st;
    st.in_active.assign(ctx.vs.size(), 0);
    if (colgen) {
        for (std::size_t j : local_seed_indices(ctx.vs)) st.add(j);
    } else {
        st.active.resize(ctx.vs.size());
        std::iota(st.active.begin(), st.active.end(), std::size_t{0});
        std::fill(st.in_active.begin(), st.in_active.end(), 1);
    }
    while (true) {
        out.sol = solve_restricted(ctx, st.active, rhs, extra_cols, objective_extra);
        out.iterations += out.sol.iterations;
        if (out.sol.status == lp::LpStatus::IterationLimit) throw LpFailure("lp: iteration limit reached");
        if (!colgen) break;
        if (out.sol.status == lp::LpStatus::Unbounded) break;
        bool infeasible = out.sol.status == lp::LpStatus::Infeasible;
        if (infeasible || price_at_optimum) {
            // Farkas pricing uses y directly (y . [col;1] > 0); reduced-cost
            // pricing for zero-cost vertex columns needs -y . [col;1] > 0.
            std::vector<T> y(out.sol.y.begin(), out.sol.y.begin() + ctx.dim);
            T shift = out.sol.y[ctx.dim];
            if (!infeasible) {
                for (auto& v : y) v = -v;
                shift = -shift;
            }
            std::vector<std::size_t> added = price_all(ctx, st, y, shift, ctx.opts.colgen_batch);
            if (added.empty()) break;
            for (std::size_t j : added) st.add(j);
            continue;
        }
        break;
    }
    out.active = std::move(st.active);
    return out;
}

template <class T>
std::vector<std::pair<std::size_t, T>> gather_weights(const lp::LpSolution<T>& sol,
                                                      const std::vector<std::size_t>& active, std::size_t nv,
                                                      double tol) {
    std::vector<std::pair<std::size_t, T>> w;
    for (std::size_t j = 0; j < nv && j < sol.x.size(); ++j) {
        if (strictly_pos(sol.x[j], tol)) w.emplace_back(active[j], sol.x[j]);
    }
    std::sort(w.begin(), w.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return w;
}

// Re-derives the decomposition and compares against the query, independent
// of the solver state.
template <class T>
void audit_inside(const QueryContext<T>& ctx, const std::vector<std::pair<std::size_t, T>>& weights,
                  const std::vector<T>& target) {
    std::vector<T> acc(ctx.dim, T(0));
    T wsum(0);
    std::vector<T> col(ctx.dim);
    for (const auto& [j, w] : weights) {
        ctx.fill_column(j, col.data());
        for (int i = 0; i < ctx.dim; ++i) acc[i] += w * col[i];
        wsum += w;
    }
    auto ok = [&](const T& diff) {
        if constexpr (std::is_same_v<T, Rat>) return diff == 0;
        else return std::abs(diff) <= 1e-6;
    };
    if (!ok(wsum - T(1))) throw LpFailure("lp audit: weights do not sum to 1");
    for (int i = 0; i < ctx.dim; ++i)
        if (!ok(acc[i] - target[i])) throw LpFailure("lp audit: decomposition does not reproduce the query");
}

// Certificate audit: evaluates the separating functional on every vertex.
template <class T>
T certified_vertex_max(const QueryContext<T>& ctx, const std::vector<T>& g) {
    int nt = resolve_threads(ctx.opts.threads);
    std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(nt, ctx.vs.size()));
    std::vector<std::optional<T>> best(chunks);
    parallel_chunks(ctx.vs.size(), ctx.opts.threads, [&](std::size_t w, std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            T v = ctx.price_column(j, g);
            if (!best[w] || v > *best[w]) best[w] = std::move(v);
        }
    });
    std::optional<T> overall;
    for (auto& b : best)
        if (b && (!overall || *b > *overall)) overall = *b;
    if (!overall) throw LpFailure("lp: empty vertex set");
    return *overall;
}

}  // namespace

template <class T>
MembershipResult<T> membership(const Behavior<T>& query, const VertexSet& model, const LpQueryOptions& opts) {
    if (query.scenario != model.scenario) throw std::invalid_argument("membership: scenario mismatch");
    if (model.size() == 0) throw std::invalid_argument("membership: empty vertex set");
    bool corr = model.ns_model && query_is_ns(query, opts.tol);
    QueryContext<T> ctx(model, opts, corr);
    std::vector<T> rhs = query_coords(query, corr);
    rhs.push_back(T(1));
    ColgenOutcome<T> run = run_query(ctx, rhs, {}, {}, /*price_at_optimum=*/false);
    MembershipResult<T> res;
    res.lp_iterations = run.iterations;
    res.used_colgen = run.used_colgen;
    if (run.sol.status == lp::LpStatus::Optimal) {
        res.inside = true;
        res.weights = gather_weights(run.sol, run.active, run.active.size(), opts.tol);
        std::vector<T> target = query_coords(query, corr);
        audit_inside(ctx, res.weights, target);
        return res;
    }
    if (run.sol.status != lp::LpStatus::Infeasible) throw LpFailure("membership: solver did not converge");
    res.inside = false;
    SeparatingCertificate<T>& cert = res.certificate;
    cert.correlator_space = corr;
    cert.coeffs.assign(run.sol.y.begin(), run.sol.y.begin() + ctx.dim);
    cert.offset = -run.sol.y[ctx.dim];
    std::vector<T> z = query_coords(query, corr);
    cert.query_value = T(0);
    for (int i = 0; i < ctx.dim; ++i) cert.query_value += cert.coeffs[i] * z[i];
    cert.vertex_max = certified_vertex_max(ctx, cert.coeffs);
    bool separated;
    if constexpr (std::is_same_v<T, Rat>) separated = cert.query_value > cert.vertex_max;
    else separated = cert.query_value > cert.vertex_max + opts.tol;
    if (!separated) throw LpFailure("membership: separating certificate failed the vertex audit");
    return res;
}

template <class T>
VisibilityResult<T> visibility(const Behavior<T>& query, const VertexSet& model, const Behavior<T>& noise,
                               const LpQueryOptions& opts) {
    if (query.scenario != model.scenario || noise.scenario != model.scenario)
        throw std::invalid_argument("visibility: scenario mismatch");
    if (model.size() == 0) throw std::invalid_argument("visibility: empty vertex set");
    bool corr = model.ns_model && query_is_ns(query, opts.tol) && query_is_ns(noise, opts.tol);
    QueryContext<T> ctx(model, opts, corr);
    std::vector<T> z = query_coords(query, corr);
    std::vector<T> z0 = query_coords(noise, corr);
    // rows: dim coordinate rows, convex row, cap row (v + t = 1)
    std::vector<T> rhs = z0;
    rhs.push_back(T(1));
    rhs.push_back(T(1));
    int rows = ctx.dim + 2;
    std::vector<std::vector<T>> extra(2, std::vector<T>(rows, T(0)));
    for (int i = 0; i < ctx.dim; ++i) extra[0][i] = z0[i] - z[i];  // v column: -(z - z0)
    extra[0][ctx.dim + 1] = T(1);
    extra[1][ctx.dim + 1] = T(1);  // slack t
    std::vector<T> obj_extra = {T(1), T(0)};
    ColgenOutcome<T> run = run_query(ctx, rhs, extra, obj_extra, /*price_at_optimum=*/true);
    if (run.sol.status == lp::LpStatus::Infeasible)
        throw LpFailure("visibility: noise behavior is outside the model");
    if (run.sol.status != lp::LpStatus::Optimal) throw LpFailure("visibility: solver did not converge");
    VisibilityResult<T> res;
    res.lp_iterations = run.iterations;
    res.used_colgen = run.used_colgen;
    res.v = run.sol.objective;
    res.weights = gather_weights(run.sol, run.active, run.active.size(), opts.tol);
    std::vector<T> target(ctx.dim);
    for (int i = 0; i < ctx.dim; ++i) target[i] = z0[i] + res.v * (z[i] - z0[i]);
    audit_inside(ctx, res.weights, target);
    return res;
}

template <class T>
VisibilityResult<T> visibility(const Behavior<T>& query, const VertexSet& model, const LpQueryOptions& opts) {
    return visibility(query, model, uniform_behavior<T>(query.scenario), opts);
}

VertexMax max_over_vertices(const BellInequality& ineq, const VertexSet& model, int threads) {
    if (ineq.scenario != model.scenario) throw std::invalid_argument("max_over_vertices: scenario mismatch");
    if (model.size() == 0) throw std::invalid_argument("max_over_vertices: empty vertex set");
    CorrLayout lay = corr_layout(model);
    int d = model.scenario.correlators();
    std::vector<Rat> factor(d);
    for (int k = 0; k < d; ++k) factor[k] = ineq.coeff[k] / Rat(lay.divisor[k]);
    std::size_t chunks = std::max<std::size_t>(
        1, std::min<std::size_t>(resolve_threads(threads), model.size()));
    std::vector<std::optional<VertexMax>> best(chunks);
    parallel_chunks(model.size(), threads, [&](std::size_t w, std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            Rat v(0);
            for (int k = 0; k < d; ++k) {
                if (factor[k] == 0) continue;
                std::int64_t num = corr_numerator(model, lay, j, k);
                if (num != 0) v += factor[k] * num;
            }
            if (!best[w] || v > best[w]->value) best[w] = VertexMax{std::move(v), j};
        }
    });
    std::optional<VertexMax> overall;
    for (auto& b : best)
        if (b && (!overall || b->value > overall->value)) overall = std::move(b);
    return *overall;
}

template MembershipResult<Rat> membership<Rat>(const BehaviorQ&, const VertexSet&, const LpQueryOptions&);
template MembershipResult<double> membership<double>(const BehaviorD&, const VertexSet&, const LpQueryOptions&);
template VisibilityResult<Rat> visibility<Rat>(const BehaviorQ&, const VertexSet&, const BehaviorQ&,
                                               const LpQueryOptions&);
template VisibilityResult<double> visibility<double>(const BehaviorD&, const VertexSet&, const BehaviorD&,
                                                     const LpQueryOptions&);
template VisibilityResult<Rat> visibility<Rat>(const BehaviorQ&, const VertexSet&, const LpQueryOptions&);
template VisibilityResult<double> visibility<double>(const BehaviorD&, const VertexSet&, const LpQueryOptions&);

}  // namespace bell
