#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bell/enumeration.hpp"
#include "bell/lp.hpp"
#include "bell/quantum.hpp"

using namespace bell;

namespace {

BehaviorD w3_behavior() { return behavior_from_setup(named_setup("W3_paper")); }

BehaviorQ rational_pr_mixture() {
    // 3/4 PR + 1/4 uniform: nonlocal but inside the NS polytope, exactly rational
    Scenario s(2);
    BehaviorQ pr(s);
    for (int x = 0; x < 4; ++x)
        for (int o = 0; o < 4; ++o) {
            int a = (o >> 1) & 1, b = o & 1;
            int xx = (x >> 1) & 1, yy = x & 1;
            if (((a + b) & 1) == (xx & yy)) pr.p[s.cell(x, o)] = Rat(1, 2);
        }
    return mix(pr, Rat(3, 4));
}

template <class T>
void audit_decomposition(const Behavior<T>& query, const VertexSet& model,
                         const std::vector<std::pair<std::size_t, T>>& weights, double tol) {
    T total{};
    std::vector<T> recon(query.p.size(), T{});
    for (const auto& [idx, w] : weights) {
        REQUIRE(idx < model.size());
        if constexpr (std::is_same_v<T, Rat>) {
            CHECK(w >= 0);
        } else {
            CHECK(w >= -tol);
        }
        total += w;
        for (std::size_t c = 0; c < recon.size(); ++c)
            recon[c] += w * static_cast<T>(model.entry(idx, static_cast<int>(c)));
    }
    if constexpr (std::is_same_v<T, Rat>) {
        CHECK(total == 1);
        CHECK(recon == query.p);
    } else {
        CHECK(std::abs(to_double(total) - 1.0) < tol);
        for (std::size_t c = 0; c < recon.size(); ++c) CHECK(std::abs(recon[c] - query.p[c]) < tol);
    }
}

template <class T>
void audit_certificate(const Behavior<T>& query, const VertexSet& model, const SeparatingCertificate<T>& cert) {
    // re-derive both sides of the certificate from scratch
    auto score = [&](const std::vector<T>& z) {
        T s{};
        for (std::size_t i = 0; i < z.size(); ++i) s += cert.coeffs[i] * z[i];
        return s;
    };
    auto point = [&](const Behavior<T>& b) {
        if (!cert.correlator_space) return b.p;
        return to_correlators(b).c;
    };
    T qv = score(point(query));
    T vmax{};
    bool first = true;
    for (std::size_t v = 0; v < model.size(); ++v) {
        Behavior<T> vb(model.scenario);
        for (int c = 0; c < model.scenario.cells(); ++c) vb.p[c] = static_cast<T>(model.entry(v, c));
        T s = score(point(vb));
        if (first || s > vmax) vmax = s;
        first = false;
    }
    if constexpr (std::is_same_v<T, Rat>) {
        CHECK(vmax <= cert.offset);
        CHECK(qv > cert.offset);
        CHECK(qv == cert.query_value);
        CHECK(vmax == cert.vertex_max);
    } else {
        CHECK(vmax <= cert.offset + 1e-7);
        CHECK(qv > cert.offset + 1e-7);
        CHECK(qv == doctest::Approx(cert.query_value).epsilon(1e-9));
        CHECK(vmax == doctest::Approx(cert.vertex_max).epsilon(1e-9));
    }
}

}  // namespace

TEST_CASE("uniform noise is inside every catalog model, with an exact decomposition") {
    for (const char* spec : {"L[2]", "L[3]", "NS[A,B]", "NS[2/1]", "PTO[B<C]", "PTO[order=C<A<B]", "SV[2|1]"}) {
        VertexSet model = build_vertices(parse_model(spec));
        BehaviorQ p0 = uniform_behavior<Rat>(model.scenario);
        auto res = membership(p0, model);
        CHECK(res.inside);
        audit_decomposition(p0, model, res.weights, 0.0);
    }
}

TEST_CASE("W state mixtures straddle the hybrid boundary") {
    BehaviorD w3 = w3_behavior();
    VertexSet sv = build_vertices(parse_model("SV[2|1]"));

    auto inside = membership(mix(w3, 0.95), sv);
    CHECK(inside.inside);
    audit_decomposition(mix(w3, 0.95), sv, inside.weights, 1e-7);

    auto outside = membership(mix(w3, 0.96), sv);
    CHECK_FALSE(outside.inside);
    audit_certificate(mix(w3, 0.96), sv, outside.certificate);
}

TEST_CASE("separating certificates use correlator coordinates for NS models") {
    BehaviorD w3 = w3_behavior();
    VertexSet local = build_vertices(parse_model("L[3]"));
    auto res = membership(w3, local);
    REQUIRE_FALSE(res.inside);
    CHECK(res.certificate.correlator_space);
    CHECK(res.certificate.coeffs.size() == static_cast<std::size_t>(local.scenario.correlators()));
    audit_certificate(w3, local, res.certificate);

    VertexSet sv = build_vertices(parse_model("SV[2|1]"));
    auto res_sv = membership(w3, sv);
    REQUIRE_FALSE(res_sv.inside);
    CHECK_FALSE(res_sv.certificate.correlator_space);
    CHECK(res_sv.certificate.coeffs.size() == static_cast<std::size_t>(sv.scenario.cells()));
}

TEST_CASE("white-noise visibility of the W behavior matches the frozen thresholds") {
    BehaviorD w3 = w3_behavior();
    auto local = visibility(w3, build_vertices(parse_model("L[3]")));
    CHECK(local.v == doctest::Approx(0.7120).epsilon(1e-4));
    auto ns21 = visibility(w3, build_vertices(parse_model("NS[2/1]")));
    CHECK(ns21.v == doctest::Approx(0.8477).epsilon(1e-4));
    audit_decomposition(mix(w3, ns21.v), build_vertices(parse_model("NS[2/1]")), ns21.weights, 1e-6);
}

TEST_CASE("members get visibility 1") {
    VertexSet local = build_vertices(parse_model("L[3]"));
    BehaviorQ p0 = uniform_behavior<Rat>(local.scenario);
    CHECK(visibility(p0, local).v == 1);
    BehaviorD det(local.scenario);
    for (int x = 0; x < 8; ++x) det.p[local.scenario.cell(x, 0)] = 1.0;
    CHECK(visibility(det, local).v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("explicit noise target changes the answer coherently") {
    Scenario s(2);
    VertexSet local = local_vertices(s);
    BehaviorQ q = rational_pr_mixture();
    BehaviorQ white = uniform_behavior<Rat>(s);
    auto def = visibility(q, local);
    auto noisy = visibility(q, local, white);
    CHECK(def.v == noisy.v);
    // CHSH value of q is 3, so mixing toward white noise must reach 2/3
    CHECK(def.v == Rat(2, 3));

    // noise sitting on the opposite CHSH facet: 3v - 2(1-v) = 2 at v = 4/5
    BehaviorQ det(s);
    for (int x = 0; x < 4; ++x) det.p[s.cell(x, x)] = 1;
    auto skew = visibility(q, local, det);
    CHECK(skew.v == Rat(4, 5));
    audit_decomposition(mix(q, skew.v, det), local, skew.weights, 0.0);
}

TEST_CASE("rational and float backends agree on exact rational queries") {
    Scenario s(2);
    VertexSet local = local_vertices(s);
    BehaviorQ q = rational_pr_mixture();
    auto exact = visibility(q, local);
    auto approx = visibility(to_float(q), local);
    CHECK(std::abs(to_double(exact.v) - approx.v) < 1e-9);

    BehaviorQ member = mix(q, Rat(1, 2));
    auto em = membership(member, local);
    auto fm = membership(to_float(member), local);
    CHECK(em.inside);
    CHECK(fm.inside);

    BehaviorQ out = mix(q, Rat(99, 100));
    CHECK_FALSE(membership(out, local).inside);
    CHECK_FALSE(membership(to_float(out), local).inside);
}

TEST_CASE("column generation reproduces the direct solve") {
    BehaviorD w3 = w3_behavior();
    VertexSet ns21 = build_vertices(parse_model("NS[2/1]"));
    LpQueryOptions colgen;
    colgen.colgen_threshold = 1;
    colgen.colgen_batch = 8;

    auto direct = visibility(w3, ns21);
    CHECK_FALSE(direct.used_colgen);
    auto generated = visibility(w3, ns21, colgen);
    CHECK(generated.used_colgen);
    CHECK(std::abs(direct.v - generated.v) < 1e-9);

    BehaviorQ q = rational_pr_mixture();
    VertexSet local = local_vertices(Scenario(2));
    auto exact_direct = visibility(q, local);
    auto exact_gen = visibility(q, local, colgen);
    CHECK(exact_gen.used_colgen);
    CHECK(exact_direct.v == exact_gen.v);

    auto mem = membership(mix(w3, 0.96), build_vertices(parse_model("SV[2|1]")), colgen);
    CHECK(mem.used_colgen);
    CHECK_FALSE(mem.inside);
    audit_certificate(mix(w3, 0.96), build_vertices(parse_model("SV[2|1]")), mem.certificate);
}

TEST_CASE("max_over_vertices matches the known algebraic maxima") {
    VertexSet l2 = local_vertices(Scenario(2));
    CHECK(max_over_vertices(named_inequality("chsh"), l2).value == 2);
    VertexSet ns = bipartite_blocks(PairKind::NonSignaling);
    CHECK(max_over_vertices(named_inequality("chsh"), ns).value == 4);
    VertexSet sv = build_vertices(parse_model("SV[2|1]"));
    CHECK(max_over_vertices(named_inequality("svetlichny"), sv).value == 4);
    VertexSet l3 = build_vertices(parse_model("L[3]"));
    CHECK(max_over_vertices(named_inequality("svetlichny"), l3).value == 4);
}

TEST_CASE("max_over_vertices reports the first maximizer") {
    Scenario s(2);
    // functional that every deterministic point saturates: the trivial bound 1
    BellInequality ones;
    ones.scenario = s;
    ones.coeff.assign(s.correlators(), 0);
    ones.bound = 1;
    // empty functional: value 0 on everything, index must be 0
    auto r = max_over_vertices(ones, local_vertices(s));
    CHECK(r.value == 0);
    CHECK(r.index == 0);
}

TEST_CASE("scenario mismatches are rejected") {
    BehaviorQ p2 = uniform_behavior<Rat>(Scenario(2));
    VertexSet l3 = build_vertices(parse_model("L[3]"));
    CHECK_THROWS(membership(p2, l3));
    CHECK_THROWS(visibility(p2, l3));
    CHECK_THROWS(max_over_vertices(named_inequality("chsh"), l3));
}

TEST_CASE("visibility decompositions certify the optimum from above") {
    // the mixed point at v must be a member while v + eps is not
    BehaviorD w3 = w3_behavior();
    VertexSet local = build_vertices(parse_model("L[3]"));
    auto res = visibility(w3, local);
    CHECK(membership(mix(w3, res.v - 1e-6), local).inside);
    CHECK_FALSE(membership(mix(w3, res.v + 1e-4), local).inside);
}
