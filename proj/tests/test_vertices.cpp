#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "bell/enumeration.hpp"
#include "bell/io.hpp"

using namespace bell;

namespace {

bool contains_table(const VertexSet& vs, const std::vector<std::int32_t>& table) {
    return std::binary_search(vs.tables.begin(), vs.tables.end(), table);
}

// Every local deterministic point, rescaled to the target denominator.
bool contains_all_local(const VertexSet& vs) {
    VertexSet local = local_vertices(vs.scenario);
    if (vs.denom % local.denom != 0) return false;
    rescale_to(local, vs.denom);
    for (const auto& t : local.tables)
        if (!contains_table(vs, t)) return false;
    return true;
}

bool sorted_unique(const VertexSet& vs) {
    for (std::size_t i = 1; i < vs.size(); ++i)
        if (!(vs.tables[i - 1] < vs.tables[i])) return false;
    return true;
}

}  // namespace

TEST_CASE("local enumeration: 4^n deterministic strategies") {
    CHECK(local_vertices(Scenario(2)).size() == 16);
    CHECK(local_vertices(Scenario(3)).size() == 64);
    CHECK(local_vertices(Scenario(4)).size() == 256);
    VertexSet l3 = local_vertices(Scenario(3));
    CHECK(l3.denom == 1);
    CHECK(l3.ns_model);
    CHECK(sorted_unique(l3));
    for (std::size_t v = 0; v < l3.size(); ++v) {
        BehaviorQ P = l3.behavior(v);
        validate_behavior(P);
        CHECK(is_nonsignaling(P));
        for (const auto& cell : l3.tables[v]) CHECK((cell == 0 || cell == 1));
    }
}

TEST_CASE("one-way bipartite blocks: 64 points, no signaling to the sender") {
    VertexSet ow = bipartite_blocks(PairKind::OneWay);
    CHECK(ow.size() == 64);
    bool some_b_signals = false;
    for (std::size_t v = 0; v < ow.size(); ++v) {
        BehaviorQ P = ow.behavior(v);
        CHECK(check_ns(P, 0b10));  // a = f(x) only
        if (!check_ns(P, 0b01)) some_b_signals = true;
    }
    CHECK(some_b_signals);
}

TEST_CASE("two-way bipartite blocks: 256 points including all 16 local ones") {
    VertexSet tw = bipartite_blocks(PairKind::TwoWay);
    CHECK(tw.size() == 256);
    CHECK(contains_all_local(tw));
    VertexSet ow = bipartite_blocks(PairKind::OneWay);
    rescale_to(ow, tw.denom);
    for (const auto& t : ow.tables) CHECK(contains_table(tw, t));
}

TEST_CASE("nonsignaling bipartite extremals: 16 local + 8 PR relabelings") {
    VertexSet ns = bipartite_blocks(PairKind::NonSignaling);
    CHECK(ns.size() == 24);
    CHECK(ns.ns_model);
    CHECK(contains_all_local(ns));
    BellInequality chsh = named_inequality("chsh");
    int pr_count = 0;
    Rat max_chsh = 0;
    for (std::size_t v = 0; v < ns.size(); ++v) {
        BehaviorQ P = ns.behavior(v);
        CHECK(is_nonsignaling(P));
        auto c = to_correlators(P);
        bool deterministic = true;
        for (const auto& cell : P.p) deterministic = deterministic && (cell == 0 || cell == 1);
        if (!deterministic) {
            ++pr_count;
            // PR-type boxes: vanishing marginals, unit two-party correlators
            CHECK(c.at_code(parse_pattern("0I", 2)) == 0);
            CHECK(c.at_code(parse_pattern("1I", 2)) == 0);
            CHECK(c.at_code(parse_pattern("I0", 2)) == 0);
            CHECK(c.at_code(parse_pattern("I1", 2)) == 0);
        }
        max_chsh = std::max(max_chsh, evaluate(chsh, P));
    }
    CHECK(pr_count == 8);
    CHECK(max_chsh == 4);
}

TEST_CASE("model catalog vertex counts") {
    CHECK(build_vertices(parse_model("L[3]")).size() == 64);
    CHECK(build_vertices(parse_model("L[4]")).size() == 256);
    CHECK(build_vertices(parse_model("NS[A,B]")).size() == 96);
    CHECK(build_vertices(parse_model("NS[2/1]")).size() == 160);
    CHECK(build_vertices(parse_model("PTO[A<B]")).size() == 256);
    CHECK(build_vertices(parse_model("PTO[order=A<B<C]")).size() == 640);
    CHECK(build_vertices(parse_model("PTO[2/1]")).size() == 1216);
    CHECK(build_vertices(parse_model("SV[2|1]")).size() == 2944);
    CHECK(build_vertices(parse_model("NS[2/2]")).size() == 1216);
}

TEST_CASE("every model contains the local deterministic points") {
    for (const char* spec : {"NS[A,B]", "NS[2/1]", "PTO[A<C]", "PTO[order=B<C<A]", "PTO[2/1]", "SV[2|1]"})
        CHECK(contains_all_local(build_vertices(parse_model(spec))));
    CHECK(contains_all_local(build_vertices(parse_model("NS[2/2]"))));
}

TEST_CASE("NS-model vertices are globally nonsignaling, SV has signaling ones") {
    for (const char* spec : {"NS[A,B]", "NS[2/1]", "NS[2/2]"}) {
        VertexSet vs = build_vertices(parse_model(spec));
        CHECK(vs.ns_model);
        for (std::size_t v = 0; v < vs.size(); ++v) CHECK(is_nonsignaling(vs.behavior(v)));
    }
    VertexSet sv = build_vertices(parse_model("SV[2|1]"));
    CHECK_FALSE(sv.ns_model);
    bool any_signaling = false;
    for (std::size_t v = 0; v < sv.size() && !any_signaling; ++v)
        any_signaling = !is_nonsignaling(sv.behavior(v));
    CHECK(any_signaling);
}

TEST_CASE("PTO full equals the union of two opposite total orders") {
    VertexSet full = build_vertices(parse_model("PTO[2/1]"));
    VertexSet hull = build_vertices(parse_model("HULL(PTO[order=A<B<C];PTO[order=C<B<A])"));
    CHECK(full.denom == hull.denom);
    CHECK(full.tables == hull.tables);

    VertexSet pair_union = build_vertices(
        parse_model("HULL(PTO[A<B];PTO[B<A];PTO[A<C];PTO[C<A];PTO[B<C];PTO[C<B])"));
    CHECK(full.tables == pair_union.tables);
}

TEST_CASE("hulls merge vertex sets without duplicates") {
    VertexSet ab = build_vertices(parse_model("PTO[A<B]"));
    VertexSet hull = build_vertices(parse_model("HULL(PTO[A<B];PTO[A<B])"));
    CHECK(hull.tables == ab.tables);
    VertexSet two = build_vertices(parse_model("HULL(NS[A,B];NS[A,C])"));
    CHECK(sorted_unique(two));
    // 96 + 96 points sharing the 64 local products
    CHECK(two.size() == 128);
}

TEST_CASE("model grammar rejects malformed specs with a position") {
    CHECK_THROWS_AS(parse_model("PTO[A>B]"), ModelParseError);
    CHECK_THROWS_AS(parse_model("NS[2/3]"), ModelParseError);
    CHECK_THROWS_AS(parse_model("L[5]"), ModelParseError);
    CHECK_THROWS_AS(parse_model("PTO[order=A<B]"), ModelParseError);
    CHECK_THROWS_AS(parse_model("PTO[A<A]"), ModelParseError);
    CHECK_THROWS_AS(parse_model("HULL(L[3];)"), ModelParseError);
    CHECK_THROWS_AS(parse_model("SV[2|1] trailing"), ModelParseError);
    try {
        parse_model("NS[X,B]");
        CHECK(false);
    } catch (const ModelParseError& e) {
        CHECK(std::string(e.what()).find("position") != std::string::npos);
    }
}

TEST_CASE("hull scenarios must agree") {
    CHECK_THROWS_AS(parse_model("HULL(L[3];L[4])"), ModelParseError);
}

TEST_CASE("vertex files round-trip") {
    VertexSet vs = build_vertices(parse_model("NS[2/1]"));
    std::ostringstream out;
    write_vertex_file(out, vs);
    std::istringstream in(out.str());
    VertexSet back = read_vertex_file(in);
    CHECK(back.scenario == vs.scenario);
    CHECK(back.denom == vs.denom);
    CHECK(back.tables == vs.tables);
    CHECK(back.model == vs.model);
}

TEST_CASE("vertex file reader rejects count mismatches and bad rows") {
    VertexSet vs = local_vertices(Scenario(2));
    std::ostringstream out;
    write_vertex_file(out, vs);
    std::string text = out.str();
    std::string wrong_count = text;
    auto pos = wrong_count.find("count=16");
    REQUIRE(pos != std::string::npos);
    wrong_count.replace(pos, 8, "count=17");
    std::istringstream bad(wrong_count);
    CHECK_THROWS_AS(read_vertex_file(bad), IoError);

    std::istringstream bad_cells("model=L[2] n=2 count=1\n1,0,0\n");
    CHECK_THROWS_AS(read_vertex_file(bad_cells), IoError);
}

TEST_CASE("NS[3/1] assembles grouped products from a supplied tripartite file") {
    // With the 64 local tripartite points standing in for the NS3 list, the
    // grouped products over all four 3+1 splits are exactly the 256 local
    // deterministic four-party points.
    std::string path = (std::filesystem::temp_directory_path() / "bellpoly_test_ns3_local.vtx").string();
    write_vertex_file(path, local_vertices(Scenario(3)));
    VertexSet vs = build_vertices(parse_model("NS[3/1]:ns3=" + path));
    CHECK(vs.size() == 256);
    VertexSet l4 = local_vertices(Scenario(4));
    rescale_to(l4, vs.denom);
    CHECK(vs.tables == l4.tables);
    std::remove(path.c_str());

    CHECK_THROWS(build_vertices(parse_model("NS[3/1]:ns3=/nonexistent/ns3.vtx")));
}

TEST_CASE("rescale and merge preserve the represented points") {
    VertexSet a = local_vertices(Scenario(2));
    BehaviorQ before = a.behavior(3);
    rescale_to(a, 6);
    CHECK(a.denom == 6);
    CHECK(a.behavior(3) == before);
    CHECK_THROWS(rescale_to(a, 4));  // not a multiple of the current denominator

    VertexSet ns = bipartite_blocks(PairKind::NonSignaling);
    VertexSet merged = merge_sets({a, ns}, "MERGED", true);
    CHECK(merged.size() == 24);  // locals are a subset of the NS extremals
    CHECK(merged.model == "MERGED");
}
