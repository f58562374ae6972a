#include "bell/enumeration.hpp"

#include <numeric>
#include <stdexcept>

#include "bell/io.hpp"

namespace bell {

namespace {

// Tensor product of one chosen block per group, embedded into the full
// scenario. groups[g][k] is the global party sitting at slot k of block g, so
// one-way blocks keep their (signaler, receiver) slot order.
void product_tables(Scenario full, const std::vector<std::vector<int>>& groups,
                    const std::vector<const VertexSet*>& blocks, VertexSet& out) {
    std::size_t combos = 1;
    for (const auto* b : blocks) combos *= b->size();
    std::vector<std::size_t> choice(blocks.size(), 0);
    for (std::size_t it = 0; it < combos; ++it) {
        std::vector<std::int32_t> table(full.cells());
        for (int x = 0; x < full.inputs(); ++x) {
            for (int o = 0; o < full.outputs(); ++o) {
                std::int64_t prod = 1;
                for (std::size_t g = 0; g < groups.size() && prod != 0; ++g) {
                    const auto& parties = groups[g];
                    int ng = static_cast<int>(parties.size());
                    int xg = 0, og = 0;
                    for (int k = 0; k < ng; ++k) {
                        int bit = full.party_bit(parties[k]);
                        if (x & bit) xg |= 1 << (ng - 1 - k);
                        if (o & bit) og |= 1 << (ng - 1 - k);
                    }
                    prod *= blocks[g]->tables[choice[g]][(xg << ng) + og];
                }
                table[full.cell(x, o)] = static_cast<std::int32_t>(prod);
            }
        }
        out.tables.push_back(std::move(table));
        for (std::size_t g = 0; g < blocks.size(); ++g) {
            if (++choice[g] < blocks[g]->size()) break;
            choice[g] = 0;
        }
    }
}

VertexSet grouped_model(Scenario full, const std::vector<std::vector<std::vector<int>>>& groupings,
                        const std::vector<std::vector<const VertexSet*>>& block_sets, const std::string& name,
                        bool ns_model) {
    VertexSet out;
    out.scenario = full;
    out.model = name;
    out.ns_model = ns_model;
    out.denom = 1;
    for (const auto& blocks : block_sets) {
        std::int64_t d = 1;
        for (const auto* b : blocks) d *= b->denom;
        out.denom = std::lcm(out.denom, d);
    }
    for (std::size_t i = 0; i < groupings.size(); ++i) {
        VertexSet part;
        part.scenario = full;
        std::int64_t d = 1;
        for (const auto* b : block_sets[i]) d *= b->denom;
        part.denom = d;
        product_tables(full, groupings[i], block_sets[i], part);
        std::int64_t f = out.denom / d;
        for (auto& t : part.tables) {
            if (f != 1)
                for (auto& v : t) v = static_cast<std::int32_t>(v * f);
            out.tables.push_back(std::move(t));
        }
    }
    sort_dedup(out);
    return out;
}

std::vector<int> others(int n, std::initializer_list<int> used) {
    std::vector<int> rest;
    for (int i = 0; i < n; ++i) {
        bool hit = false;
        for (int u : used) hit |= (u == i);
        if (!hit) rest.push_back(i);
    }
    return rest;
}

}  // namespace

VertexSet local_vertices(Scenario s) {
    VertexSet out;
    out.scenario = s;
    out.model = "L[" + std::to_string(s.n) + "]";
    out.ns_model = true;
    out.denom = 1;
    // Strategy per party: 2 bits, output bit for input 0 and for input 1.
    int total = 1;
    for (int i = 0; i < s.n; ++i) total *= 4;
    for (int strat = 0; strat < total; ++strat) {
        std::vector<std::int32_t> table(s.cells(), 0);
        for (int x = 0; x < s.inputs(); ++x) {
            int o = 0;
            int code = strat;
            for (int i = s.n - 1; i >= 0; --i) {
                int si = code & 3;
                code >>= 2;
                int xi = (x >> (s.n - 1 - i)) & 1;
                int oi = (si >> xi) & 1;
                if (oi) o |= s.party_bit(i);
            }
            table[s.cell(x, o)] = 1;
        }
        out.tables.push_back(std::move(table));
    }
    sort_dedup(out);
    return out;
}

VertexSet bipartite_blocks(PairKind kind) {
    Scenario s(2);
    VertexSet out;
    out.scenario = s;
    out.denom = 1;
    switch (kind) {
        case PairKind::OneWay: {
            out.model = "pair:oneway";
            // a = f(x) (4 choices), b = g(x,y) (16 choices)
            for (int f = 0; f < 4; ++f) {
                for (int g = 0; g < 16; ++g) {
                    std::vector<std::int32_t> table(s.cells(), 0);
                    for (int x = 0; x < 2; ++x) {
                        for (int y = 0; y < 2; ++y) {
                            int a = (f >> x) & 1;
                            int b = (g >> (2 * x + y)) & 1;
                            table[s.cell((x << 1) | y, (a << 1) | b)] = 1;
                        }
                    }
                    out.tables.push_back(std::move(table));
                }
            }
            break;
        }
        case PairKind::TwoWay: {
            out.model = "pair:twoway";
            for (int f = 0; f < 16; ++f) {
                for (int g = 0; g < 16; ++g) {
                    std::vector<std::int32_t> table(s.cells(), 0);
                    for (int x = 0; x < 2; ++x) {
                        for (int y = 0; y < 2; ++y) {
                            int a = (f >> (2 * x + y)) & 1;
                            int b = (g >> (2 * x + y)) & 1;
                            table[s.cell((x << 1) | y, (a << 1) | b)] = 1;
                        }
                    }
                    out.tables.push_back(std::move(table));
                }
            }
            break;
        }
        case PairKind::NonSignaling: {
            out.model = "pair:ns";
            out.ns_model = true;
            out.denom = 2;
            VertexSet local = local_vertices(s);
            rescale_to(local, 2);
            out.tables = std::move(local.tables);
            // PR boxes: P(ab|xy) = 1/2 when a+b = xy + ax*x + by*y + g (mod 2)
            for (int mask = 0; mask < 8; ++mask) {
                int ax = mask & 1, by = (mask >> 1) & 1, g = (mask >> 2) & 1;
                std::vector<std::int32_t> table(s.cells(), 0);
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y)
                        for (int a = 0; a < 2; ++a)
                            for (int b = 0; b < 2; ++b)
                                if (((a + b) & 1) == ((x * y + ax * x + by * y + g) & 1))
                                    table[s.cell((x << 1) | y, (a << 1) | b)] = 1;
                out.tables.push_back(std::move(table));
            }
            break;
        }
    }
    sort_dedup(out);
    return out;
}

VertexSet read_ns3_file(const std::string& path) {
    VertexSet vs = read_vertex_file(path);
    if (vs.scenario.n != 3) throw std::invalid_argument("ns3 file: expected n=3, got n=" + std::to_string(vs.scenario.n));
    // Full exact validation of large files is prohibitive; spot-check a prefix.
    std::size_t sample = std::min<std::size_t>(vs.size(), 64);
    for (std::size_t i = 0; i < sample; ++i) {
        BehaviorQ b = vs.behavior(i);
        validate_behavior(b);
        if (!is_nonsignaling(b)) throw std::invalid_argument("ns3 file: signaling point at index " + std::to_string(i));
    }
    vs.ns_model = true;
    return vs;
}

VertexSet build_vertices(const ModelSpec& spec) {
    Scenario s = spec.scenario;
    switch (spec.kind) {
        case ModelKind::Local:
            return local_vertices(s);
        case ModelKind::Sv21: {
            VertexSet two = bipartite_blocks(PairKind::TwoWay);
            VertexSet one = local_vertices(Scenario(1));
            std::vector<std::vector<std::vector<int>>> groupings;
            for (int a = 0; a < 3; ++a)
                for (int b = a + 1; b < 3; ++b) groupings.push_back({{a, b}, others(3, {a, b})});
            std::vector<std::vector<const VertexSet*>> blocks(groupings.size(), {&two, &one});
            return grouped_model(s, groupings, blocks, spec.str(), false);
        }
        case ModelKind::PtoPair: {
            VertexSet one_way = bipartite_blocks(PairKind::OneWay);
            VertexSet one = local_vertices(Scenario(1));
            std::vector<std::vector<std::vector<int>>> groupings{
                {{spec.signaler, spec.receiver}, others(3, {spec.signaler, spec.receiver})}};
            std::vector<std::vector<const VertexSet*>> blocks{{&one_way, &one}};
            return grouped_model(s, groupings, blocks, spec.str(), false);
        }
        case ModelKind::PtoOrder: {
            VertexSet one_way = bipartite_blocks(PairKind::OneWay);
            VertexSet one = local_vertices(Scenario(1));
            std::vector<std::vector<std::vector<int>>> groupings;
            // the three directed pairs consistent with the total order
            const auto& t = spec.order;
            for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}})
                groupings.push_back({{t[i], t[j]}, others(3, {t[i], t[j]})});
            std::vector<std::vector<const VertexSet*>> blocks(groupings.size(), {&one_way, &one});
            return grouped_model(s, groupings, blocks, spec.str(), false);
        }
        case ModelKind::PtoFull: {
            VertexSet one_way = bipartite_blocks(PairKind::OneWay);
            VertexSet one = local_vertices(Scenario(1));
            std::vector<std::vector<std::vector<int>>> groupings;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    if (a != b) groupings.push_back({{a, b}, others(3, {a, b})});
            std::vector<std::vector<const VertexSet*>> blocks(groupings.size(), {&one_way, &one});
            return grouped_model(s, groupings, blocks, spec.str(), false);
        }
        case ModelKind::NsPair: {
            VertexSet ns = bipartite_blocks(PairKind::NonSignaling);
            VertexSet one = local_vertices(Scenario(1));
            std::vector<std::vector<std::vector<int>>> groupings{
                {{spec.pair_a, spec.pair_b}, others(3, {spec.pair_a, spec.pair_b})}};
            std::vector<std::vector<const VertexSet*>> blocks{{&ns, &one}};
            return grouped_model(s, groupings, blocks, spec.str(), true);
        }
        case ModelKind::Ns21: {
            VertexSet ns = bipartite_blocks(PairKind::NonSignaling);
            VertexSet one = local_vertices(Scenario(1));
            std::vector<std::vector<std::vector<int>>> groupings;
            for (int a = 0; a < 3; ++a)
                for (int b = a + 1; b < 3; ++b) groupings.push_back({{a, b}, others(3, {a, b})});
            std::vector<std::vector<const VertexSet*>> blocks(groupings.size(), {&ns, &one});
            return grouped_model(s, groupings, blocks, spec.str(), true);
        }
        case ModelKind::Ns22: {
            VertexSet ns = bipartite_blocks(PairKind::NonSignaling);
            std::vector<std::vector<std::vector<int>>> groupings{
                {{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}, {{0, 3}, {1, 2}}};
            std::vector<std::vector<const VertexSet*>> blocks(groupings.size(), {&ns, &ns});
            return grouped_model(s, groupings, blocks, spec.str(), true);
        }
        case ModelKind::Ns31: {
            VertexSet ns3 = read_ns3_file(spec.ns3_path);
            VertexSet one = local_vertices(Scenario(1));
            std::vector<std::vector<std::vector<int>>> groupings;
            for (int a = 0; a < 4; ++a) groupings.push_back({others(4, {a}), {a}});
            std::vector<std::vector<const VertexSet*>> blocks(groupings.size(), {&ns3, &one});
            return grouped_model(s, groupings, blocks, "NS[3/1]", true);
        }
        case ModelKind::Hull: {
            std::vector<VertexSet> parts;
            parts.reserve(spec.parts.size());
            for (const auto& p : spec.parts) parts.push_back(build_vertices(p));
            return merge_sets(parts, spec.str(), spec.is_ns());
        }
    }
    throw std::logic_error("build_vertices: unhandled model kind");
}

}  // namespace bell
