// bellpoly: correlation polytopes for multipartite Bell scenarios.
//
// Subcommands wrap the library operations file-in/file-out: vertex
// enumeration for the model catalog, LP membership/visibility queries,
// quantum behavior evaluation, facet enumeration, inequality
// canonicalization, see-saw optimization, and one-shot reproduction of the
// headline tables. Every artifact embeds a run manifest; wall time goes to
// stderr so reruns of the same command + inputs + seed are byte-identical.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bell/correlators.hpp"
#include "bell/dd.hpp"
#include "bell/enumeration.hpp"
#include "bell/io.hpp"
#include "bell/lp.hpp"
#include "bell/quantum.hpp"
#include "bell/relabeling.hpp"
#include "bell/symmetrize.hpp"

namespace {

using nlohmann::ordered_json;

struct CommonOpts {
    std::string backend = "float";
    double tol = 1e-9;
    std::uint64_t seed = 1;
    int threads = 0;
    bool long_run = false;
    std::string out;
    std::string command;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--backend", c.backend, "numeric backend")
        ->check(CLI::IsMember({"rational", "float"}))
        ->capture_default_str();
    cmd->add_option("--tol", c.tol, "float-backend feasibility tolerance")->capture_default_str();
    cmd->add_option("--seed", c.seed, "seed for randomized restarts")->capture_default_str();
    cmd->add_option("--threads", c.threads, "worker threads (0 = hardware)")->capture_default_str();
    cmd->add_flag("--long", c.long_run, "allow long-running modes");
    cmd->add_option("--out", c.out, "output artifact path (default: stdout)");
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bell::RunManifest make_manifest(const CommonOpts& c) {
    bell::RunManifest m;
    m.command = c.command;
    m.backend = c.backend;
    m.seed = c.seed;
    return m;
}

void add_input(bell::RunManifest& mf, const std::string& path) {
    mf.inputs.emplace_back(path, bell::fnv1a64_file_hex(path));
}

void collect_ns3_paths(const bell::ModelSpec& spec, std::vector<std::string>& paths) {
    if (spec.kind == bell::ModelKind::Ns31) paths.push_back(spec.ns3_path);
    for (const auto& part : spec.parts) collect_ns3_paths(part, paths);
}

bell::VertexSet model_vertices(const bell::ModelSpec& spec, bell::RunManifest& mf) {
    std::vector<std::string> ns3;
    collect_ns3_paths(spec, ns3);
    for (const auto& p : ns3) add_input(mf, p);
    return bell::build_vertices(spec);
}

bell::LpQueryOptions lp_options(const CommonOpts& c) {
    bell::LpQueryOptions o;
    o.tol = c.tol;
    o.threads = c.threads;
    return o;
}

// Query sources shared by membership / visibility / eval: an explicit
// behavior file, or a quantum setup (named or JSON file) evaluated on the
// fly, optionally white-noise mixed.
struct QuerySource {
    std::string behavior_path;
    std::string setup_name;
    double w = -1;        // < 0: keep the setup's own visibility
    std::string mix_v;    // rational literal; empty = no mixing
};

bool looks_like_file(const std::string& name) {
    return std::filesystem::exists(name);
}

bell::QuantumSetup load_setup(const std::string& name, double w, bell::RunManifest& mf) {
    bell::QuantumSetup s;
    if (looks_like_file(name)) {
        s = bell::read_setup_file(name);
        add_input(mf, name);
    } else {
        s = bell::named_setup(name);
    }
    if (w >= 0) {
        if (w > 1) throw UsageError("--w must lie in [0,1]");
        s.visibility_w = w;
    }
    return s;
}

bell::BehaviorQ exact_rational(const bell::BehaviorD& P) {
    bell::BehaviorQ out(P.scenario);
    for (int i = 0; i < P.scenario.cells(); ++i) out.p[i] = bell::Rat(P.p[i]);
    // The dyadic image of float data misses exact normalization and exact
    // no-signaling by rounding dust, which exact arithmetic reads as a
    // genuinely off-hull query. Restore normalization per setting, then snap
    // data that is nonsignaling at float precision onto the no-signaling
    // subspace by rebuilding the table from its correlators.
    for (int x = 0; x < P.scenario.inputs(); ++x) {
        bell::Rat s = 0;
        for (int o = 0; o < P.scenario.outputs(); ++o) s += out.p[P.scenario.cell(x, o)];
        if (s == 0) throw UsageError("behavior row for one setting sums to zero");
        for (int o = 0; o < P.scenario.outputs(); ++o) out.p[P.scenario.cell(x, o)] /= s;
    }
    if (bell::is_nonsignaling(P, 1e-9)) {
        out = bell::from_correlators(bell::to_correlators(out), bell::Rat(1, 1000000000));
    } else {
        std::cerr << "note: float query signals beyond 1e-9, so its exact conversion keeps the "
                     "dyadic table; rounding residue in such a table can legitimately fall "
                     "outside a model. --backend float is the natural fit for float data.\n";
    }
    return out;
}

bell::BehaviorQ load_query_rational(const QuerySource& q, bell::RunManifest& mf) {
    bell::BehaviorQ P;
    if (!q.behavior_path.empty()) {
        std::string text = bell::read_text_file(q.behavior_path);
        mf.inputs.emplace_back(q.behavior_path, bell::fnv1a64_hex(text));
        P = bell::behavior_json_backend(text) == bell::JsonBackend::Rational
                ? bell::behavior_from_json_rational(text)
                : exact_rational(bell::behavior_from_json_float(text));
    } else if (!q.setup_name.empty()) {
        P = exact_rational(bell::behavior_from_setup(load_setup(q.setup_name, q.w, mf)));
    } else {
        throw UsageError("need --behavior or --setup");
    }
    if (!q.mix_v.empty()) P = bell::mix(P, bell::parse_rational(q.mix_v));
    return P;
}

bell::BehaviorD load_query_float(const QuerySource& q, bell::RunManifest& mf) {
    bell::BehaviorD P;
    if (!q.behavior_path.empty()) {
        std::string text = bell::read_text_file(q.behavior_path);
        mf.inputs.emplace_back(q.behavior_path, bell::fnv1a64_hex(text));
        P = bell::behavior_json_backend(text) == bell::JsonBackend::Rational
                ? bell::to_float(bell::behavior_from_json_rational(text))
                : bell::behavior_from_json_float(text);
    } else if (!q.setup_name.empty()) {
        P = bell::behavior_from_setup(load_setup(q.setup_name, q.w, mf));
    } else {
        throw UsageError("need --behavior or --setup");
    }
    if (!q.mix_v.empty()) P = bell::mix(P, std::stod(q.mix_v));
    return P;
}

bell::BellInequality load_inequality(const std::string& name, bell::RunManifest& mf) {
    for (const auto& known : bell::named_inequality_names())
        if (name == known) return bell::named_inequality(name);
    if (!looks_like_file(name)) throw UsageError("unknown inequality '" + name + "' (named: chsh, svetlichny, i-opt, i-ns3; or a CSV file)");
    add_input(mf, name);
    return bell::read_inequality_file(name);
}

void write_artifact(const CommonOpts& c, const std::string& text) {
    if (!c.out.empty()) bell::write_text_file(c.out, text);
}

// ---------------------------------------------------------------- vertices

int cmd_vertices(const CommonOpts& c, const std::string& model_str) {
    bell::ModelSpec spec = bell::parse_model(model_str);
    std::vector<std::string> ns3;
    collect_ns3_paths(spec, ns3);
    if (!ns3.empty() && !c.long_run)
        throw UsageError("NS[3/1] enumeration is long-running; pass --long");
    bell::RunManifest mf = make_manifest(c);
    bell::VertexSet vs = model_vertices(spec, mf);
    std::ostringstream count_line;
    count_line << vs.model << ": " << vs.size() << " vertices\n";
    if (c.out.empty()) {
        bell::write_vertex_file(std::cout, vs, &mf);
        std::cerr << count_line.str();
    } else {
        bell::write_vertex_file(c.out, vs, &mf);
        std::cout << count_line.str();
    }
    return 0;
}

// -------------------------------------------------------------- membership

template <class T>
ordered_json weights_json(const std::vector<std::pair<std::size_t, T>>& weights) {
    ordered_json w = ordered_json::object();
    for (const auto& [idx, val] : weights) {
        if constexpr (std::is_same_v<T, bell::Rat>) w[std::to_string(idx)] = bell::format_rational(val);
        else w[std::to_string(idx)] = val;
    }
    return w;
}

template <class T>
ordered_json certificate_json(const bell::SeparatingCertificate<T>& cert, const bell::VertexSet& vs) {
    ordered_json j;
    j["space"] = cert.correlator_space ? "correlator" : "probability";
    ordered_json coeffs = ordered_json::array();
    for (const auto& v : cert.coeffs) {
        if constexpr (std::is_same_v<T, bell::Rat>) coeffs.push_back(bell::format_rational(v));
        else coeffs.push_back(v);
    }
    j["coeffs"] = std::move(coeffs);
    if constexpr (std::is_same_v<T, bell::Rat>) {
        j["offset"] = bell::format_rational(cert.offset);
        j["query_value"] = bell::format_rational(cert.query_value);
        j["vertex_max"] = bell::format_rational(cert.vertex_max);
        if (cert.correlator_space)
            j["inequality_csv"] = bell::inequality_csv(
                bell::BellInequality(vs.scenario, cert.coeffs, cert.offset, vs.model));
    } else {
        j["offset"] = cert.offset;
        j["query_value"] = cert.query_value;
        j["vertex_max"] = cert.vertex_max;
    }
    return j;
}

template <class T>
int report_membership(const CommonOpts& c, const bell::MembershipResult<T>& res, const bell::VertexSet& vs,
                      const bell::RunManifest& mf) {
    ordered_json j;
    j["verdict"] = res.inside ? "inside" : "outside";
    j["model"] = vs.model;
    j["vertices"] = vs.size();
    j["backend"] = c.backend;
    j["lp_iterations"] = res.lp_iterations;
    j["used_colgen"] = res.used_colgen;
    if (res.inside) j["weights"] = weights_json(res.weights);
    else j["certificate"] = certificate_json(res.certificate, vs);
    j["manifest"] = ordered_json::parse(mf.json());
    if (res.inside) {
        std::cout << "inside " << vs.model << " (" << res.weights.size() << " vertices in support)\n";
    } else {
        std::cout << "outside " << vs.model << " (separating functional certified)\n";
    }
    write_artifact(c, j.dump(2) + "\n");
    return 0;
}

int cmd_membership(const CommonOpts& c, const QuerySource& q, const std::string& model_str) {
    bell::RunManifest mf = make_manifest(c);
    bell::ModelSpec spec = bell::parse_model(model_str);
    bell::VertexSet vs = model_vertices(spec, mf);
    if (c.backend == "rational") {
        bell::BehaviorQ P = load_query_rational(q, mf);
        return report_membership(c, bell::membership(P, vs, lp_options(c)), vs, mf);
    }
    bell::BehaviorD P = load_query_float(q, mf);
    return report_membership(c, bell::membership(P, vs, lp_options(c)), vs, mf);
}

// -------------------------------------------------------------- visibility

template <class T>
int report_visibility(const CommonOpts& c, const bell::VisibilityResult<T>& res, const bell::VertexSet& vs,
                      const bell::RunManifest& mf) {
    ordered_json j;
    j["model"] = vs.model;
    j["vertices"] = vs.size();
    j["backend"] = c.backend;
    j["lp_iterations"] = res.lp_iterations;
    j["used_colgen"] = res.used_colgen;
    if constexpr (std::is_same_v<T, bell::Rat>) {
        j["v"] = bell::format_rational(res.v);
        std::cout << "visibility = " << bell::format_rational(res.v) << " ("
                  << bell::format_double(bell::to_double(res.v)) << ")\n";
    } else {
        j["v"] = res.v;
        std::cout << "visibility = " << bell::format_double(res.v) << "\n";
    }
    j["weights"] = weights_json(res.weights);
    j["manifest"] = ordered_json::parse(mf.json());
    write_artifact(c, j.dump(2) + "\n");
    return 0;
}

int cmd_visibility(const CommonOpts& c, const QuerySource& q, const std::string& model_str,
                   const std::string& noise_path) {
    bell::RunManifest mf = make_manifest(c);
    bell::ModelSpec spec = bell::parse_model(model_str);
    bell::VertexSet vs = model_vertices(spec, mf);
    if (c.backend == "rational") {
        bell::BehaviorQ P = load_query_rational(q, mf);
        if (noise_path.empty()) return report_visibility(c, bell::visibility(P, vs, lp_options(c)), vs, mf);
        QuerySource nq;
        nq.behavior_path = noise_path;
        bell::BehaviorQ noise = load_query_rational(nq, mf);
        return report_visibility(c, bell::visibility(P, vs, noise, lp_options(c)), vs, mf);
    }
    bell::BehaviorD P = load_query_float(q, mf);
    if (noise_path.empty()) return report_visibility(c, bell::visibility(P, vs, lp_options(c)), vs, mf);
    QuerySource nq;
    nq.behavior_path = noise_path;
    bell::BehaviorD noise = load_query_float(nq, mf);
    return report_visibility(c, bell::visibility(P, vs, noise, lp_options(c)), vs, mf);
}

// -------------------------------------------------------------------- eval

int cmd_eval(const CommonOpts& c, const QuerySource& q, const std::string& ineq_name) {
    if (q.setup_name.empty()) throw UsageError("eval needs --setup (named or JSON file)");
    bell::RunManifest mf = make_manifest(c);
    bell::QuantumSetup setup = load_setup(q.setup_name, q.w, mf);
    bell::BehaviorD P = bell::behavior_from_setup(setup);
    if (!q.mix_v.empty()) P = bell::mix(P, std::stod(q.mix_v));
    if (!ineq_name.empty()) {
        bell::BellInequality ineq = load_inequality(ineq_name, mf);
        if (ineq.scenario != P.scenario) throw UsageError("inequality and setup party counts differ");
        double value = bell::evaluate(ineq, P);
        double bound = bell::to_double(ineq.bound);
        std::cout << "value = " << bell::format_double(value) << "\n";
        std::cout << "bound = " << bell::format_rational(ineq.bound) << "\n";
        bool violated = value > bound + c.tol;
        std::cout << "violated = " << (violated ? "yes" : "no") << "\n";
        if (violated && q.mix_v.empty()) {
            double w = bell::state_visibility_threshold(ineq, setup);
            std::cout << "state visibility threshold = " << bell::format_double(w) << "\n";
        }
    }
    std::string artifact = bell::behavior_json(P, &mf);
    if (ineq_name.empty() && c.out.empty()) std::cout << artifact;
    write_artifact(c, artifact);
    return 0;
}

// ------------------------------------------------------------------ facets

int cmd_facets(const CommonOpts& c, const std::string& model_str, const std::string& points_path, bool sym,
               const std::string& checkpoint, bool resume) {
    CommonOpts cr = c;
    cr.backend = "rational";  // facet enumeration is exact-only
    bell::RunManifest mf = make_manifest(cr);
    bell::VertexSet vs;
    if (!points_path.empty()) {
        add_input(mf, points_path);
        vs = bell::read_vertex_file(points_path);
    } else if (!model_str.empty()) {
        vs = model_vertices(bell::parse_model(model_str), mf);
    } else {
        throw UsageError("facets needs --model or --points");
    }
    for (std::size_t i = 0; i < vs.size(); ++i)
        if (!bell::is_nonsignaling(vs.behavior(i)))
            throw UsageError("facet enumeration runs in correlator space and needs nonsignaling vertices");

    bell::SymmetricBasis basis;
    std::vector<std::vector<bell::Rat>> points;
    if (sym) {
        basis = bell::symmetric_basis(vs.scenario);
        points = bell::symmetrize_vertices(basis, vs);
        if (vs.scenario.n == 4 && !c.long_run)
            throw UsageError("the symmetrized four-party facet run is long-running; pass --long");
    } else {
        points.reserve(vs.size());
        for (std::size_t i = 0; i < vs.size(); ++i) points.push_back(vs.correlators(i).c);
    }

    bell::DdOptions dopt;
    dopt.threads = c.threads;
    dopt.checkpoint_path = checkpoint;
    dopt.resume = resume;
    if (c.long_run) dopt.log = [](const std::string& m) { std::cerr << "# " << m << "\n"; };
    bell::FacetResult fr = bell::facet_enumerate(points, dopt);

    std::ostringstream out;
    out << "# bellpoly facets: model=" << vs.model << " points=" << points.size()
        << (sym ? " space=symmetric" : " space=correlator") << "\n";
    out << "# dim=" << fr.dim << " facets=" << fr.facets.size() << " equalities=" << fr.equalities.size() << "\n";
    out << "# manifest: " << mf.json() << "\n";
    for (const auto& eq : fr.equalities) {
        out << "# equality:";
        for (const auto& v : eq.a) out << " " << bell::format_rational(v);
        out << " = " << bell::format_rational(eq.b) << "\n";
    }
    for (const auto& f : fr.facets) {
        bell::BellInequality ineq = sym ? bell::lift_symmetric(basis, f.a, f.b, vs.model)
                                        : bell::BellInequality(vs.scenario, f.a, f.b, vs.model);
        out << bell::inequality_csv(ineq);
    }
    if (c.out.empty()) std::cout << out.str();
    else bell::write_text_file(c.out, out.str());
    std::ostream& log = c.out.empty() ? std::cerr : std::cout;
    log << "dim=" << fr.dim << " facets=" << fr.facets.size() << " equalities=" << fr.equalities.size() << "\n";
    return 0;
}

// ------------------------------------------------------------------- canon

int cmd_canon(const CommonOpts& c, const std::string& ineq_name) {
    bell::RunManifest mf = make_manifest(c);
    std::vector<bell::BellInequality> inputs;
    bool named = false;
    for (const auto& known : bell::named_inequality_names())
        if (ineq_name == known) named = true;
    if (named) {
        inputs.push_back(bell::named_inequality(ineq_name));
    } else {
        if (!looks_like_file(ineq_name)) throw UsageError("unknown inequality '" + ineq_name + "'");
        add_input(mf, ineq_name);
        std::istringstream in(bell::read_text_file(ineq_name));
        while (auto ineq = bell::read_inequality_csv(in)) inputs.push_back(std::move(*ineq));
        if (inputs.empty()) throw UsageError("no inequality blocks in " + ineq_name);
    }

    struct Family {
        std::string hash;
        std::uint64_t orbit = 0;
        std::string csv;
        int members = 0;
    };
    std::vector<Family> families;
    for (const auto& ineq : inputs) {
        bell::CanonicalForm cf = bell::canonicalize(ineq, c.threads);
        bool found = false;
        for (auto& fam : families)
            if (fam.hash == cf.hash) {
                ++fam.members;
                found = true;
                break;
            }
        if (!found) families.push_back({cf.hash, cf.orbit_size, bell::inequality_csv(cf.ineq), 1});
    }

    std::ostringstream out;
    out << "# bellpoly canon catalog: inputs=" << inputs.size() << " families=" << families.size() << "\n";
    out << "# manifest: " << mf.json() << "\n";
    for (const auto& fam : families) {
        out << "FAMILY," << fam.hash << "," << fam.orbit << "," << fam.members << "\n";
        out << fam.csv;
    }
    if (c.out.empty()) std::cout << out.str();
    else bell::write_text_file(c.out, out.str());
    std::ostream& log = c.out.empty() ? std::cerr : std::cout;
    for (const auto& fam : families)
        log << "hash=" << fam.hash << " orbit=" << fam.orbit << " members=" << fam.members << "\n";
    return 0;
}

// ------------------------------------------------------------------ seesaw

int cmd_seesaw(const CommonOpts& c, const std::string& ineq_name, int restarts, int sweeps,
               const std::string& state_name) {
    bell::RunManifest mf = make_manifest(c);
    bell::BellInequality ineq = load_inequality(ineq_name, mf);
    bell::SeesawOptions so;
    so.restarts = restarts;
    so.seed = c.seed;
    so.threads = c.threads;
    so.max_sweeps = sweeps;
    std::optional<Eigen::VectorXcd> fixed;
    if (!state_name.empty()) {
        bell::QuantumSetup s = load_setup(state_name, -1, mf);
        if (s.n != ineq.scenario.n) throw UsageError("fixed state has the wrong party count");
        fixed = s.state;
    }
    bell::SeesawResult res = bell::seesaw_maximize(ineq, ineq.scenario.n, so, fixed ? &*fixed : nullptr);
    std::cout << "value = " << bell::format_double(res.value) << "\n";
    std::cout << "bound = " << bell::format_rational(ineq.bound) << "\n";
    std::cout << "sweeps = " << res.sweeps << "\n";
    std::cout << "monotone = " << (res.monotone ? "yes" : "no") << "\n";
    write_artifact(c, bell::setup_json(res.setup, &mf));
    return 0;
}

// --------------------------------------------------------------------- ns3

// Extreme points of the tripartite NS polytope by H -> V conversion:
// nonnegativity, per-input normalization, and no-signaling equalities.
int cmd_ns3(const CommonOpts& c, const std::string& checkpoint, bool resume) {
    if (!c.long_run) throw UsageError("ns3 enumeration is long-running; pass --long");
    bell::RunManifest mf = make_manifest(c);
    bell::Scenario s(3);
    const int d = s.cells();
    std::vector<bell::LinearInequality> rows;
    for (int cell = 0; cell < d; ++cell) {
        bell::LinearInequality r;
        r.a.assign(d, 0);
        r.a[cell] = -1;
        rows.push_back(std::move(r));
    }
    auto push_equality = [&](const std::vector<bell::Rat>& a, const bell::Rat& b) {
        bell::LinearInequality le{a, b};
        rows.push_back(le);
        for (auto& v : le.a) v = -v;
        le.b = -b;
        rows.push_back(std::move(le));
    };
    for (int x = 0; x < s.inputs(); ++x) {
        std::vector<bell::Rat> a(d, 0);
        for (int o = 0; o < s.outputs(); ++o) a[s.cell(x, o)] = 1;
        push_equality(a, 1);
    }
    for (int party = 0; party < s.n; ++party) {
        int bit = s.party_bit(party);
        for (int x_rest = 0; x_rest < s.inputs(); ++x_rest) {
            if (x_rest & bit) continue;
            for (int o_rest = 0; o_rest < s.outputs(); ++o_rest) {
                if (o_rest & bit) continue;
                std::vector<bell::Rat> a(d, 0);
                for (int out = 0; out < 2; ++out) {
                    int o = o_rest | (out ? bit : 0);
                    a[s.cell(x_rest, o)] += 1;
                    a[s.cell(x_rest | bit, o)] -= 1;
                }
                push_equality(a, 0);
            }
        }
    }

    bell::DdOptions dopt;
    dopt.threads = c.threads;
    dopt.checkpoint_path = checkpoint;
    dopt.resume = resume;
    dopt.log = [](const std::string& m) { std::cerr << "# " << m << "\n"; };
    bell::VertexResult vr = bell::vertex_enumerate(rows, dopt);
    if (!vr.rays.empty()) throw std::logic_error("ns3: unexpected unbounded direction");

    std::int64_t denom = 1;
    for (const auto& v : vr.vertices)
        for (const auto& q : v) denom = std::lcm(denom, denominator(q).convert_to<std::int64_t>());
    bell::VertexSet vs;
    vs.scenario = s;
    vs.model = "NS3";
    vs.ns_model = true;
    vs.denom = denom;
    for (const auto& v : vr.vertices) {
        std::vector<std::int32_t> row(d);
        for (int i = 0; i < d; ++i) {
            bell::Rat scaled = v[i] * denom;
            row[i] = static_cast<std::int32_t>(numerator(scaled).convert_to<std::int64_t>());
        }
        vs.tables.push_back(std::move(row));
    }
    bell::sort_dedup(vs);
    std::ostringstream count_line;
    count_line << "NS3: " << vs.size() << " vertices\n";
    if (c.out.empty()) {
        bell::write_vertex_file(std::cout, vs, &mf);
        std::cerr << count_line.str();
    } else {
        bell::write_vertex_file(c.out, vs, &mf);
        std::cout << count_line.str();
    }
    return 0;
}

// --------------------------------------------------------------- reproduce

struct CheckRow {
    std::string label;
    std::string computed;
    std::string expected;
    std::string status;  // PASS / FAIL / WARN
};

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

CheckRow num_row(const std::string& label, double computed, double expected, double tol, bool warn_only = false) {
    bool ok = std::abs(computed - expected) <= tol;
    return {label, fixed6(computed), fixed6(expected), ok ? "PASS" : (warn_only ? "WARN" : "FAIL")};
}

int print_report(const std::string& target, const std::vector<CheckRow>& rows) {
    std::cout << "target: " << target << "\n";
    std::size_t width = 24;
    for (const auto& r : rows) width = std::max(width, r.label.size() + 2);
    for (const auto& r : rows) {
        std::cout << r.label << std::string(width - r.label.size(), ' ') << r.computed;
        std::cout << std::string(r.computed.size() < 14 ? 14 - r.computed.size() : 1, ' ') << r.expected;
        std::cout << std::string(r.expected.size() < 14 ? 14 - r.expected.size() : 1, ' ') << r.status << "\n";
    }
    int fails = 0, warns = 0;
    for (const auto& r : rows) {
        fails += r.status == "FAIL";
        warns += r.status == "WARN";
    }
    std::cout << "result: " << (fails ? "FAIL" : "PASS") << " (" << (rows.size() - fails - warns) << "/"
              << rows.size() << " rows";
    if (warns) std::cout << ", " << warns << " warnings";
    std::cout << ")\n";
    return fails ? 1 : 0;
}

double model_visibility(const bell::BehaviorD& P, const std::string& model_str, const CommonOpts& c) {
    bell::ModelSpec spec = bell::parse_model(model_str);
    bell::VertexSet vs = bell::build_vertices(spec);
    return bell::visibility(P, vs, lp_options(c)).v;
}

int reproduce_table(const CommonOpts& c, const std::string& target,
                    const std::vector<std::pair<std::string, double>>& rows_spec) {
    bell::BehaviorD P = bell::behavior_from_setup(bell::named_setup("W3_paper"));
    std::vector<CheckRow> rows;
    for (const auto& [model, expected] : rows_spec)
        rows.push_back(num_row(model, model_visibility(P, model, c), expected, 1e-4));
    return print_report(target, rows);
}

int reproduce_table1(const CommonOpts& c) {
    return reproduce_table(c, "table1",
                           {{"SV[2|1]", 0.9548},
                            {"PTO[2/1]", 0.9339},
                            {"PTO[order=B<C<A]", 0.9138},
                            {"PTO[order=A<B<C]", 0.8931},
                            {"PTO[order=A<C<B]", 0.8931},
                            {"PTO[order=B<A<C]", 0.8931},
                            {"PTO[order=C<A<B]", 0.8931},
                            {"PTO[order=C<B<A]", 0.8931},
                            {"HULL(PTO[B<C];PTO[C<B])", 0.8420},
                            {"HULL(PTO[A<B];PTO[B<A])", 0.8318},
                            {"HULL(PTO[A<C];PTO[C<A])", 0.8318},
                            {"PTO[A<B]", 0.8212},
                            {"PTO[A<C]", 0.8212},
                            {"PTO[B<A]", 0.7120},
                            {"PTO[B<C]", 0.7120},
                            {"PTO[C<A]", 0.7120},
                            {"PTO[C<B]", 0.7120},
                            {"L[3]", 0.7120}});
}

int reproduce_table2(const CommonOpts& c) {
    return reproduce_table(c, "table2",
                           {{"NS[2/1]", 0.8477},
                            {"HULL(NS[A,B];NS[A,C])", 0.8212},
                            {"HULL(NS[A,B];NS[B,C])", 0.7120},
                            {"HULL(NS[A,C];NS[B,C])", 0.7120},
                            {"NS[A,B]", 0.7120},
                            {"NS[A,C]", 0.7120},
                            {"NS[B,C]", 0.7120},
                            {"L[3]", 0.7120}});
}

const char* const kTripartiteModels[] = {
    "L[3]",
    "NS[A,B]", "NS[A,C]", "NS[B,C]", "NS[2/1]",
    "PTO[A<B]", "PTO[A<C]", "PTO[B<A]", "PTO[B<C]", "PTO[C<A]", "PTO[C<B]",
    "PTO[order=A<B<C]", "PTO[order=A<C<B]", "PTO[order=B<A<C]",
    "PTO[order=B<C<A]", "PTO[order=C<A<B]", "PTO[order=C<B<A]",
    "PTO[2/1]", "SV[2|1]",
};

int reproduce_ghz_boundary(const CommonOpts& c) {
    bell::BehaviorD P = bell::behavior_from_setup(bell::named_setup("GHZ3_paper"));
    const double vc = 1.0 / std::sqrt(2.0);
    bell::BehaviorD below = bell::mix(P, vc - 1e-6);
    bell::BehaviorD above = bell::mix(P, vc + 1e-6);
    std::vector<CheckRow> rows;
    for (const char* model : kTripartiteModels) {
        bell::VertexSet vs = bell::build_vertices(bell::parse_model(model));
        bool in_below = bell::membership(below, vs, lp_options(c)).inside;
        bool in_above = bell::membership(above, vs, lp_options(c)).inside;
        bool ok = in_below && !in_above;
        rows.push_back({model,
                        std::string(in_below ? "inside" : "outside") + "/" + (in_above ? "inside" : "outside"),
                        "inside/outside", ok ? "PASS" : "FAIL"});
    }
    return print_report("ghz-boundary", rows);
}

int reproduce_svetlichny(const CommonOpts& c) {
    bell::BellInequality sv = bell::named_inequality("svetlichny");
    bell::BehaviorD P = bell::behavior_from_setup(bell::named_setup("GHZ3_paper"));
    std::vector<CheckRow> rows;
    rows.push_back(num_row("value(svetlichny, GHZ3)", bell::evaluate(sv, P), 4.0 * std::sqrt(2.0), 1e-4));
    bell::VertexSet vs = bell::build_vertices(bell::parse_model("SV[2|1]"));
    bell::VertexMax vm = bell::max_over_vertices(sv, vs, c.threads);
    rows.push_back({"max over SV[2|1]", bell::format_rational(vm.value), "4", vm.value == 4 ? "PASS" : "FAIL"});
    return print_report("svetlichny", rows);
}

int reproduce_ineq_opt(const CommonOpts& c) {
    bell::BellInequality ineq = bell::named_inequality("i-opt");
    bell::QuantumSetup setup = bell::named_setup("PSI_OPT");
    bell::VertexSet vs = bell::build_vertices(bell::parse_model("NS[2/2]"));
    std::vector<CheckRow> rows;
    bell::VertexMax vm = bell::max_over_vertices(ineq, vs, c.threads);
    rows.push_back({"max over NS[2/2]", bell::format_rational(vm.value), "19", vm.value == 19 ? "PASS" : "FAIL"});
    double value = bell::evaluate(ineq, bell::behavior_from_setup(setup));
    const double value_expected = 11.0 + 8.0 * std::sqrt(5.0);
    rows.push_back(num_row("value at PSI_OPT", value, value_expected, 1e-4));
    double w = bell::state_visibility_threshold(ineq, setup);
    rows.push_back(num_row("state visibility threshold", w, 19.0 / value_expected, 1e-4));
    bell::BehaviorD P = bell::behavior_from_setup(setup);
    double v = bell::visibility(P, vs, lp_options(c)).v;
    rows.push_back(num_row("LP visibility vs NS[2/2]", v, 19.0 / value_expected, 1e-4));
    return print_report("ineq-opt", rows);
}

int reproduce_ineq_ns3(const CommonOpts& c) {
    bell::BellInequality ineq = bell::named_inequality("i-ns3");
    bell::VertexSet vs = bell::build_vertices(bell::parse_model("NS[2/2]"));
    std::vector<CheckRow> rows;
    bell::VertexMax vm = bell::max_over_vertices(ineq, vs, c.threads);
    rows.push_back({"max over NS[2/2]", bell::format_rational(vm.value), "10", vm.value == 10 ? "PASS" : "FAIL"});
    bell::SeesawOptions so;
    so.restarts = 200;
    so.seed = c.seed;
    so.threads = c.threads;
    bell::SeesawResult free_state = bell::seesaw_maximize(ineq, 4, so);
    CheckRow seesaw = num_row("see-saw value (free state)", free_state.value, 12.8062, 1e-2, true);
    if (free_state.value >= 12.80) seesaw.status = "PASS";
    rows.push_back(seesaw);
    Eigen::VectorXcd ghz4 = bell::named_setup("GHZ4").state;
    bell::SeesawResult fixed = bell::seesaw_maximize(ineq, 4, so, &ghz4);
    rows.push_back(num_row("state visibility (GHZ4 fixed)", 10.0 / fixed.value, 0.7809, 1e-2, true));
    return print_report("ineq-ns3", rows);
}

int reproduce_sym_vertices(const CommonOpts& c) {
    bell::VertexSet vs = bell::build_vertices(bell::parse_model("NS[2/2]"));
    bell::SymmetricBasis basis = bell::symmetric_basis(vs.scenario);
    std::vector<std::vector<bell::Rat>> pts = bell::symmetrize_vertices(basis, vs);
    std::vector<CheckRow> rows;
    rows.push_back({"NS[2/2] extreme points", std::to_string(vs.size()), "1216", vs.size() == 1216 ? "PASS" : "FAIL"});
    rows.push_back({"symmetric dimension", std::to_string(basis.dims()), "14", basis.dims() == 14 ? "PASS" : "FAIL"});
    rows.push_back({"symmetrized points", std::to_string(pts.size()), "116", pts.size() == 116 ? "PASS" : "FAIL"});
    if (!c.out.empty()) {
        bell::RunManifest mf = make_manifest(c);
        std::ostringstream out;
        out << "# bellpoly sym-vertices: count=" << pts.size() << " dim=" << basis.dims() << "\n";
        out << "# manifest: " << mf.json() << "\n";
        for (const auto& p : pts) {
            for (std::size_t i = 0; i < p.size(); ++i) out << (i ? "," : "") << bell::format_rational(p[i]);
            out << "\n";
        }
        bell::write_text_file(c.out, out.str());
    }
    return print_report("sym-vertices", rows);
}

int cmd_reproduce(const CommonOpts& c, const std::string& target) {
    if (c.backend != "float")
        throw UsageError("reproduce targets run on the float backend (exact gates are built in)");
    if (target == "table1") return reproduce_table1(c);
    if (target == "table2") return reproduce_table2(c);
    if (target == "ghz-boundary") return reproduce_ghz_boundary(c);
    if (target == "svetlichny") return reproduce_svetlichny(c);
    if (target == "ineq-opt") return reproduce_ineq_opt(c);
    if (target == "ineq-ns3") return reproduce_ineq_ns3(c);
    if (target == "sym-vertices") return reproduce_sym_vertices(c);
    if (target == "all") {
        int rc = 0;
        for (const char* t : {"table1", "table2", "ghz-boundary", "svetlichny", "ineq-opt", "ineq-ns3",
                              "sym-vertices"}) {
            rc |= cmd_reproduce(c, t);
            std::cout << "\n";
        }
        return rc;
    }
    throw UsageError("unknown reproduce target '" + target + "'");
}

}  // namespace

int main(int argc, char** argv) {
    std::string cmdline;
    for (int i = 0; i < argc; ++i) {
        if (i) cmdline += ' ';
        cmdline += argv[i];
    }

    CLI::App app{"bellpoly: correlation polytopes for multipartite Bell scenarios"};
    app.require_subcommand(1);

    CommonOpts c;
    c.command = cmdline;

    std::function<int()> action;

    std::string model_str, points_path, noise_path, ineq_name, target, checkpoint, state_name;
    QuerySource query;
    bool sym = false, resume = false;
    int restarts = 50, sweeps = 400;

    auto* vert = app.add_subcommand("vertices", "enumerate the extreme points of a model");
    vert->add_option("model", model_str, "model spec, e.g. NS[2/2] or HULL(PTO[A<B];PTO[B<A])")->required();
    add_common(vert, c);
    vert->callback([&] { action = [&] { return cmd_vertices(c, model_str); }; });

    auto add_query = [&](CLI::App* cmd) {
        cmd->add_option("--behavior", query.behavior_path, "behavior JSON file");
        cmd->add_option("--setup", query.setup_name, "named quantum setup or setup JSON file");
        cmd->add_option("--w", query.w, "override the setup's state visibility w");
        cmd->add_option("--mix", query.mix_v, "mix the query with uniform noise at this weight");
    };

    auto* memb = app.add_subcommand("membership", "decide whether a behavior lies in a model polytope");
    memb->add_option("--model", model_str, "model spec")->required();
    add_query(memb);
    add_common(memb, c);
    memb->callback([&] { action = [&] { return cmd_membership(c, query, model_str); }; });

    auto* vis = app.add_subcommand("visibility", "maximal v with mix(P, v) still inside the model");
    vis->add_option("--model", model_str, "model spec")->required();
    add_query(vis);
    vis->add_option("--noise", noise_path, "noise behavior JSON (default: uniform)");
    add_common(vis, c);
    vis->callback([&] { action = [&] { return cmd_visibility(c, query, model_str, noise_path); }; });

    auto* ev = app.add_subcommand("eval", "evaluate a quantum setup, optionally against an inequality");
    add_query(ev);
    ev->add_option("--ineq", ineq_name, "named inequality (chsh, svetlichny, i-opt, i-ns3) or CSV file");
    add_common(ev, c);
    ev->callback([&] { action = [&] { return cmd_eval(c, query, ineq_name); }; });

    auto* fac = app.add_subcommand("facets", "enumerate facets of a vertex set (exact double description)");
    fac->add_option("--model", model_str, "model spec");
    fac->add_option("--points", points_path, "vertex file");
    fac->add_flag("--sym", sym, "project onto the party-symmetric subspace first");
    fac->add_option("--checkpoint", checkpoint, "checkpoint file for long runs");
    fac->add_flag("--resume", resume, "resume from the checkpoint file");
    add_common(fac, c);
    fac->callback([&] { action = [&] { return cmd_facets(c, model_str, points_path, sym, checkpoint, resume); }; });

    auto* can = app.add_subcommand("canon", "canonicalize inequalities under the relabeling group");
    can->add_option("--ineq", ineq_name, "named inequality or CSV file (all blocks)")->required();
    add_common(can, c);
    can->callback([&] { action = [&] { return cmd_canon(c, ineq_name); }; });

    auto* see = app.add_subcommand("seesaw", "heuristic quantum lower bound by alternating optimization");
    see->add_option("--ineq", ineq_name, "named inequality or CSV file")->required();
    see->add_option("--restarts", restarts, "random restarts")->capture_default_str();
    see->add_option("--sweeps", sweeps, "maximal sweeps per restart")->capture_default_str();
    see->add_option("--state", state_name, "fix the state to this setup's state (named or file)");
    add_common(see, c);
    see->callback([&] { action = [&] { return cmd_seesaw(c, ineq_name, restarts, sweeps, state_name); }; });

    auto* ns3 = app.add_subcommand("ns3", "enumerate the tripartite NS extreme points (long-running)");
    ns3->add_option("--checkpoint", checkpoint, "checkpoint file");
    ns3->add_flag("--resume", resume, "resume from the checkpoint file");
    add_common(ns3, c);
    ns3->callback([&] { action = [&] { return cmd_ns3(c, checkpoint, resume); }; });

    auto* rep = app.add_subcommand("reproduce", "recompute a published quantity and compare");
    rep->add_option("target", target,
                    "one of table1, table2, ghz-boundary, svetlichny, ineq-opt, ineq-ns3, sym-vertices, all")
        ->required();
    add_common(rep, c);
    rep->callback([&] { action = [&] { return cmd_reproduce(c, target); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    auto t0 = std::chrono::steady_clock::now();
    int rc;
    try {
        rc = action();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        rc = 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        rc = 2;
    }
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    std::fprintf(stderr, "wall time: %.3f s\n", dt.count());
    return rc;
}
