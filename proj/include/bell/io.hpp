#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "bell/behavior.hpp"
#include "bell/inequality.hpp"
#include "bell/manifest.hpp"
#include "bell/quantum.hpp"
#include "bell/vertex_set.hpp"

namespace bell {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Behavior JSON: {"n":3, "backend":"rational"|"float",
//                 "entries":[["xyz","abc","p/q"|float], ...]}
// All 4^n entries in lexicographic (x, o) order, party A most significant.
std::string behavior_json(const BehaviorQ& P, const RunManifest* manifest = nullptr);
std::string behavior_json(const BehaviorD& P, const RunManifest* manifest = nullptr);
enum class JsonBackend { Rational, Float };
JsonBackend behavior_json_backend(const std::string& text);
BehaviorQ behavior_from_json_rational(const std::string& text);
BehaviorD behavior_from_json_float(const std::string& text);

// Vertex file: header "model=<spec> n=<n> count=<k>", optional "# ..." comment
// lines, then one behavior per line as comma-separated rationals in canonical
// table order.
void write_vertex_file(std::ostream& out, const VertexSet& vs, const RunManifest* manifest = nullptr);
void write_vertex_file(const std::string& path, const VertexSet& vs, const RunManifest* manifest = nullptr);
VertexSet read_vertex_file(std::istream& in);
VertexSet read_vertex_file(const std::string& path);

// Inequality CSV: per line "s1,s2,...,sn,coefficient" with per-party symbols
// in {I,0,1}; zero coefficients omitted; block terminated by "BOUND,<rational>".
void write_inequality_csv(std::ostream& out, const BellInequality& ineq, const RunManifest* manifest = nullptr);
std::string inequality_csv(const BellInequality& ineq);
// Reads one block; returns nothing at end of stream.
std::optional<BellInequality> read_inequality_csv(std::istream& in, int n_parties_hint = 0);
BellInequality read_inequality_file(const std::string& path);

// Setup JSON: {"n":2, "state":[[re,im],...], "observables":[[[x,y,z],[x,y,z]],...], "w":1.0}
std::string setup_json(const QuantumSetup& setup, const RunManifest* manifest = nullptr);
QuantumSetup setup_from_json(const std::string& text);
QuantumSetup read_setup_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Shortest round-trip decimal representation (deterministic across runs).
std::string format_double(double v);

}  // namespace bell
