#include "bell/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace bell {

namespace {

using nlohmann::ordered_json;

std::string bits_string(int v, int n) {
    std::string s(n, '0');
    for (int i = 0; i < n; ++i)
        if (v & (1 << (n - 1 - i))) s[i] = '1';
    return s;
}

int parse_bits(const std::string& s, int n) {
    if (static_cast<int>(s.size()) != n) throw IoError("behavior json: tuple '" + s + "' does not have " + std::to_string(n) + " bits");
    int v = 0;
    for (char c : s) {
        if (c != '0' && c != '1') throw IoError("behavior json: bad bit character in '" + s + "'");
        v = (v << 1) | (c - '0');
    }
    return v;
}

ordered_json manifest_block(const RunManifest* manifest) {
    return ordered_json::parse(manifest->json());
}

template <class EntryEmit>
std::string behavior_json_impl(Scenario s, const char* backend, const RunManifest* manifest, EntryEmit emit) {
    ordered_json j;
    j["n"] = s.n;
    j["backend"] = backend;
    ordered_json entries = ordered_json::array();
    for (int x = 0; x < s.inputs(); ++x)
        for (int o = 0; o < s.outputs(); ++o) {
            ordered_json e = ordered_json::array();
            e.push_back(bits_string(x, s.n));
            e.push_back(bits_string(o, s.n));
            e.push_back(emit(x, o));
            entries.push_back(std::move(e));
        }
    j["entries"] = std::move(entries);
    if (manifest) j["manifest"] = manifest_block(manifest);
    return j.dump();
}

ordered_json parse_json(const std::string& text, const char* what) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string(what) + ": " + e.what());
    }
}

struct ParsedEntries {
    Scenario scenario;
    std::vector<ordered_json> cell_values;
};

ParsedEntries behavior_json_entries(const ordered_json& j) {
    if (!j.contains("n") || !j["n"].is_number_integer()) throw IoError("behavior json: missing integer field 'n'");
    int n = j["n"].get<int>();
    if (n < 1 || n > 10) throw IoError("behavior json: party count out of range");
    Scenario s(n);
    if (!j.contains("entries") || !j["entries"].is_array()) throw IoError("behavior json: missing 'entries' array");
    ParsedEntries out{s, std::vector<ordered_json>(static_cast<std::size_t>(s.cells()))};
    std::vector<bool> seen(static_cast<std::size_t>(s.cells()), false);
    for (const auto& e : j["entries"]) {
        if (!e.is_array() || e.size() != 3 || !e[0].is_string() || !e[1].is_string())
            throw IoError("behavior json: each entry must be [inputs, outputs, value]");
        int x = parse_bits(e[0].get<std::string>(), n);
        int o = parse_bits(e[1].get<std::string>(), n);
        int cell = s.cell(x, o);
        if (seen[cell]) throw IoError("behavior json: duplicate entry for " + e[0].get<std::string>() + "," + e[1].get<std::string>());
        seen[cell] = true;
        out.cell_values[cell] = e[2];
    }
    for (int c = 0; c < s.cells(); ++c)
        if (!seen[c]) throw IoError("behavior json: missing entries (expected all " + std::to_string(s.cells()) + ")");
    return out;
}

std::string backend_field(const ordered_json& j) {
    if (!j.contains("backend") || !j["backend"].is_string()) throw IoError("behavior json: missing 'backend' field");
    return j["backend"].get<std::string>();
}

}  // namespace

std::string behavior_json(const BehaviorQ& P, const RunManifest* manifest) {
    return behavior_json_impl(P.scenario, "rational", manifest,
                              [&](int x, int o) { return ordered_json(format_rational(P.at(x, o))); });
}

std::string behavior_json(const BehaviorD& P, const RunManifest* manifest) {
    return behavior_json_impl(P.scenario, "float", manifest, [&](int x, int o) { return ordered_json(P.at(x, o)); });
}

JsonBackend behavior_json_backend(const std::string& text) {
    ordered_json j = parse_json(text, "behavior json");
    std::string b = backend_field(j);
    if (b == "rational") return JsonBackend::Rational;
    if (b == "float") return JsonBackend::Float;
    throw IoError("behavior json: unknown backend '" + b + "'");
}

BehaviorQ behavior_from_json_rational(const std::string& text) {
    ordered_json j = parse_json(text, "behavior json");
    if (backend_field(j) != "rational") throw IoError("behavior json: expected rational backend");
    ParsedEntries pe = behavior_json_entries(j);
    BehaviorQ P(pe.scenario);
    for (int c = 0; c < pe.scenario.cells(); ++c) {
        const auto& v = pe.cell_values[c];
        if (!v.is_string()) throw IoError("behavior json: rational entries must be strings like \"3/4\"");
        try {
            P.p[c] = parse_rational(v.get<std::string>());
        } catch (const std::exception& e) {
            throw IoError(std::string("behavior json: ") + e.what());
        }
    }
    validate_behavior(P);
    return P;
}

BehaviorD behavior_from_json_float(const std::string& text) {
    ordered_json j = parse_json(text, "behavior json");
    if (backend_field(j) != "float") throw IoError("behavior json: expected float backend");
    ParsedEntries pe = behavior_json_entries(j);
    BehaviorD P(pe.scenario);
    for (int c = 0; c < pe.scenario.cells(); ++c) {
        const auto& v = pe.cell_values[c];
        if (!v.is_number()) throw IoError("behavior json: float entries must be numbers");
        P.p[c] = v.get<double>();
    }
    validate_behavior(P, 1e-9);
    return P;
}

void write_vertex_file(std::ostream& out, const VertexSet& vs, const RunManifest* manifest) {
    out << "model=" << vs.model << " n=" << vs.scenario.n << " count=" << vs.size() << "\n";
    if (manifest) out << "# manifest: " << manifest->json() << "\n";
    for (std::size_t v = 0; v < vs.size(); ++v) {
        for (int c = 0; c < vs.scenario.cells(); ++c) {
            if (c) out << ',';
            out << format_rational(vs.entry(v, c));
        }
        out << "\n";
    }
}

void write_vertex_file(const std::string& path, const VertexSet& vs, const RunManifest* manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_vertex_file(out, vs, manifest);
    if (!out) throw IoError("write failed: " + path);
}

namespace {

void split_csv(const std::string& line, std::vector<std::string>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string trimmed(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::int64_t checked_lcm64(std::int64_t a, std::int64_t b, const char* what) {
    Int l = lcm(Int(a), Int(b));
    if (l > std::numeric_limits<std::int64_t>::max()) throw IoError(std::string(what) + ": common denominator overflows");
    return l.convert_to<std::int64_t>();
}

}  // namespace

VertexSet read_vertex_file(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("vertex file: empty input");
    line = trimmed(line);
    if (line.rfind("model=", 0) != 0) throw IoError("vertex file: header must start with model=");
    std::size_t count_pos = line.rfind(" count=");
    if (count_pos == std::string::npos) throw IoError("vertex file: header missing count=");
    std::size_t n_pos = line.rfind(" n=", count_pos);
    if (n_pos == std::string::npos) throw IoError("vertex file: header missing n=");
    VertexSet vs;
    vs.model = line.substr(6, n_pos - 6);
    int n = 0;
    std::size_t expected = 0;
    try {
        n = std::stoi(line.substr(n_pos + 3, count_pos - (n_pos + 3)));
        expected = std::stoull(line.substr(count_pos + 7));
    } catch (const std::exception&) {
        throw IoError("vertex file: malformed header numbers");
    }
    if (n < 1 || n > 10) throw IoError("vertex file: party count out of range");
    vs.scenario = Scenario(n);
    int cells = vs.scenario.cells();
    std::vector<std::int64_t> line_denoms;
    std::vector<std::string> fields;
    std::int64_t overall = 1;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trimmed(line);
        if (t.empty() || t[0] == '#') continue;
        split_csv(t, fields);
        if (static_cast<int>(fields.size()) != cells)
            throw IoError("vertex file line " + std::to_string(lineno) + ": expected " + std::to_string(cells) +
                          " entries, got " + std::to_string(fields.size()));
        std::vector<Rat> row(cells);
        Int d = 1;
        for (int c = 0; c < cells; ++c) {
            try {
                row[c] = parse_rational(fields[c]);
            } catch (const std::exception& e) {
                throw IoError("vertex file line " + std::to_string(lineno) + ": " + e.what());
            }
            d = lcm(d, denominator(row[c]));
        }
        if (d > std::numeric_limits<std::int64_t>::max())
            throw IoError("vertex file line " + std::to_string(lineno) + ": denominator overflows");
        std::int64_t d64 = d.convert_to<std::int64_t>();
        std::vector<std::int32_t> tab(cells);
        for (int c = 0; c < cells; ++c) {
            Rat scaled = row[c] * Rat(d);
            Int num = numerator(scaled);
            if (num < std::numeric_limits<std::int32_t>::min() || num > std::numeric_limits<std::int32_t>::max())
                throw IoError("vertex file line " + std::to_string(lineno) + ": numerator exceeds 32-bit storage");
            tab[c] = num.convert_to<std::int32_t>();
        }
        vs.tables.push_back(std::move(tab));
        line_denoms.push_back(d64);
        overall = checked_lcm64(overall, d64, "vertex file");
    }
    for (std::size_t v = 0; v < vs.tables.size(); ++v) {
        std::int64_t f = overall / line_denoms[v];
        if (f == 1) continue;
        for (auto& e : vs.tables[v]) {
            std::int64_t scaled = static_cast<std::int64_t>(e) * f;
            if (scaled < std::numeric_limits<std::int32_t>::min() || scaled > std::numeric_limits<std::int32_t>::max())
                throw IoError("vertex file: rescaled numerator exceeds 32-bit storage");
            e = static_cast<std::int32_t>(scaled);
        }
    }
    vs.denom = overall;
    if (vs.tables.size() != expected)
        throw IoError("vertex file: header count=" + std::to_string(expected) + " but found " +
                      std::to_string(vs.tables.size()) + " rows");
    return vs;
}

VertexSet read_vertex_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    return read_vertex_file(in);
}

std::string inequality_csv(const BellInequality& ineq) {
    std::ostringstream out;
    const Scenario& s = ineq.scenario;
    for (int code = 1; code <= s.correlators(); ++code) {
        const Rat& c = ineq.coeff[code - 1];
        if (c == 0) continue;
        std::string pat = pattern_string(code, s.n);
        for (char ch : pat) out << ch << ',';
        out << format_rational(c) << "\n";
    }
    out << "BOUND," << format_rational(ineq.bound) << "\n";
    return out.str();
}

void write_inequality_csv(std::ostream& out, const BellInequality& ineq, const RunManifest* manifest) {
    if (manifest) out << "# manifest: " << manifest->json() << "\n";
    out << inequality_csv(ineq);
}

std::optional<BellInequality> read_inequality_csv(std::istream& in, int n_parties_hint) {
    std::string line;
    std::vector<std::string> fields;
    int n = n_parties_hint;
    std::vector<Rat> coeff;
    std::vector<bool> seen;
    bool any = false;
    while (std::getline(in, line)) {
        std::string t = trimmed(line);
        if (t.empty() || t[0] == '#') continue;
        split_csv(t, fields);
        for (auto& f : fields) f = trimmed(f);
        if (fields.front() == "BOUND") {
            if (fields.size() != 2) throw IoError("inequality csv: BOUND line needs exactly one value");
            if (!any) throw IoError("inequality csv: block has no coefficient lines");
            Rat bound;
            try {
                bound = parse_rational(fields[1]);
            } catch (const std::exception& e) {
                throw IoError(std::string("inequality csv: ") + e.what());
            }
            return BellInequality(Scenario(n), std::move(coeff), std::move(bound));
        }
        if (fields.size() < 2) throw IoError("inequality csv: line '" + t + "' too short");
        int line_n = static_cast<int>(fields.size()) - 1;
        if (!any) {
            if (n == 0) n = line_n;
            coeff.assign(static_cast<std::size_t>(pow3(n) - 1), Rat(0));
            seen.assign(coeff.size() + 1, false);
        }
        if (line_n != n) throw IoError("inequality csv: line '" + t + "' has " + std::to_string(line_n) + " symbols, expected " + std::to_string(n));
        std::string pat;
        for (int i = 0; i < n; ++i) {
            if (fields[i].size() != 1) throw IoError("inequality csv: bad symbol '" + fields[i] + "'");
            pat += fields[i];
        }
        int code;
        try {
            code = parse_pattern(pat, n);
        } catch (const std::exception& e) {
            throw IoError(std::string("inequality csv: ") + e.what());
        }
        if (code == 0) throw IoError("inequality csv: the all-I pattern has no correlator coordinate");
        if (seen[code]) throw IoError("inequality csv: duplicate pattern " + pat);
        seen[code] = true;
        try {
            coeff[code - 1] = parse_rational(fields[n]);
        } catch (const std::exception& e) {
            throw IoError(std::string("inequality csv: ") + e.what());
        }
        any = true;
    }
    if (any) throw IoError("inequality csv: missing BOUND terminator");
    return std::nullopt;
}

BellInequality read_inequality_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    auto ineq = read_inequality_csv(in);
    if (!ineq) throw IoError("inequality file contains no inequality: " + path);
    return *ineq;
}

std::string setup_json(const QuantumSetup& setup, const RunManifest* manifest) {
    ordered_json j;
    j["n"] = setup.n;
    ordered_json state = ordered_json::array();
    for (Eigen::Index i = 0; i < setup.state.size(); ++i)
        state.push_back({setup.state[i].real(), setup.state[i].imag()});
    j["state"] = std::move(state);
    ordered_json obs = ordered_json::array();
    for (const auto& pair : setup.obs) {
        ordered_json party = ordered_json::array();
        for (const Observable& ob : pair) party.push_back({ob.x, ob.y, ob.z});
        obs.push_back(std::move(party));
    }
    j["observables"] = std::move(obs);
    j["w"] = setup.visibility_w;
    if (manifest) j["manifest"] = manifest_block(manifest);
    return j.dump();
}

QuantumSetup setup_from_json(const std::string& text) {
    ordered_json j = parse_json(text, "setup json");
    QuantumSetup setup;
    if (!j.contains("n") || !j["n"].is_number_integer()) throw IoError("setup json: missing integer field 'n'");
    setup.n = j["n"].get<int>();
    if (setup.n < 1 || setup.n > 10) throw IoError("setup json: party count out of range");
    Eigen::Index dim = Eigen::Index(1) << setup.n;
    if (!j.contains("state") || !j["state"].is_array() || static_cast<Eigen::Index>(j["state"].size()) != dim)
        throw IoError("setup json: 'state' must list 2^n amplitudes");
    setup.state.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto& amp = j["state"][static_cast<std::size_t>(i)];
        if (!amp.is_array() || amp.size() != 2 || !amp[0].is_number() || !amp[1].is_number())
            throw IoError("setup json: amplitudes are [re, im] pairs");
        setup.state[i] = std::complex<double>(amp[0].get<double>(), amp[1].get<double>());
    }
    double norm = setup.state.norm();
    if (norm < 1e-12) throw IoError("setup json: zero state vector");
    setup.state /= norm;
    if (!j.contains("observables") || !j["observables"].is_array() || static_cast<int>(j["observables"].size()) != setup.n)
        throw IoError("setup json: 'observables' must list one pair per party");
    for (const auto& party : j["observables"]) {
        if (!party.is_array() || party.size() != 2) throw IoError("setup json: each party needs two observables");
        std::array<Observable, 2> pair;
        for (int s = 0; s < 2; ++s) {
            const auto& v = party[static_cast<std::size_t>(s)];
            if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
                throw IoError("setup json: observables are [x, y, z] Bloch vectors");
            try {
                pair[s] = Observable::from_vector(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
            } catch (const std::exception& e) {
                throw IoError(std::string("setup json: ") + e.what());
            }
        }
        setup.obs.push_back(pair);
    }
    if (j.contains("w")) {
        if (!j["w"].is_number()) throw IoError("setup json: 'w' must be a number");
        setup.visibility_w = j["w"].get<double>();
        if (setup.visibility_w < 0 || setup.visibility_w > 1) throw IoError("setup json: 'w' outside [0, 1]");
    }
    return setup;
}

QuantumSetup read_setup_file(const std::string& path) {
    return setup_from_json(read_text_file(path));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace bell
