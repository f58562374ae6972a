#include "bell/model_spec.hpp"

#include <cctype>

namespace bell {

namespace {

char party_letter(int p) { return static_cast<char>('A' + p); }

std::string order_str(const std::vector<int>& order) {
    std::string s;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i) s += '<';
        s += party_letter(order[i]);
    }
    return s;
}

struct Parser {
    const std::string& text;
    std::size_t pos = 0;

    explicit Parser(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& msg) const { throw ModelParseError(msg, pos); }

    char peek() const { return pos < text.size() ? text[pos] : '\0'; }

    char take() {
        if (pos >= text.size()) fail("unexpected end of model spec");
        return text[pos++];
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }

    bool try_take(const std::string& word) {
        if (text.compare(pos, word.size(), word) == 0) {
            pos += word.size();
            return true;
        }
        return false;
    }

    int party(int n_max) {
        char c = take();
        if (c < 'A' || c >= 'A' + n_max) fail("expected a party letter");
        return c - 'A';
    }

    ModelSpec parse_spec() {
        if (try_take("HULL(")) {
            ModelSpec spec;
            spec.kind = ModelKind::Hull;
            spec.parts.push_back(parse_spec());
            while (peek() == ';') {
                ++pos;
                spec.parts.push_back(parse_spec());
            }
            expect(')');
            spec.scenario = spec.parts.front().scenario;
            for (const auto& p : spec.parts)
                if (p.scenario != spec.scenario) fail("HULL parts disagree on party count");
            return spec;
        }
        if (try_take("L[")) {
            char c = take();
            if (!std::isdigit(static_cast<unsigned char>(c))) fail("expected party count");
            int n = c - '0';
            if (n < 2 || n > 4) fail("L[n] supports n in 2..4");
            expect(']');
            ModelSpec spec;
            spec.kind = ModelKind::Local;
            spec.scenario = Scenario(n);
            return spec;
        }
        if (try_take("SV[")) {
            if (!try_take("2|1")) fail("expected SV[2|1]");
            expect(']');
            ModelSpec spec;
            spec.kind = ModelKind::Sv21;
            spec.scenario = Scenario(3);
            return spec;
        }
        if (try_take("PTO[")) {
            ModelSpec spec;
            spec.scenario = Scenario(3);
            if (try_take("2/1")) {
                expect(']');
                spec.kind = ModelKind::PtoFull;
                return spec;
            }
            if (try_take("order=")) {
                spec.kind = ModelKind::PtoOrder;
                spec.order.push_back(party(3));
                expect('<');
                spec.order.push_back(party(3));
                expect('<');
                spec.order.push_back(party(3));
                expect(']');
                if (spec.order[0] == spec.order[1] || spec.order[0] == spec.order[2] || spec.order[1] == spec.order[2])
                    fail("order must be a permutation of A,B,C");
                return spec;
            }
            spec.kind = ModelKind::PtoPair;
            spec.signaler = party(3);
            expect('<');
            spec.receiver = party(3);
            expect(']');
            if (spec.signaler == spec.receiver) fail("pair parties must differ");
            return spec;
        }
        if (try_take("NS[")) {
            ModelSpec spec;
            if (try_take("2/1")) {
                expect(']');
                spec.kind = ModelKind::Ns21;
                spec.scenario = Scenario(3);
                return spec;
            }
            if (try_take("2/2")) {
                expect(']');
                spec.kind = ModelKind::Ns22;
                spec.scenario = Scenario(4);
                return spec;
            }
            if (try_take("3/1")) {
                expect(']');
                spec.kind = ModelKind::Ns31;
                spec.scenario = Scenario(4);
                if (!try_take(":ns3=")) fail("NS[3/1] requires :ns3=<path>");
                // path runs to the end of the spec or to an unbalanced ')' / ';'
                // so NS[3/1] cannot appear inside HULL with exotic paths; plain
                // paths work everywhere.
                std::string path;
                while (pos < text.size() && text[pos] != ';' && text[pos] != ')') path += text[pos++];
                if (path.empty()) fail("empty ns3 path");
                spec.ns3_path = path;
                return spec;
            }
            spec.kind = ModelKind::NsPair;
            spec.scenario = Scenario(3);
            spec.pair_a = party(3);
            expect(',');
            spec.pair_b = party(3);
            expect(']');
            if (spec.pair_a == spec.pair_b) fail("pair parties must differ");
            if (spec.pair_a > spec.pair_b) std::swap(spec.pair_a, spec.pair_b);
            return spec;
        }
        fail("unknown model token");
    }
};

}  // namespace

std::string ModelSpec::str() const {
    switch (kind) {
        case ModelKind::Local:
            return "L[" + std::to_string(scenario.n) + "]";
        case ModelKind::Sv21:
            return "SV[2|1]";
        case ModelKind::PtoPair:
            return std::string("PTO[") + party_letter(signaler) + "<" + party_letter(receiver) + "]";
        case ModelKind::PtoOrder:
            return "PTO[order=" + order_str(order) + "]";
        case ModelKind::PtoFull:
            return "PTO[2/1]";
        case ModelKind::NsPair:
            return std::string("NS[") + party_letter(pair_a) + "," + party_letter(pair_b) + "]";
        case ModelKind::Ns21:
            return "NS[2/1]";
        case ModelKind::Ns22:
            return "NS[2/2]";
        case ModelKind::Ns31:
            return "NS[3/1]:ns3=" + ns3_path;
        case ModelKind::Hull: {
            std::string s = "HULL(";
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (i) s += ';';
                s += parts[i].str();
            }
            return s + ")";
        }
    }
    return "?";
}

ModelSpec parse_model(const std::string& text) {
    Parser parser(text);
    ModelSpec spec = parser.parse_spec();
    if (parser.pos != text.size()) throw ModelParseError("trailing characters after model spec", parser.pos);
    return spec;
}

}  // namespace bell
