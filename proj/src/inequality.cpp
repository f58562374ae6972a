#include "bell/inequality.hpp"

#include <algorithm>
#include <stdexcept>

namespace bell {

Rat evaluate(const BellInequality& ineq, const CorrelatorVector<Rat>& cv) {
    if (ineq.scenario != cv.scenario) throw std::invalid_argument("evaluate: scenario mismatch");
    Rat acc = 0;
    for (std::size_t i = 0; i < ineq.coeff.size(); ++i)
        if (ineq.coeff[i] != 0) acc += ineq.coeff[i] * cv.c[i];
    return acc;
}

double evaluate(const BellInequality& ineq, const CorrelatorVector<double>& cv) {
    if (ineq.scenario != cv.scenario) throw std::invalid_argument("evaluate: scenario mismatch");
    double acc = 0;
    for (std::size_t i = 0; i < ineq.coeff.size(); ++i)
        if (ineq.coeff[i] != 0) acc += to_double(ineq.coeff[i]) * cv.c[i];
    return acc;
}

Rat evaluate(const BellInequality& ineq, const BehaviorQ& P) { return evaluate(ineq, to_correlators(P)); }
double evaluate(const BellInequality& ineq, const BehaviorD& P) { return evaluate(ineq, to_correlators(P)); }

BellInequality symmetric_inequality(Scenario s, const std::vector<std::pair<std::string, Rat>>& reps, Rat bound,
                                    std::string tag) {
    BellInequality ineq(s, std::vector<Rat>(s.correlators(), Rat(0)), std::move(bound), std::move(tag));
    for (const auto& [key, coeff] : reps) {
        std::string want = key;
        std::sort(want.begin(), want.end());
        if (static_cast<int>(want.size()) != s.n) throw std::invalid_argument("symmetric_inequality: key length");
        bool hit = false;
        for (int code = 1; code < pow3(s.n); ++code) {
            std::string sig = pattern_string(code, s.n);
            std::sort(sig.begin(), sig.end());
            if (sig == want) {
                ineq.coeff[code - 1] = coeff;
                hit = true;
            }
        }
        if (!hit) throw std::invalid_argument("symmetric_inequality: key matches no pattern: " + key);
    }
    return ineq;
}

BellInequality named_inequality(const std::string& name) {
    if (name == "chsh") {
        Scenario s(2);
        BellInequality ineq(s, std::vector<Rat>(s.correlators(), Rat(0)), 2, "L[2]");
        ineq.coeff[parse_pattern("00", 2) - 1] = 1;
        ineq.coeff[parse_pattern("01", 2) - 1] = 1;
        ineq.coeff[parse_pattern("10", 2) - 1] = 1;
        ineq.coeff[parse_pattern("11", 2) - 1] = -1;
        return ineq;
    }
    if (name == "svetlichny") {
        return symmetric_inequality(Scenario(3),
                                    {{"000", -1}, {"001", 1}, {"011", 1}, {"111", -1}},
                                    4, "SV[2|1]");
    }
    if (name == "i-opt") {
        return symmetric_inequality(Scenario(4),
                                    {{"0000", 1},
                                     {"0011", 2},
                                     {"1111", -8},
                                     {"000I", -3},
                                     {"011I", 2},
                                     {"00II", -1},
                                     {"11II", 2},
                                     {"0III", -1}},
                                    19, "NS[2/2]");
    }
    if (name == "i-ns3") {
        return symmetric_inequality(Scenario(4),
                                    {{"00II", 1},
                                     {"11II", 1},
                                     {"0000", 2},
                                     {"0001", -1},
                                     {"0011", -1},
                                     {"0111", 1},
                                     {"1111", 2}},
                                    10, "NS[2/2]");
    }
    throw std::invalid_argument("unknown inequality name: " + name);
}

std::vector<std::string> named_inequality_names() { return {"chsh", "svetlichny", "i-opt", "i-ns3"}; }

}  // namespace bell
