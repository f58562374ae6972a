#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bell/correlators.hpp"

namespace bell {

// A Bell-like inequality sum_k coeff_k * corr_k <= bound over correlator
// coordinates (no constant term; the bound carries it).
struct BellInequality {
    Scenario scenario{1};
    std::vector<Rat> coeff;
    Rat bound = 0;
    std::string model_tag = "unassigned";

    BellInequality() = default;
    BellInequality(Scenario s, std::vector<Rat> c, Rat b, std::string tag = "unassigned")
        : scenario(s), coeff(std::move(c)), bound(std::move(b)), model_tag(std::move(tag)) {}
};

Rat evaluate(const BellInequality& ineq, const CorrelatorVector<Rat>& cv);
double evaluate(const BellInequality& ineq, const CorrelatorVector<double>& cv);
Rat evaluate(const BellInequality& ineq, const BehaviorQ& P);
double evaluate(const BellInequality& ineq, const BehaviorD& P);

// Builds a party-permutation-invariant inequality from representative
// coefficients keyed by sorted pattern string (e.g. "001I"): every pattern
// whose sorted symbols match a key receives that coefficient.
BellInequality symmetric_inequality(Scenario s, const std::vector<std::pair<std::string, Rat>>& reps, Rat bound,
                                    std::string tag = "unassigned");

// Named inequalities: "chsh", "svetlichny", "i-opt", "i-ns3".
BellInequality named_inequality(const std::string& name);
std::vector<std::string> named_inequality_names();

}  // namespace bell
