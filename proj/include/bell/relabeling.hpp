#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bell/behavior.hpp"
#include "bell/inequality.hpp"

namespace bell {

// One element of the relabeling group: permute parties, swap inputs per
// party, flip outputs per party and per (original) input. Order for n parties
// is n! * 2^n * 4^n (98,304 for n=4).
struct Relabeling {
    std::vector<int> party_perm;                    // party i goes to slot party_perm[i]
    std::vector<std::uint8_t> input_swap;           // per party
    std::vector<std::array<std::uint8_t, 2>> output_flip;  // per party, per input

    static Relabeling identity(int n);
};

std::uint64_t relabeling_group_order(int n);

// Enumerates the full group in a fixed deterministic order.
std::vector<Relabeling> relabeling_group(int n);

// Group action. Inequalities transform so that
// evaluate(apply(g, ineq), apply(g, P)) == evaluate(ineq, P).
BellInequality apply(const Relabeling& g, const BellInequality& ineq);
template <class T>
Behavior<T> apply(const Relabeling& g, const Behavior<T>& P);

struct CanonicalForm {
    BellInequality ineq;        // integer coprime coefficients, lexicographically minimal over the orbit
    std::uint64_t orbit_size = 0;
    std::string hash;           // fnv1a64 of the canonical CSV body
};

// Minimizes the (coefficients, bound) vector over the full relabeling orbit
// after clearing denominators and normalizing the gcd (positive scale only;
// negating would reverse the inequality, which is not a relabeling).
CanonicalForm canonicalize(const BellInequality& ineq, int threads = 0);

extern template Behavior<Rat> apply<Rat>(const Relabeling&, const Behavior<Rat>&);
extern template Behavior<double> apply<double>(const Relabeling&, const Behavior<double>&);

}  // namespace bell
