#pragma once

#include <bit>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "bell/rational.hpp"
#include "bell/scenario.hpp"

namespace bell {

// Full conditional probability table P(o|x). The numeric backend is a type
// parameter: exact rationals for polytope work, doubles for quantum behaviors.
template <class T>
struct Behavior {
    Scenario scenario{1};
    std::vector<T> p;

    Behavior() = default;
    explicit Behavior(Scenario s) : scenario(s), p(s.cells(), T(0)) {}

    T& at(int x, int o) { return p[scenario.cell(x, o)]; }
    const T& at(int x, int o) const { return p[scenario.cell(x, o)]; }

    bool operator==(const Behavior&) const = default;
};

using BehaviorQ = Behavior<Rat>;
using BehaviorD = Behavior<double>;

namespace detail {
inline bool leq_abs(const Rat& v, const Rat&) { return v == 0; }
inline bool leq_abs(double v, double tol) { return std::abs(v) <= tol; }
}  // namespace detail

template <class T>
Behavior<T> uniform_behavior(Scenario s) {
    Behavior<T> b(s);
    T val = T(1) / T(s.outputs());
    for (auto& e : b.p) e = val;
    return b;
}

// Entrywise convex combination v*P + (1-v)*noise.
template <class T>
Behavior<T> mix(const Behavior<T>& P, const T& v, const Behavior<T>& noise) {
    if (P.scenario != noise.scenario) throw std::invalid_argument("mix: scenario mismatch");
    if (v < T(0) || v > T(1)) throw std::invalid_argument("mix: weight outside [0,1]");
    Behavior<T> out(P.scenario);
    for (int i = 0; i < P.scenario.cells(); ++i) out.p[i] = v * P.p[i] + (T(1) - v) * noise.p[i];
    return out;
}

template <class T>
Behavior<T> mix(const Behavior<T>& P, const T& v) {
    return mix(P, v, uniform_behavior<T>(P.scenario));
}

// True iff the marginal distribution of the parties in `subset` (a party_bit
// mask) is independent of the other parties' inputs. Exact for rationals,
// absolute tolerance for doubles.
template <class T>
bool check_ns(const Behavior<T>& P, int subset, const T& tol = T(0)) {
    const Scenario& s = P.scenario;
    int full = (1 << s.n) - 1;
    if (subset <= 0 || subset >= full) throw std::invalid_argument("check_ns: subset must be nonempty and proper");
    int comp = full & ~subset;
    // Iterate over subset inputs xs and subset outputs os; the marginal summed
    // over complement outputs must agree for every complement input xc.
    for (int xs = subset;; xs = (xs - 1) & subset) {
        for (int os = subset;; os = (os - 1) & subset) {
            bool have_ref = false;
            T ref{};
            for (int xc = comp;; xc = (xc - 1) & comp) {
                T m(0);
                for (int oc = comp;; oc = (oc - 1) & comp) {
                    m += P.at(xs | xc, os | oc);
                    if (oc == 0) break;
                }
                if (!have_ref) {
                    ref = m;
                    have_ref = true;
                } else if (!detail::leq_abs(m - ref, tol)) {
                    return false;
                }
                if (xc == 0) break;
            }
            if (os == 0) break;
        }
        if (xs == 0) break;
    }
    return true;
}

// All proper nonempty party subsets.
template <class T>
bool is_nonsignaling(const Behavior<T>& P, const T& tol = T(0)) {
    int full = (1 << P.scenario.n) - 1;
    for (int subset = 1; subset < full; ++subset)
        if (!check_ns(P, subset, tol)) return false;
    return true;
}

// Enforces nonnegativity and per-input normalization.
template <class T>
void validate_behavior(const Behavior<T>& P, const T& tol = T(0)) {
    const Scenario& s = P.scenario;
    if (static_cast<int>(P.p.size()) != s.cells()) throw std::invalid_argument("behavior: table size mismatch");
    for (int x = 0; x < s.inputs(); ++x) {
        T sum(0);
        for (int o = 0; o < s.outputs(); ++o) {
            const T& v = P.at(x, o);
            if (v < T(0) && !detail::leq_abs(v, tol)) throw std::domain_error("behavior: negative probability");
            sum += v;
        }
        if (!detail::leq_abs(sum - T(1), tol)) throw std::domain_error("behavior: input row not normalized");
    }
}

inline BehaviorD to_float(const BehaviorQ& P) {
    BehaviorD out(P.scenario);
    for (int i = 0; i < P.scenario.cells(); ++i) out.p[i] = to_double(P.p[i]);
    return out;
}

}  // namespace bell
