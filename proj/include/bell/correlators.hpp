#pragma once

#include <bit>
#include <stdexcept>
#include <vector>

#include "bell/behavior.hpp"

namespace bell {

// Correlator representation: coordinate k holds the expectation of the
// product of outcomes of the pattern-code-(k+1) parties at the indicated
// settings. For the parties marked I the behavior is marginalized; on
// signaling behaviors the marginal depends on the I parties' inputs and we
// average over them (agrees with the usual definition on NS behaviors, which
// is the only place correlator coordinates are used as a faithful encoding).
template <class T>
struct CorrelatorVector {
    Scenario scenario{1};
    std::vector<T> c;

    CorrelatorVector() = default;
    explicit CorrelatorVector(Scenario s) : scenario(s), c(s.correlators(), T(0)) {}

    T& at_code(int code) { return c[code - 1]; }
    const T& at_code(int code) const { return c[code - 1]; }

    bool operator==(const CorrelatorVector&) const = default;
};

template <class T>
CorrelatorVector<T> to_correlators(const Behavior<T>& P) {
    const Scenario& s = P.scenario;
    CorrelatorVector<T> out(s);
    for (int code = 1; code < pow3(s.n); ++code) {
        int mask = pattern_party_mask(code, s.n);
        int want = pattern_input_bits(code, s.n);
        T acc(0);
        int matches = 0;
        for (int x = 0; x < s.inputs(); ++x) {
            if ((x & mask) != want) continue;
            ++matches;
            for (int o = 0; o < s.outputs(); ++o) {
                int sign = (std::popcount(static_cast<unsigned>(o & mask)) & 1) ? -1 : 1;
                if (sign > 0) acc += P.at(x, o);
                else acc -= P.at(x, o);
            }
        }
        out.at_code(code) = acc / T(matches);
    }
    return out;
}

// Inclusion-exclusion expansion P(o|x) = 2^-n * sum_S (prod_i o_i) <corr S,x>.
// Throws if a reconstructed probability dips below -tol.
template <class T>
Behavior<T> from_correlators(const CorrelatorVector<T>& cv, const T& tol = T(0)) {
    const Scenario& s = cv.scenario;
    if (static_cast<int>(cv.c.size()) != s.correlators()) throw std::invalid_argument("correlators: size mismatch");
    Behavior<T> P(s);
    std::vector<int> place(s.n);  // 3^{n-1-i} weights
    for (int i = 0; i < s.n; ++i) place[i] = pow3(s.n - 1 - i);
    for (int x = 0; x < s.inputs(); ++x) {
        for (int o = 0; o < s.outputs(); ++o) {
            T val(1);  // empty-set term
            int full = (1 << s.n) - 1;
            for (int set = 1; set <= full; ++set) {
                int code = 0;
                for (int i = 0; i < s.n; ++i) {
                    if (set & (1 << (s.n - 1 - i))) {
                        int xb = (x >> (s.n - 1 - i)) & 1;
                        code += (1 + xb) * place[i];
                    }
                }
                int sign = (std::popcount(static_cast<unsigned>(o & set)) & 1) ? -1 : 1;
                if (sign > 0) val += cv.at_code(code);
                else val -= cv.at_code(code);
            }
            val /= T(s.outputs());
            if (val < T(0) && !detail::leq_abs(val, tol)) throw std::domain_error("from_correlators: negative probability at cell");
            P.at(x, o) = val;
        }
    }
    return P;
}

inline CorrelatorVector<double> to_float(const CorrelatorVector<Rat>& cv) {
    CorrelatorVector<double> out(cv.scenario);
    for (std::size_t i = 0; i < cv.c.size(); ++i) out.c[i] = to_double(cv.c[i]);
    return out;
}

}  // namespace bell
