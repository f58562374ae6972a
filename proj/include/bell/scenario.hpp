#pragma once

#include <stdexcept>
#include <string>

namespace bell {

inline int pow3(int n) {
    int r = 1;
    while (n-- > 0) r *= 3;
    return r;
}

// An n-party scenario with binary inputs and +/-1 outputs per party.
// Input tuples x and output tuples o are bit-packed with party 0 (A) in the
// most significant bit; output bit 0 encodes outcome +1, bit 1 encodes -1.
// Probability tables are stored in lexicographic (x, o) order: cell(x, o).
struct Scenario {
    int n;

    explicit Scenario(int n_parties = 2) : n(n_parties) {
        if (n < 1 || n > 10) throw std::invalid_argument("scenario: unsupported party count");
    }

    int inputs() const { return 1 << n; }
    int outputs() const { return 1 << n; }
    int cells() const { return 1 << (2 * n); }
    int correlators() const { return pow3(n) - 1; }
    int cell(int x, int o) const { return (x << n) + o; }
    int party_bit(int party) const { return 1 << (n - 1 - party); }

    bool operator==(const Scenario&) const = default;
};

inline int outcome_sign(int bit) { return 1 - 2 * bit; }

// Correlator index patterns assign each party a symbol in {I, 0, 1}: I means
// the party is traced out, 0/1 fix its input. Patterns are base-3 codes with
// digits I=0, input0=1, input1=2 and party 0 most significant. Code 0 (all I)
// is excluded; coordinate k of a CorrelatorVector stores pattern code k+1.
inline int pattern_digit(int code, int party, int n) {
    for (int i = n - 1; i > party; --i) code /= 3;
    return code % 3;
}

inline char pattern_symbol(int digit) { return digit == 0 ? 'I' : static_cast<char>('0' + digit - 1); }

inline std::string pattern_string(int code, int n) {
    std::string s(n, 'I');
    for (int i = 0; i < n; ++i) s[i] = pattern_symbol(pattern_digit(code, i, n));
    return s;
}

// Parses a compact pattern like "01I" (one symbol per party).
inline int parse_pattern(const std::string& s, int n) {
    if (static_cast<int>(s.size()) != n) throw std::invalid_argument("pattern length mismatch: " + s);
    int code = 0;
    for (char ch : s) {
        int d;
        if (ch == 'I' || ch == 'i') d = 0;
        else if (ch == '0') d = 1;
        else if (ch == '1') d = 2;
        else throw std::invalid_argument(std::string("bad pattern symbol '") + ch + "'");
        code = code * 3 + d;
    }
    return code;
}

// Bitmask of parties participating in a pattern (party_bit packing).
inline int pattern_party_mask(int code, int n) {
    int mask = 0;
    for (int i = 0; i < n; ++i)
        if (pattern_digit(code, i, n) != 0) mask |= 1 << (n - 1 - i);
    return mask;
}

// Input bits fixed by a pattern, packed like input tuples (0 for I parties).
inline int pattern_input_bits(int code, int n) {
    int x = 0;
    for (int i = 0; i < n; ++i) {
        int d = pattern_digit(code, i, n);
        if (d == 2) x |= 1 << (n - 1 - i);
    }
    return x;
}

}  // namespace bell
