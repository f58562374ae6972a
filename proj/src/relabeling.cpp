#include "bell/relabeling.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <unordered_set>

#include "bell/io.hpp"
#include "bell/manifest.hpp"
#include "bell/parallel.hpp"

namespace bell {

Relabeling Relabeling::identity(int n) {
    Relabeling g;
    g.party_perm.resize(n);
    std::iota(g.party_perm.begin(), g.party_perm.end(), 0);
    g.input_swap.assign(n, 0);
    g.output_flip.assign(n, {0, 0});
    return g;
}

std::uint64_t relabeling_group_order(int n) {
    std::uint64_t order = 1;
    for (int i = 2; i <= n; ++i) order *= i;
    for (int i = 0; i < n; ++i) order *= 8;  // 2 input swaps * 4 flip patterns
    return order;
}

std::vector<Relabeling> relabeling_group(int n) {
    std::vector<Relabeling> group;
    group.reserve(relabeling_group_order(n));
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        for (int swap_mask = 0; swap_mask < (1 << n); ++swap_mask) {
            for (int flip_mask = 0; flip_mask < (1 << (2 * n)); ++flip_mask) {
                Relabeling g;
                g.party_perm = perm;
                g.input_swap.resize(n);
                g.output_flip.resize(n);
                for (int i = 0; i < n; ++i) {
                    g.input_swap[i] = static_cast<std::uint8_t>((swap_mask >> i) & 1);
                    g.output_flip[i] = {static_cast<std::uint8_t>((flip_mask >> (2 * i)) & 1),
                                        static_cast<std::uint8_t>((flip_mask >> (2 * i + 1)) & 1)};
                }
                group.push_back(std::move(g));
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return group;
}

BellInequality apply(const Relabeling& g, const BellInequality& ineq) {
    const Scenario& s = ineq.scenario;
    int n = s.n;
    BellInequality out(s, std::vector<Rat>(ineq.coeff.size(), Rat(0)), ineq.bound, ineq.model_tag);
    std::vector<int> place(n);
    for (int i = 0; i < n; ++i) place[i] = pow3(n - 1 - i);
    for (int code = 1; code <= s.correlators(); ++code) {
        const Rat& c = ineq.coeff[code - 1];
        if (c == 0) continue;
        int image = 0;
        bool negate = false;
        for (int i = 0; i < n; ++i) {
            int d = pattern_digit(code, i, n);
            if (d == 0) continue;
            int a = d - 1;  // original input of party i
            if (g.output_flip[i][a]) negate = !negate;
            int a_new = a ^ g.input_swap[i];
            image += (1 + a_new) * place[g.party_perm[i]];
        }
        out.coeff[image - 1] += negate ? -c : c;
    }
    return out;
}

template <class T>
Behavior<T> apply(const Relabeling& g, const Behavior<T>& P) {
    const Scenario& s = P.scenario;
    int n = s.n;
    Behavior<T> out(s);
    for (int xn = 0; xn < s.inputs(); ++xn) {
        for (int on = 0; on < s.outputs(); ++on) {
            int x = 0, o = 0;
            for (int i = 0; i < n; ++i) {
                int slot = g.party_perm[i];
                int xs = (xn >> (n - 1 - slot)) & 1;
                int xi = xs ^ g.input_swap[i];
                int os = (on >> (n - 1 - slot)) & 1;
                int oi = os ^ g.output_flip[i][xi];
                if (xi) x |= 1 << (n - 1 - i);
                if (oi) o |= 1 << (n - 1 - i);
            }
            out.at(xn, on) = P.at(x, o);
        }
    }
    return out;
}

CanonicalForm canonicalize(const BellInequality& ineq, int threads) {
    const Scenario& s = ineq.scenario;
    std::vector<Rat> scaled = ineq.coeff;
    scaled.push_back(ineq.bound);
    scaled = primitive_integer_vector(std::move(scaled));
    BellInequality base(s, std::vector<Rat>(scaled.begin(), scaled.end() - 1), scaled.back(), ineq.model_tag);
    std::vector<Relabeling> group = relabeling_group(s.n);
    std::size_t chunks = std::max<std::size_t>(
        1, std::min<std::size_t>(resolve_threads(threads), group.size()));
    std::vector<std::vector<Rat>> best(chunks);
    std::vector<std::unordered_set<std::string>> images(chunks);
    parallel_chunks(group.size(), threads, [&](std::size_t w, std::size_t begin, std::size_t end) {
        for (std::size_t gi = begin; gi < end; ++gi) {
            BellInequality h = apply(group[gi], base);
            std::string key;
            key.reserve(h.coeff.size() * 3);
            for (const Rat& c : h.coeff) {
                key += numerator(c).str();
                key += ',';
            }
            images[w].insert(std::move(key));
            if (best[w].empty() || h.coeff < best[w]) best[w] = std::move(h.coeff);
        }
    });
    std::vector<Rat> overall;
    std::unordered_set<std::string> all_images;
    for (std::size_t w = 0; w < chunks; ++w) {
        if (!best[w].empty() && (overall.empty() || best[w] < overall)) overall = std::move(best[w]);
        all_images.merge(images[w]);
    }
    CanonicalForm out;
    out.ineq = BellInequality(s, std::move(overall), base.bound, ineq.model_tag);
    out.orbit_size = all_images.size();
    out.hash = fnv1a64_hex(inequality_csv(out.ineq));
    return out;
}

template Behavior<Rat> apply<Rat>(const Relabeling&, const Behavior<Rat>&);
template Behavior<double> apply<double>(const Relabeling&, const Behavior<double>&);

}  // namespace bell
