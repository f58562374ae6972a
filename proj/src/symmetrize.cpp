#include "bell/symmetrize.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace bell {

SymmetricBasis symmetric_basis(Scenario s) {
    SymmetricBasis basis;
    basis.scenario = s;
    basis.class_of_code.assign(pow3(s.n), -1);
    std::map<std::array<int, 3>, int> index;
    for (int code = 1; code < pow3(s.n); ++code) {
        std::array<int, 3> sig{0, 0, 0};
        for (int i = 0; i < s.n; ++i) ++sig[pattern_digit(code, i, s.n)];
        auto [it, inserted] = index.try_emplace(sig, static_cast<int>(basis.signatures.size()));
        if (inserted) {
            basis.signatures.push_back(sig);
            basis.multiplicity.push_back(0);
        }
        basis.class_of_code[code] = it->second;
        ++basis.multiplicity[it->second];
    }
    return basis;
}

std::vector<Rat> project_symmetric(const SymmetricBasis& basis, const CorrelatorVector<Rat>& cv) {
    if (cv.scenario != basis.scenario) throw std::invalid_argument("project_symmetric: scenario mismatch");
    std::vector<Rat> out(basis.dims(), Rat(0));
    for (int code = 1; code < pow3(basis.scenario.n); ++code) out[basis.class_of_code[code]] += cv.at_code(code);
    return out;
}

std::vector<std::vector<Rat>> symmetrize_vertices(const SymmetricBasis& basis, const VertexSet& vs) {
    if (vs.scenario != basis.scenario) throw std::invalid_argument("symmetrize_vertices: scenario mismatch");
    std::vector<std::vector<Rat>> out;
    out.reserve(vs.size());
    for (std::size_t v = 0; v < vs.size(); ++v) out.push_back(project_symmetric(basis, vs.correlators(v)));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

BellInequality lift_symmetric(const SymmetricBasis& basis, const std::vector<Rat>& coeffs, Rat bound,
                              std::string tag) {
    if (static_cast<int>(coeffs.size()) != basis.dims())
        throw std::invalid_argument("lift_symmetric: coefficient count does not match basis dimension");
    const Scenario& s = basis.scenario;
    BellInequality out(s, std::vector<Rat>(s.correlators(), Rat(0)), std::move(bound), std::move(tag));
    for (int code = 1; code < pow3(s.n); ++code) out.coeff[code - 1] = coeffs[basis.class_of_code[code]];
    return out;
}

}  // namespace bell
