#pragma once

#include <array>
#include <vector>

#include "bell/inequality.hpp"
#include "bell/vertex_set.hpp"

namespace bell {

// Coordinates of the party-permutation-invariant subspace: one per multiset
// {#I, #0, #1} over the n party symbols, excluding all-I (14 for n=4). The
// projection of a correlator vector sums the coordinates within each class,
// so a symmetric-space inequality lifts by replicating its coefficient across
// the class (the "plus circular permutations" convention).
struct SymmetricBasis {
    Scenario scenario{1};
    std::vector<std::array<int, 3>> signatures;  // (nI, n0, n1), in first-occurrence order of pattern codes
    std::vector<int> class_of_code;              // pattern code -> signature index
    std::vector<int> multiplicity;               // patterns per signature

    int dims() const { return static_cast<int>(signatures.size()); }
};

SymmetricBasis symmetric_basis(Scenario s);

std::vector<Rat> project_symmetric(const SymmetricBasis& basis, const CorrelatorVector<Rat>& cv);

// Projects every vertex and dedups exactly; sorted for determinism.
std::vector<std::vector<Rat>> symmetrize_vertices(const SymmetricBasis& basis, const VertexSet& vs);

BellInequality lift_symmetric(const SymmetricBasis& basis, const std::vector<Rat>& coeffs, Rat bound,
                              std::string tag = "unassigned");

}  // namespace bell
