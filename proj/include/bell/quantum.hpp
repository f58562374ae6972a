#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bell/behavior.hpp"
#include "bell/inequality.hpp"

namespace bell {

// A +/-1-eigenvalue qubit observable, stored as a unit Bloch vector n.sigma.
struct Observable {
    double x = 0, y = 0, z = 1;

    Eigen::Matrix2cd matrix() const;
    static Observable from_vector(double vx, double vy, double vz);  // normalizes; throws on zero
};

struct QuantumSetup {
    int n = 0;
    Eigen::VectorXcd state;                          // dimension 2^n, unit norm
    std::vector<std::array<Observable, 2>> obs;      // per party: (setting 0, setting 1)
    double visibility_w = 1.0;                       // rho = w |psi><psi| + (1-w) I/2^n
};

// P(o|x) = tr(rho prod_i Pi(o_i|x_i)) with Pi = (1 + a*O)/2.
BehaviorD behavior_from_setup(const QuantumSetup& setup);

// Named setups: "W3_paper", "GHZ3_paper", "PSI_OPT", "GHZ4", "W4".
QuantumSetup named_setup(const std::string& name);
std::vector<std::string> named_setup_names();

// Largest w with w*value + (1-w)*noise_value still at the bound:
// (bound - value_at_noise) / (value_at_state - value_at_noise).
// Requires a violation at w=1.
double state_visibility_threshold(const BellInequality& ineq, const QuantumSetup& setup);

struct SeesawOptions {
    int restarts = 50;
    std::uint64_t seed = 1;
    int threads = 0;
    int max_sweeps = 400;
    double tol = 1e-12;
};

struct SeesawResult {
    double value = 0;
    QuantumSetup setup;
    int sweeps = 0;        // of the best restart
    bool monotone = true;  // objective never decreased (within 1e-9) in any restart
};

// Alternating heuristic lower bound on the quantum maximum: each party-input
// observable is replaced by the unit-Bloch normalization of its partial
// coefficient operator; with observables fixed the optimal state is the top
// eigenvector of the Bell operator. fixed_state pins the state (measurements
// only); null means free state, seeded at random per restart.
SeesawResult seesaw_maximize(const BellInequality& ineq, int n_parties, const SeesawOptions& opts = {},
                             const Eigen::VectorXcd* fixed_state = nullptr);

}  // namespace bell
