#include "bell/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "bell/parallel.hpp"

namespace bell {

namespace {

using Cplx = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

Matrix2cd pauli_x() {
    Matrix2cd m;
    m << Cplx(0, 0), Cplx(1, 0), Cplx(1, 0), Cplx(0, 0);
    return m;
}

Matrix2cd pauli_y() {
    Matrix2cd m;
    m << Cplx(0, 0), Cplx(0, -1), Cplx(0, 1), Cplx(0, 0);
    return m;
}

Matrix2cd pauli_z() {
    Matrix2cd m;
    m << Cplx(1, 0), Cplx(0, 0), Cplx(0, 0), Cplx(-1, 0);
    return m;
}

// Applies a single-qubit operator at the given party slot (party 0 owns the
// most significant index bit).
VectorXcd apply_single(const VectorXcd& state, int n, int party, const Matrix2cd& m) {
    int bitpos = n - 1 - party;
    Eigen::Index stride = Eigen::Index(1) << bitpos;
    VectorXcd out(state.size());
    for (Eigen::Index idx = 0; idx < state.size(); ++idx) {
        if (idx & stride) continue;
        Eigen::Index hi = idx | stride;
        out[idx] = m(0, 0) * state[idx] + m(0, 1) * state[hi];
        out[hi] = m(1, 0) * state[idx] + m(1, 1) * state[hi];
    }
    return out;
}

void check_setup(const QuantumSetup& setup) {
    if (setup.n < 1 || setup.n > 10) throw std::invalid_argument("quantum setup: party count out of range");
    if (setup.state.size() != (Eigen::Index(1) << setup.n))
        throw std::invalid_argument("quantum setup: state dimension is not 2^n");
    if (static_cast<int>(setup.obs.size()) != setup.n)
        throw std::invalid_argument("quantum setup: need one observable pair per party");
    if (setup.visibility_w < 0 || setup.visibility_w > 1)
        throw std::invalid_argument("quantum setup: visibility outside [0, 1]");
}

VectorXcd basis_amplitudes(int n, std::initializer_list<std::pair<int, double>> terms) {
    VectorXcd v = VectorXcd::Zero(Eigen::Index(1) << n);
    for (auto [idx, amp] : terms) v[idx] = Cplx(amp, 0);
    v.normalize();
    return v;
}

Observable obs_zx(double cz, double cx) { return Observable::from_vector(cx, 0, cz); }

}  // namespace

Matrix2cd Observable::matrix() const {
    Matrix2cd m;
    m << Cplx(z, 0), Cplx(x, -y), Cplx(x, y), Cplx(-z, 0);
    return m;
}

Observable Observable::from_vector(double vx, double vy, double vz) {
    double norm = std::sqrt(vx * vx + vy * vy + vz * vz);
    if (norm < 1e-12) throw std::invalid_argument("observable: zero Bloch vector");
    return Observable{vx / norm, vy / norm, vz / norm};
}

BehaviorD behavior_from_setup(const QuantumSetup& setup) {
    check_setup(setup);
    Scenario s(setup.n);
    BehaviorD P(s);
    double mixed = (1.0 - setup.visibility_w) / s.outputs();
    Matrix2cd ident = Matrix2cd::Identity();
    for (int x = 0; x < s.inputs(); ++x) {
        std::vector<Matrix2cd> proj(setup.n * 2);
        for (int i = 0; i < setup.n; ++i) {
            int xi = (x >> (setup.n - 1 - i)) & 1;
            Matrix2cd ob = setup.obs[i][xi].matrix();
            proj[2 * i] = (ident + ob) / 2.0;      // outcome bit 0 <-> +1
            proj[2 * i + 1] = (ident - ob) / 2.0;  // outcome bit 1 <-> -1
        }
        for (int o = 0; o < s.outputs(); ++o) {
            VectorXcd amp = setup.state;
            for (int i = 0; i < setup.n; ++i) {
                int oi = (o >> (setup.n - 1 - i)) & 1;
                amp = apply_single(amp, setup.n, i, proj[2 * i + oi]);
            }
            double p = setup.state.dot(amp).real();
            P.at(x, o) = setup.visibility_w * p + mixed;
        }
    }
    return P;
}

QuantumSetup named_setup(const std::string& name) {
    QuantumSetup setup;
    if (name == "W3_paper") {
        setup.n = 3;
        setup.state = basis_amplitudes(3, {{0b001, 1}, {0b010, 1}, {0b100, 1}});
        double alpha = 3.6241, beta = 2.0221;
        setup.obs = {
            {obs_zx(std::cos(alpha), std::sin(alpha)), obs_zx(std::cos(alpha), -std::sin(alpha))},
            {obs_zx(-1, 0), obs_zx(std::cos(beta), std::sin(beta))},
            {obs_zx(-1, 0), obs_zx(std::cos(beta), -std::sin(beta))},
        };
    } else if (name == "GHZ3_paper") {
        setup.n = 3;
        setup.state = basis_amplitudes(3, {{0b000, 1}, {0b111, 1}});
        double r = 1.0 / std::sqrt(2.0);
        setup.obs = {
            {Observable::from_vector(1, 0, 0), Observable::from_vector(0, 1, 0)},
            {Observable::from_vector(r, -r, 0), Observable::from_vector(r, r, 0)},
            {Observable::from_vector(0, -1, 0), Observable::from_vector(1, 0, 0)},
        };
    } else if (name == "PSI_OPT") {
        setup.n = 4;
        double c = 2.0 - std::sqrt(5.0);
        setup.state = basis_amplitudes(4, {{0b0001, c},
                                           {0b0010, c},
                                           {0b0100, c},
                                           {0b1000, c},
                                           {0b1110, 1},
                                           {0b1101, 1},
                                           {0b1011, 1},
                                           {0b0111, 1}});
        setup.obs.assign(4, {obs_zx(-1, 0), obs_zx(0, 1)});
    } else if (name == "GHZ4") {
        setup.n = 4;
        setup.state = basis_amplitudes(4, {{0b0000, 1}, {0b1111, 1}});
        setup.obs.assign(4, {obs_zx(1, 0), obs_zx(0, 1)});
    } else if (name == "W4") {
        setup.n = 4;
        setup.state = basis_amplitudes(4, {{0b0001, 1}, {0b0010, 1}, {0b0100, 1}, {0b1000, 1}});
        setup.obs.assign(4, {obs_zx(1, 0), obs_zx(0, 1)});
    } else {
        throw std::invalid_argument("unknown named setup: " + name);
    }
    return setup;
}

std::vector<std::string> named_setup_names() { return {"W3_paper", "GHZ3_paper", "PSI_OPT", "GHZ4", "W4"}; }

double state_visibility_threshold(const BellInequality& ineq, const QuantumSetup& setup) {
    check_setup(setup);
    if (ineq.scenario.n != setup.n) throw std::invalid_argument("state_visibility_threshold: scenario mismatch");
    QuantumSetup pure = setup;
    pure.visibility_w = 1.0;
    double at_state = evaluate(ineq, behavior_from_setup(pure));
    QuantumSetup noise = setup;
    noise.visibility_w = 0.0;
    double at_noise = evaluate(ineq, behavior_from_setup(noise));
    double bound = to_double(ineq.bound);
    // Exactly-at-the-bound setups sit on the boundary: threshold 1. Only a
    // strict shortfall means the inequality is never violated.
    if (at_state < bound - 1e-12) throw std::domain_error("state_visibility_threshold: no violation at w = 1");
    if (at_state - at_noise < 1e-12) return 1.0;
    return std::min(1.0, (bound - at_noise) / (at_state - at_noise));
}

namespace {

// Dense Bell operator sum_code coeff * tensor_i M_i with M_i the party
// observable at the pattern input (identity for I slots).
MatrixXcd bell_operator(const BellInequality& ineq, const std::vector<std::array<Observable, 2>>& obs) {
    int n = ineq.scenario.n;
    Eigen::Index dim = Eigen::Index(1) << n;
    MatrixXcd op = MatrixXcd::Zero(dim, dim);
    Matrix2cd ident = Matrix2cd::Identity();
    for (int code = 1; code <= ineq.scenario.correlators(); ++code) {
        const Rat& c = ineq.coeff[code - 1];
        if (c == 0) continue;
        MatrixXcd term = MatrixXcd::Constant(1, 1, Cplx(to_double(c), 0));
        for (int i = 0; i < n; ++i) {
            int d = pattern_digit(code, i, n);
            Matrix2cd f = d == 0 ? ident : obs[i][d - 1].matrix();
            MatrixXcd next(term.rows() * 2, term.cols() * 2);
            for (Eigen::Index r = 0; r < term.rows(); ++r)
                for (Eigen::Index cc = 0; cc < term.cols(); ++cc) next.block(r * 2, cc * 2, 2, 2) = term(r, cc) * f;
            term = std::move(next);
        }
        op += term;
    }
    return op;
}

double setup_value(const BellInequality& ineq, const QuantumSetup& setup) {
    MatrixXcd op = bell_operator(ineq, setup.obs);
    return (setup.state.adjoint() * op * setup.state)(0, 0).real();
}

// Objective gradient for one party-setting as a Bloch 3-vector via the
// slot-resolved matrix elements G_tu = <psi| K (x) E_tu |psi>.
std::array<double, 3> bloch_gradient(const BellInequality& ineq, const QuantumSetup& setup, int party, int setting) {
    int n = setup.n;
    Cplx g00 = 0, g01 = 0, g10 = 0, g11 = 0;
    int bitpos = n - 1 - party;
    Eigen::Index stride = Eigen::Index(1) << bitpos;
    for (int code = 1; code <= ineq.scenario.correlators(); ++code) {
        const Rat& c = ineq.coeff[code - 1];
        if (c == 0) continue;
        if (pattern_digit(code, party, n) != setting + 1) continue;
        VectorXcd phi = setup.state;
        for (int j = 0; j < n; ++j) {
            if (j == party) continue;
            int d = pattern_digit(code, j, n);
            if (d == 0) continue;
            phi = apply_single(phi, n, j, setup.obs[j][d - 1].matrix());
        }
        double w = to_double(c);
        for (Eigen::Index idx = 0; idx < phi.size(); ++idx) {
            if (idx & stride) continue;
            Eigen::Index hi = idx | stride;
            g00 += w * std::conj(phi[idx]) * setup.state[idx];
            g01 += w * std::conj(phi[idx]) * setup.state[hi];
            g10 += w * std::conj(phi[hi]) * setup.state[idx];
            g11 += w * std::conj(phi[hi]) * setup.state[hi];
        }
    }
    double gx = (g01 + g10).real();
    double gy = (Cplx(0, 1) * (g10 - g01)).real();
    double gz = (g00 - g11).real();
    return {gx, gy, gz};
}

struct RestartResult {
    double value = -1e300;
    QuantumSetup setup;
    int sweeps = 0;
    bool monotone = true;
};

RestartResult one_restart(const BellInequality& ineq, int n, const SeesawOptions& opts,
                          const VectorXcd* fixed_state, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    QuantumSetup setup;
    setup.n = n;
    setup.visibility_w = 1.0;
    setup.obs.resize(n);
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < 2; ++s) {
            double x = gauss(rng), y = gauss(rng), z = gauss(rng);
            while (x * x + y * y + z * z < 1e-12) {
                x = gauss(rng);
                y = gauss(rng);
                z = gauss(rng);
            }
            setup.obs[i][s] = Observable::from_vector(x, y, z);
        }
    Eigen::Index dim = Eigen::Index(1) << n;
    if (fixed_state) {
        setup.state = *fixed_state;
    } else {
        setup.state.resize(dim);
        for (Eigen::Index k = 0; k < dim; ++k) setup.state[k] = Cplx(gauss(rng), gauss(rng));
        setup.state.normalize();
    }
    RestartResult res;
    res.setup = setup;
    double value = setup_value(ineq, setup);
    int sweep = 0;
    for (; sweep < opts.max_sweeps; ++sweep) {
        double before = value;
        for (int i = 0; i < n; ++i) {
            for (int s = 0; s < 2; ++s) {
                auto g = bloch_gradient(ineq, setup, i, s);
                double norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
                if (norm < 1e-12) continue;  // flat direction, keep current observable
                setup.obs[i][s] = Observable{g[0] / norm, g[1] / norm, g[2] / norm};
            }
        }
        if (!fixed_state) {
            MatrixXcd op = bell_operator(ineq, setup.obs);
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(op);
            setup.state = es.eigenvectors().col(dim - 1);
        }
        double after = setup_value(ineq, setup);
        if (after < value - 1e-9) res.monotone = false;
        value = after;
        if (value - before < opts.tol) {
            ++sweep;
            break;
        }
    }
    res.value = value;
    res.setup = setup;
    res.sweeps = sweep;
    return res;
}

}  // namespace

SeesawResult seesaw_maximize(const BellInequality& ineq, int n_parties, const SeesawOptions& opts,
                             const VectorXcd* fixed_state) {
    if (ineq.scenario.n != n_parties) throw std::invalid_argument("seesaw: scenario mismatch");
    if (opts.restarts < 1) throw std::invalid_argument("seesaw: need at least one restart");
    if (fixed_state && fixed_state->size() != (Eigen::Index(1) << n_parties))
        throw std::invalid_argument("seesaw: fixed state dimension is not 2^n");
    std::vector<RestartResult> results(opts.restarts);
    parallel_chunks(static_cast<std::size_t>(opts.restarts), opts.threads,
                    [&](std::size_t, std::size_t begin, std::size_t end) {
                        for (std::size_t r = begin; r < end; ++r)
                            results[r] = one_restart(ineq, n_parties, opts, fixed_state,
                                                     opts.seed + 1000003ULL * static_cast<std::uint64_t>(r));
                    });
    SeesawResult out;
    out.value = -1e300;
    for (const auto& r : results) {
        if (!r.monotone) out.monotone = false;
        if (r.value > out.value) {
            out.value = r.value;
            out.setup = r.setup;
            out.sweeps = r.sweeps;
        }
    }
    return out;
}

}  // namespace bell
