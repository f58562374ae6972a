#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bell/enumeration.hpp"
#include "bell/io.hpp"
#include "bell/lp.hpp"
#include "bell/quantum.hpp"

using namespace bell;

namespace {

double bloch_norm(const Observable& o) { return std::sqrt(o.x * o.x + o.y * o.y + o.z * o.z); }

// Best CHSH value over shared xz-plane measurement angles for the singlet
// family state cos(t)|00> + sin(t)|11>, by a two-stage grid. A certified
// lower bound on the quantum maximum, independent of the seesaw code path.
double chsh_grid_oracle() {
    QuantumSetup setup;
    setup.n = 2;
    setup.state = Eigen::VectorXcd::Zero(4);
    setup.state(0) = 1.0 / std::numbers::sqrt2;
    setup.state(3) = 1.0 / std::numbers::sqrt2;
    BellInequality chsh = named_inequality("chsh");
    auto value = [&](double a0, double a1, double b0, double b1) {
        setup.obs = {{Observable::from_vector(std::sin(a0), 0, std::cos(a0)),
                      Observable::from_vector(std::sin(a1), 0, std::cos(a1))},
                     {Observable::from_vector(std::sin(b0), 0, std::cos(b0)),
                      Observable::from_vector(std::sin(b1), 0, std::cos(b1))}};
        return evaluate(chsh, behavior_from_setup(setup));
    };
    double best = -1e9;
    std::array<double, 4> arg{};
    const double pi = std::numbers::pi;
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            for (int k = 0; k < 12; ++k)
                for (int l = 0; l < 12; ++l) {
                    double v = value(i * pi / 6, j * pi / 6, k * pi / 6, l * pi / 6);
                    if (v > best) {
                        best = v;
                        arg = {i * pi / 6, j * pi / 6, k * pi / 6, l * pi / 6};
                    }
                }
    double step = pi / 6;
    for (int round = 0; round < 24; ++round) {
        step /= 2;
        bool improved = true;
        while (improved) {
            improved = false;
            for (int c = 0; c < 4; ++c)
                for (double d : {-step, step}) {
                    auto trial = arg;
                    trial[c] += d;
                    double v = value(trial[0], trial[1], trial[2], trial[3]);
                    if (v > best + 1e-15) {
                        best = v;
                        arg = trial;
                        improved = true;
                    }
                }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("named setups are normalized and nonsignaling") {
    auto names = named_setup_names();
    CHECK(names.size() == 5);
    for (const auto& name : names) {
        QuantumSetup setup = named_setup(name);
        CHECK(setup.state.size() == (1 << setup.n));
        CHECK(setup.state.norm() == doctest::Approx(1.0).epsilon(1e-12));
        REQUIRE(setup.obs.size() == static_cast<std::size_t>(setup.n));
        for (const auto& pair : setup.obs)
            for (const auto& o : pair) CHECK(bloch_norm(o) == doctest::Approx(1.0).epsilon(1e-12));
        BehaviorD P = behavior_from_setup(setup);
        validate_behavior(P, 1e-10);
        CHECK(is_nonsignaling(P, 1e-10));
    }
    CHECK_THROWS(named_setup("bogus"));
}

TEST_CASE("observables are unit Bloch vectors with the right matrices") {
    Observable o = Observable::from_vector(3, 0, 4);
    CHECK(o.x == doctest::Approx(0.6));
    CHECK(o.z == doctest::Approx(0.8));
    Eigen::Matrix2cd m = o.matrix();
    CHECK(m(0, 0).real() == doctest::Approx(0.8));
    CHECK(m(0, 1).real() == doctest::Approx(0.6));
    CHECK((m * m - Eigen::Matrix2cd::Identity()).norm() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS(Observable::from_vector(0, 0, 0));
}

TEST_CASE("product state with sigma_z measurements is deterministic and local") {
    QuantumSetup setup;
    setup.n = 2;
    setup.state = Eigen::VectorXcd::Zero(4);
    setup.state(0) = 1.0;  // |00>
    Observable z;          // defaults to sigma_z
    setup.obs = {{z, z}, {z, z}};
    BehaviorD P = behavior_from_setup(setup);
    Scenario s(2);
    for (int x = 0; x < 4; ++x)
        for (int o = 0; o < 4; ++o) CHECK(P.p[s.cell(x, o)] == doctest::Approx(o == 0 ? 1.0 : 0.0).epsilon(1e-12));
    auto res = membership(P, local_vertices(s));
    CHECK(res.inside);
}

TEST_CASE("visibility_w mixes correlators linearly toward white noise") {
    QuantumSetup setup = named_setup("GHZ3_paper");
    BehaviorD full = behavior_from_setup(setup);
    setup.visibility_w = 0.6;
    BehaviorD damped = behavior_from_setup(setup);
    auto cf = to_correlators(full);
    auto cd = to_correlators(damped);
    for (int k = 0; k < Scenario(3).correlators(); ++k) CHECK(cd.c[k] == doctest::Approx(0.6 * cf.c[k]).epsilon(1e-12));
    BehaviorD mixed = mix(full, 0.6);
    for (int i = 0; i < Scenario(3).cells(); ++i) CHECK(damped.p[i] == doctest::Approx(mixed.p[i]).epsilon(1e-12));
}

TEST_CASE("GHZ3 saturates the Svetlichny quantum maximum") {
    BehaviorD P = behavior_from_setup(named_setup("GHZ3_paper"));
    double value = evaluate(named_inequality("svetlichny"), P);
    CHECK(value == doctest::Approx(4.0 * std::numbers::sqrt2).epsilon(1e-10));
}

TEST_CASE("the W3 behavior leaves the hybrid models at full visibility") {
    BehaviorD P = behavior_from_setup(named_setup("W3_paper"));
    CHECK_FALSE(membership(P, build_vertices(parse_model("SV[2|1]"))).inside);
    CHECK_FALSE(membership(P, build_vertices(parse_model("NS[2/1]"))).inside);
}

TEST_CASE("PSI_OPT reaches 11 + 8 sqrt(5) on its inequality") {
    QuantumSetup setup = named_setup("PSI_OPT");
    BellInequality ineq = named_inequality("i-opt");
    double value = evaluate(ineq, behavior_from_setup(setup));
    double target = 11.0 + 8.0 * std::sqrt(5.0);
    CHECK(value == doctest::Approx(target).epsilon(1e-9));
    double threshold = state_visibility_threshold(ineq, setup);
    CHECK(threshold == doctest::Approx(19.0 / target).epsilon(1e-9));
}

TEST_CASE("visibility thresholds: boundary and shortfall cases") {
    // deterministic |00> with sigma_z sits exactly on the CHSH bound
    QuantumSetup setup;
    setup.n = 2;
    setup.state = Eigen::VectorXcd::Zero(4);
    setup.state(0) = 1.0;
    Observable z;
    setup.obs = {{z, z}, {z, z}};
    CHECK(state_visibility_threshold(named_inequality("chsh"), setup) == 1.0);

    // strictly below the bound: no threshold exists
    Observable x = Observable::from_vector(1, 0, 0);
    setup.obs = {{z, x}, {z, x}};
    CHECK_THROWS(state_visibility_threshold(named_inequality("chsh"), setup));
}

TEST_CASE("threshold matches the LP visibility for GHZ3 against the full local set") {
    QuantumSetup setup = named_setup("GHZ3_paper");
    double thr = state_visibility_threshold(named_inequality("svetlichny"), setup);
    CHECK(thr == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-10));
    BehaviorD P = behavior_from_setup(setup);
    auto lp = visibility(P, build_vertices(parse_model("SV[2|1]")));
    CHECK(lp.v == doctest::Approx(thr).epsilon(1e-6));
}

TEST_CASE("seesaw finds the CHSH quantum maximum") {
    SeesawOptions opts;
    opts.restarts = 10;
    opts.seed = 7;
    SeesawResult res = seesaw_maximize(named_inequality("chsh"), 2, opts);
    double target = 2.0 * std::numbers::sqrt2;
    CHECK(res.value == doctest::Approx(target).epsilon(1e-6));
    CHECK(res.monotone);
    CHECK(res.setup.n == 2);
    CHECK(evaluate(named_inequality("chsh"), behavior_from_setup(res.setup)) == doctest::Approx(res.value).epsilon(1e-9));

    double oracle = chsh_grid_oracle();
    CHECK(oracle <= target + 1e-9);
    CHECK(res.value >= oracle - 1e-6);
}

TEST_CASE("seesaw reproduces the Svetlichny maximum for three parties") {
    SeesawOptions opts;
    opts.restarts = 20;
    opts.seed = 3;
    SeesawResult res = seesaw_maximize(named_inequality("svetlichny"), 3, opts);
    CHECK(res.value == doctest::Approx(4.0 * std::numbers::sqrt2).epsilon(1e-4));
    CHECK(res.monotone);
}

TEST_CASE("seesaw is deterministic for a fixed seed") {
    SeesawOptions opts;
    opts.restarts = 4;
    opts.seed = 42;
    SeesawResult a = seesaw_maximize(named_inequality("chsh"), 2, opts);
    SeesawResult b = seesaw_maximize(named_inequality("chsh"), 2, opts);
    CHECK(a.value == b.value);
    CHECK(a.sweeps == b.sweeps);
    for (int p = 0; p < 2; ++p)
        for (int i = 0; i < 2; ++i) {
            CHECK(a.setup.obs[p][i].x == b.setup.obs[p][i].x);
            CHECK(a.setup.obs[p][i].z == b.setup.obs[p][i].z);
        }
    opts.seed = 43;
    SeesawResult c = seesaw_maximize(named_inequality("chsh"), 2, opts);
    CHECK(c.value == doctest::Approx(a.value).epsilon(1e-7));
}

TEST_CASE("fixed-state seesaw optimizes measurements only") {
    QuantumSetup ghz = named_setup("GHZ3_paper");
    SeesawOptions opts;
    opts.restarts = 20;
    opts.seed = 11;
    SeesawResult res = seesaw_maximize(named_inequality("svetlichny"), 3, opts, &ghz.state);
    CHECK(res.value == doctest::Approx(4.0 * std::numbers::sqrt2).epsilon(1e-6));
    CHECK((res.setup.state - ghz.state).norm() == doctest::Approx(0.0).epsilon(1e-12));

    // a product state cannot beat the local bound
    Eigen::VectorXcd product = Eigen::VectorXcd::Zero(8);
    product(0) = 1.0;
    SeesawResult local = seesaw_maximize(named_inequality("svetlichny"), 3, opts, &product);
    CHECK(local.value <= 4.0 + 1e-9);
}

TEST_CASE("seesaw rejects mismatched party counts") {
    CHECK_THROWS(seesaw_maximize(named_inequality("chsh"), 3));
    QuantumSetup ghz = named_setup("GHZ3_paper");
    CHECK_THROWS(seesaw_maximize(named_inequality("chsh"), 2, {}, &ghz.state));
}

TEST_CASE("setups round-trip through JSON") {
    QuantumSetup setup = named_setup("W3_paper");
    setup.visibility_w = 0.925;
    QuantumSetup back = setup_from_json(setup_json(setup));
    CHECK(back.n == setup.n);
    CHECK(back.visibility_w == setup.visibility_w);
    CHECK((back.state - setup.state).norm() == doctest::Approx(0.0).epsilon(1e-14));
    BehaviorD a = behavior_from_setup(setup);
    BehaviorD b = behavior_from_setup(back);
    for (int i = 0; i < Scenario(3).cells(); ++i) CHECK(a.p[i] == doctest::Approx(b.p[i]).epsilon(1e-14));
    CHECK_THROWS(setup_from_json("{\"n\": 2}"));
}
