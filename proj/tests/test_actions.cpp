#include <gtest/gtest.h>

#include <cmath>

#include "ctw/actions.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace ctw;
using namespace ctw::testing;

TEST(Actions, TurningPointsExample1) {
    DepthModel m = load_model(example1_spec());
    TurningPoints tp = find_turning_points(m, 1.0, -0.03);
    EXPECT_EQ(tp.left.kind, CausticKind::Simple);
    EXPECT_EQ(tp.right.kind, CausticKind::Simple);
    EXPECT_NEAR(tp.left.location, 0.0, 1e-9);
    EXPECT_NEAR(tp.right.location, 2.7, 1e-9);
    for (const auto& c : {tp.left, tp.right}) {
        double f1 = m.F1(c.location), f2 = m.F2(c.location);
        EXPECT_LE(std::abs(f1 + 0.03 * f2), 1e-12 * (std::abs(f1) + std::abs(0.03 * f2)));
    }
}

TEST(Actions, TurningPointsCoastal) {
    DepthModel m = load_model(example3_spec());
    TurningPoints tp = find_turning_points(m, 1.0, -2.1);
    EXPECT_EQ(tp.left.kind, CausticKind::Coastal);
    EXPECT_EQ(tp.right.kind, CausticKind::Coastal);
    EXPECT_EQ(tp.left.location, 0.0);
    EXPECT_EQ(tp.right.location, 1.0);
}

TEST(Actions, TurningPointsToy) {
    DepthModel m = load_model(toy_spec("1-u^2"));
    TurningPoints tp = find_turning_points(m, 1.0, 0.0);
    EXPECT_NEAR(tp.left.location, -1.0, 1e-13);
    EXPECT_NEAR(tp.right.location, 1.0, 1e-13);
}

TEST(Actions, MultiWellRejected) {
    // Example 2 with kappa = E f(2): E f - kappa dips below zero on (0.277, 0.352)
    DepthModel m = load_model(example2_spec());
    const double kappa = m.f(2.0);
    try {
        find_turning_points(m, 1.0, kappa);
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("multi-well"), std::string::npos);
    }
}

TEST(Actions, NoTurningPointOnNonCoastalSide) {
    DepthModel m = load_model(toy_spec("1-u^2", "2", -0.5, 2.0));
    EXPECT_THROW(find_turning_points(m, 1.0, 0.0), NumericalError);
}

TEST(Actions, ToyIntegrals) {
    DepthModel m = load_model(toy_spec("1-u^2"));
    Actions a = action_integrals(m, 1.0, 0.0);
    EXPECT_NEAR(a.I1, 0.5, 1e-10);
    EXPECT_NEAR(a.I2, std::sqrt(2.0), 1e-10);
}

namespace {
// Harmonic toy f1 = c - u^2, g = g0: I1 = (E c - kappa) / (2 sqrt E), I2 = sqrt(E g0 + kappa).
ActionJacobian harmonic_jacobian(double c, double g0, double E, double k) {
    ActionJacobian J;
    J.dI1_dE = c / (2 * std::sqrt(E)) - (E * c - k) / (4 * std::pow(E, 1.5));
    J.dI1_dk = -1.0 / (2 * std::sqrt(E));
    J.dI2_dE = g0 / (2 * std::sqrt(E * g0 + k));
    J.dI2_dk = 1.0 / (2 * std::sqrt(E * g0 + k));
    return J;
}
}  // namespace

TEST(Actions, FrequenciesHarmonicToy) {
    const double c = 4, g0 = 2, E = 1.3, k = 0.7;
    DepthModel m = load_model(toy_spec("4-u^2", "2", -3, 3));
    ActionJacobian want = harmonic_jacobian(c, g0, E, k);
    ActionJacobian fd = action_jacobian_fd(m, E, k);
    EXPECT_NEAR(fd.dI1_dE, want.dI1_dE, 1e-8);
    EXPECT_NEAR(fd.dI1_dk, want.dI1_dk, 1e-8);
    EXPECT_NEAR(fd.dI2_dE, want.dI2_dE, 1e-8);
    EXPECT_NEAR(fd.dI2_dk, want.dI2_dk, 1e-8);
    Frequencies fr = frequencies(m, E, k);
    double det = want.det();
    EXPECT_NEAR(fr.canonical[0], want.dI2_dk / det, 1e-7);
    EXPECT_NEAR(fr.canonical[1], -want.dI1_dk / det, 1e-7);
}

TEST(Actions, FrequenciesExample1) {
    DepthModel m = load_model(example1_spec());
    Frequencies fr = frequencies(m, 1.0, -0.03);
    EXPECT_NEAR(fr.angular[0], 2.533, 5e-3);
    EXPECT_NEAR(fr.angular[1], 1.7306, 5e-3);
    // dE/dI is the same vector in the original time
    EXPECT_NEAR(fr.canonical[0], fr.time_scale * fr.angular[0], 1e-7);
    EXPECT_NEAR(fr.canonical[1], fr.time_scale * fr.angular[1], 1e-7);
}

TEST(Actions, FiniteDifferenceJacobianMatchesIntegralForm) {
    for (auto [spec, k] : {std::pair{example1_spec(), -0.03}, std::pair{example3_spec(), -2.1}}) {
        DepthModel m = load_model(spec);
        ActionJacobian a = action_jacobian_fd(m, 1.0, k), b = action_jacobian_exact(m, 1.0, k);
        EXPECT_NEAR(a.dI1_dE, b.dI1_dE, 1e-7 * std::abs(b.dI1_dE));
        EXPECT_NEAR(a.dI1_dk, b.dI1_dk, 1e-7 * std::abs(b.dI1_dk));
        EXPECT_NEAR(a.dI2_dE, b.dI2_dE, 1e-7 * std::abs(b.dI2_dE));
        EXPECT_NEAR(a.dI2_dk, b.dI2_dk, 1e-7 * std::abs(b.dI2_dk));
    }
}

TEST(Actions, FrequencyStepHalvingStable) {
    DepthModel m = load_model(example1_spec());
    ActionJacobian a = action_jacobian_fd(m, 1.0, -0.03, 1e-5), b = action_jacobian_fd(m, 1.0, -0.03, 5e-6);
    auto w = [](const ActionJacobian& J) { return std::array<double, 2>{J.dI2_dk / J.det(), -J.dI1_dk / J.det()}; };
    auto wa = w(a), wb = w(b);
    EXPECT_LE(std::abs(wa[0] - wb[0]), 1e-6 * std::abs(wa[0]));
    EXPECT_LE(std::abs(wa[1] - wb[1]), 1e-6 * std::abs(wa[1]));
}

TEST(Actions, TorusInvariants) {
    for (auto [spec, k] : {std::pair{example1_spec(), -0.03}, std::pair{example3_spec(), -2.1}}) {
        DepthModel m = load_model(spec);
        TorusData t = build_torus(m, 1.0, k);
        Actions a = action_integrals(m, 1.0, k);
        EXPECT_NEAR(t.I1, a.I1, 1e-10);
        EXPECT_NEAR(t.I2, a.I2, 1e-10);
        EXPECT_NEAR(t.S_L(t.u1), M_PI * t.I1, 1e-10 * M_PI * t.I1);
        double prevL = -1, prevR = 1e9;
        for (int i = 0; i <= 1000; ++i) {
            double u = t.u0 + (t.u1 - t.u0) * i / 1000.0;
            double sl = t.S_L(u), sr = t.S_R(u);
            EXPECT_NEAR(sl + sr, M_PI * t.I1, 1e-10 * M_PI * t.I1);
            if (i > 0) {
                EXPECT_GT(sl, prevL);
                EXPECT_LT(sr, prevR);
            }
            prevL = sl;
            prevR = sr;
        }
        EXPECT_NEAR(t.S2(2 * M_PI), 2 * M_PI * t.I2, 1e-12);
        EXPECT_NEAR(t.S2(2 * M_PI + 1.0) - t.S2(1.0), 2 * M_PI * t.I2, 1e-12);
    }
}

TEST(Actions, QuadratureAgreesWithAdaptiveOracle) {
    for (const auto& c : oracle::action_cases()) {
        SCOPED_TRACE(c.name);
        oracle::ActionOracle ref(c);
        const oracle::ActionValues want = ref.totals();
        TorusData t = build_torus(ref.model(), 1.0, c.kappa);
        EXPECT_NEAR(t.I1, want.S / M_PI, 1e-9 * t.I1);
        EXPECT_NEAR(t.T1, want.T1, 1e-9 * want.T1);
        EXPECT_NEAR(t.mean_f2 * t.T1, want.F2, 1e-9 * want.F2);
        EXPECT_NEAR(t.I2, want.S2 / (2 * M_PI), 1e-9 * t.I2);
        EXPECT_NEAR(t.eta_total, want.eta, 1e-9 * want.eta);
        for (double s : {0.1, 0.37, 0.5, 0.81}) {
            double u = c.a + s * (c.b - c.a);
            EXPECT_NEAR(t.S_L(u), ref.S_L(u), 1e-9 * want.S);
        }
    }
}

TEST(Actions, QuantizationExample3) {
    DepthModel m = load_model(example3_spec());
    QuantizationResult a = solve_quantization(m, {10, 11});
    EXPECT_NEAR(a.kappa, -2.132799706586304, 1e-6 * 2.132799706586304);
    EXPECT_NEAR(1.0 / a.h, 12.08646478547537, 1e-6 * 12.08646478547537);
    EXPECT_LE(a.residual, 1e-12);
    EXPECT_EQ(a.mode.q[0], 0.0);
    QuantizationResult b = solve_quantization(m, {28, 32});
    EXPECT_NEAR(b.kappa, -2.029449909118645, 1e-6 * 2.029449909118645);
    EXPECT_NEAR(1.0 / b.h, 33.0692001800103, 1e-6 * 33.0692001800103);
    TorusData t = build_torus(m, 1.0, b.kappa);
    auto q = action_defect(t, {28, 32}, b.h);
    EXPECT_NEAR(q[0], 0.0, 1e-10);
    EXPECT_NEAR(q[1], 0.0, 1e-10);
}

TEST(Actions, QuantizationHarmonicToy) {
    const double c = 4, g0 = 2;
    DepthModel m = load_model(toy_spec("4-u^2", "2", -3, 3));
    for (auto nu : {std::array<int, 2>{3, 2}, std::array<int, 2>{10, 7}}) {
        double r = (nu[0] + 0.5) / nu[1];
        double s = -r + std::sqrt(r * r + c + g0);
        QuantizationResult q = solve_quantization(m, nu);
        EXPECT_NEAR(q.kappa, s * s - g0, 1e-10);
        EXPECT_NEAR(q.h, s / nu[1], 1e-12);
    }
    EXPECT_THROW(solve_quantization(m, {3, 0}), ConfigError);
}

TEST(Actions, DefectExample1) {
    DepthModel m = load_model(example1_spec());
    TorusData t = build_torus(m, 1.0, -0.03);
    QuantizedMode q = make_mode(t, {18, 12}, 1 / 14.3);
    EXPECT_NEAR(q.q[0] * 14.3, -0.8, 2e-2);
    EXPECT_NEAR(q.q[1] * 14.3, -0.492, 2e-2);
    EXPECT_DOUBLE_EQ(q.I_nu[0], 18.5 / 14.3);
    EXPECT_DOUBLE_EQ(q.I_nu[1], 12 / 14.3);
}
