#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ctw/model.hpp"
#include "test_support.hpp"

using namespace ctw;
using namespace ctw::testing;

TEST(Model, ExamplesLoad) {
    EXPECT_EQ(load_model(example1_spec()).tag, CaseTag::A);
    EXPECT_EQ(load_model(example2_spec()).tag, CaseTag::C);
    EXPECT_EQ(load_model(example3_spec()).tag, CaseTag::B);
}

TEST(Model, ClassifyCase) {
    EXPECT_EQ(classify_case(load_model(example1_spec())), CaseTag::A);
    EXPECT_EQ(classify_case(load_model(example2_spec())), CaseTag::C);
    EXPECT_EQ(classify_case(load_model(example3_spec())), CaseTag::B);
}

TEST(Model, ShoreMustVanish) {
    ModelSpec s = example3_spec();
    s.f2 = "1";
    try {
        load_model(s);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("f2 does not vanish at declared shore"), std::string::npos);
    }
}

TEST(Model, ShoreDerivativeMustBeNonzero) {
    ModelSpec s = example3_spec();
    s.f2 = "u^2*(1-u)";
    EXPECT_THROW(load_model(s), ConfigError);
}

TEST(Model, D1MustVanishAtShore) {
    ModelSpec s = example3_spec();
    s.d1 = "1 + u";
    EXPECT_THROW(load_model(s), ConfigError);
}

TEST(Model, CaseMismatchRejected) {
    ModelSpec s = example1_spec();
    s.tag = CaseTag::B;
    EXPECT_THROW(load_model(s), ConfigError);
    ModelSpec s3 = example3_spec();
    s3.tag = CaseTag::A;  // f2 vanishes at both ends but no shore declared
    EXPECT_THROW(load_model(s3), ConfigError);
}

TEST(Model, VariableUsageChecked) {
    ModelSpec s = example1_spec();
    s.f1 = "u + v";
    EXPECT_THROW(load_model(s), ConfigError);
    s = example1_spec();
    s.g = "u";
    EXPECT_THROW(load_model(s), ConfigError);
    s = example1_spec();
    s.f1 = "exp(u*(2.7-u)";
    EXPECT_THROW(load_model(s), ConfigError);
}

TEST(Model, Depth) {
    DepthModel m3 = load_model(example3_spec());
    EXPECT_EQ(depth(m3, 0.0, 0.3), 0.0);
    EXPECT_NEAR(depth(m3, 0.5, 0.0), 0.2, 1e-15);
    DepthModel m1 = load_model(example1_spec());
    double g0 = 0.8 + (1.0 / 3) * std::cos(3 * 0.4) * std::pow(std::sin(0.4), 2);
    EXPECT_NEAR(depth(m1, 1.0, 0.4), 1.0 / (std::exp(1.7) - 1.03 + g0), 1e-15);
}

TEST(Model, DepthPositiveInsideAndLinearAtShore) {
    for (const ModelSpec& s : {example2_spec(), example3_spec()}) {
        DepthModel m = load_model(s);
        for (int i = 1; i < 200; ++i)
            for (int j = 0; j < 16; ++j) EXPECT_GT(depth(m, m.u_left + (m.u_right - m.u_left) * i / 200.0, j * 0.39), 0.0);
        // log-log slope over u - u_shore in [1e-6, 1e-3]
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (double lx = -6; lx <= -3 + 1e-9; lx += 0.25, ++n) {
            double x = std::log(std::pow(10.0, lx)), y = std::log(depth(m, m.u_left + std::pow(10.0, lx), 1.0));
            sx += x, sy += y, sxx += x * x, sxy += x * y;
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        EXPECT_NEAR(slope, 1.0, 1e-2);
    }
}

TEST(Model, SubprincipalSymbolOnShell) {
    DepthModel m = load_model(example1_spec());
    const double E = 1.0, kappa = -0.03;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.05, 2.65), V(0.0, 2 * M_PI);
    for (int k = 0; k < 1000; ++k) {
        double u = U(rng), v = V(rng);
        double pu = std::sqrt(E * m.f(u) - kappa), pv = std::sqrt(E * m.G(v) + kappa);
        double raw = h_sub_raw(m, u, v, pu, pv), shell = h_sub_on_shell(m, E, u, v);
        EXPECT_LE(std::abs(raw - shell), 1e-12 * std::abs(shell));
    }
}
