#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ctw/expr.hpp"

using namespace ctw;

TEST(Expr, ParsesExample1Depth) {
    Expr e = parse("exp(u*(2.7-u)) - 1.03");
    EXPECT_EQ(e.free_vars(), (std::set<std::string>{"u"}));
    EXPECT_NEAR(e.eval({{"u", 0.0}}), -0.03, 1e-15);
}

TEST(Expr, LiteralZero) {
    Expr e = parse("0");
    EXPECT_TRUE(e.free_vars().empty());
    EXPECT_EQ(e.eval({}), 0.0);
}

TEST(Expr, UnbalancedParenReportsPosition) {
    try {
        parse("sin(");
        FAIL() << "expected ParseError";
    } catch (const ParseError& err) {
        EXPECT_EQ(err.position(), 4u);
        EXPECT_FALSE(err.expected().empty());
    }
}

TEST(Expr, ImplicitMultiplicationRejected) {
    EXPECT_THROW(parse("3v"), ParseError);
    EXPECT_THROW(parse("2 u"), ParseError);
}

TEST(Expr, UnknownIdentifier) {
    try {
        parse("w+1");
        FAIL();
    } catch (const ParseError& err) {
        EXPECT_NE(std::string(err.what()).find("unknown identifier 'w'"), std::string::npos);
    }
    EXPECT_THROW(parse("sinh(u)"), ParseError);
}

TEST(Expr, Precedence) {
    EXPECT_EQ(parse("2+3*4").eval({}), 14.0);
    EXPECT_EQ(parse("2^3^2").eval({}), 512.0);
    EXPECT_EQ(parse("-2^2").eval({}), -4.0);
    EXPECT_EQ(parse("2^-1").eval({}), 0.5);
    EXPECT_EQ(parse("8/4/2").eval({}), 1.0);
    EXPECT_EQ(parse("1-2-3").eval({}), -4.0);
    EXPECT_EQ(parse("  ( 1 + 2 ) * 3 ").eval({}), 9.0);
}

TEST(Expr, ConfigExamples) {
    EXPECT_NEAR(parse("4/5 + (1/3)*cos(3*v)*sin(v)^2").eval({{"v", 0.0}}), 0.8, 1e-15);
    EXPECT_DOUBLE_EQ(parse("1/(2*u*(1-u))").eval({{"u", 0.5}}), 2.0);
    EXPECT_NEAR(parse("pi").eval({}), M_PI, 0.0);
    EXPECT_NEAR(parse("ln(e)").eval({}), 1.0, 1e-16);
    EXPECT_NEAR(parse("1.5e-3*2").eval({}), 3e-3, 1e-18);
}

TEST(Expr, DomainFaults) {
    EXPECT_THROW(parse("sqrt(u)").eval({{"u", -1.0}}), DomainFault);
    EXPECT_THROW(parse("ln(u)").eval({{"u", 0.0}}), DomainFault);
    EXPECT_THROW(parse("1/u").eval({{"u", 0.0}}), DomainFault);
    EXPECT_THROW(parse("u^0.5").eval({{"u", -2.0}}), DomainFault);
    EXPECT_EQ(parse("u^3").eval({{"u", -2.0}}), -8.0);
    try {
        parse("1 + sqrt(u-2)").eval({{"u", 1.0}});
        FAIL();
    } catch (const DomainFault& f) {
        EXPECT_EQ(f.subexpression(), "sqrt((u-2))");
    }
}

TEST(Expr, UnboundVariable) {
    EXPECT_THROW(parse("u+v").eval({{"u", 1.0}}), UnboundVariable);
    EXPECT_THROW(parse("u+v").eval_dual({{"v", 1.0}}, Var::V), UnboundVariable);
}

TEST(Expr, DualExamples) {
    Dual d = parse("u^2").eval_dual({{"u", 3.0}}, Var::U);
    EXPECT_DOUBLE_EQ(d.value, 9.0);
    EXPECT_DOUBLE_EQ(d.derivative, 6.0);
    d = parse("2*u*(1-u)").eval_dual({{"u", 0.0}}, Var::U);
    EXPECT_EQ(d.value, 0.0);
    EXPECT_DOUBLE_EQ(d.derivative, 2.0);
    // finite-difference oracle for the same function
    Expr f2 = parse("2*u*(1-u)");
    double fd = (f2.eval({{"u", 1e-6}}) - f2.eval({{"u", -1e-6}})) / 2e-6;
    EXPECT_NEAR(fd, d.derivative, 1e-9);
    d = parse("sin(v)").eval_dual({{"v", 0.0}}, Var::V);
    EXPECT_EQ(d.value, 0.0);
    EXPECT_DOUBLE_EQ(d.derivative, 1.0);
}

TEST(Expr, DualMatchesCentralDifferences) {
    const char* sources[] = {
        "exp(u*(2.7-u)) - 1.03",
        "(2*exp(-(u-sqrt(2))^2)+2*u*sin(u))/3",
        "39*(1-u)^4*(exp(u)-1)^4*exp(sin(3*v))",
        "exp(sin(3*u))*cos(2*v)^2",
        "tan(u/3) + ln(2+u) + abs(u-0.1) + u^v + sqrt(3+u)",
        "4/5 + (1/3)*cos(3*v)*sin(v)^2",
    };
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.2, 1.7), V(0.0, 6.28);
    for (const char* s : sources) {
        Expr e = parse(s);
        for (int k = 0; k < 50; ++k) {
            double u = U(rng), v = V(rng);
            for (Var seed : {Var::U, Var::V}) {
                Bindings b = Bindings::uv(u, v);
                Dual d = e.eval_dual(b, seed);
                EXPECT_DOUBLE_EQ(d.value, e.eval(b));
                Bindings bp = b, bm = b;
                int i = static_cast<int>(seed);
                bp.value[i] += 1e-6;
                bm.value[i] -= 1e-6;
                double fd = (e.eval(bp) - e.eval(bm)) / 2e-6;
                double scale = std::max(1.0, std::abs(d.derivative));
                EXPECT_NEAR(d.derivative, fd, 1e-6 * scale) << s;
            }
        }
    }
}

TEST(Expr, PrettyPrintRoundTrip) {
    const char* sources[] = {
        "exp(u*(2.7-u)) - 1.03",
        "(2*exp(-(u-sqrt(2))^2)+2*u*sin(u))/3",
        "(2/23)*(2-u)^4*(exp(u)-1)^4*exp(sin(2*v))",
        "4/5 + (1/3)*cos(3*v)*sin(v)^2",
        "-u^2^-1 + 3/7*v - -v",
        "3+sin(v)/2",
    };
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.1, 1.9), V(-3.0, 9.0);
    for (const char* s : sources) {
        Expr e = parse(s);
        Expr r = parse(e.to_string());
        EXPECT_EQ(r.to_string(), e.to_string());
        for (int k = 0; k < 100; ++k) {
            Bindings b = Bindings::uv(U(rng), V(rng));
            double a = e.eval(b), c = r.eval(b);
            EXPECT_LE(std::abs(a - c), 1e-15 * std::max(1.0, std::abs(a))) << s;
        }
    }
}

TEST(Expr, Deterministic) {
    Expr a = parse("exp(sin(3*u))*cos(2*v)^2");
    Expr b = parse("exp(sin(3*u))*cos(2*v)^2");
    for (double u = -1; u < 3; u += 0.37) {
        Bindings bb = Bindings::uv(u, u * 1.3);
        EXPECT_EQ(a.eval(bb), b.eval(bb));
    }
}
