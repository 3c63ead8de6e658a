#pragma once

// Problem data: D0 = f2 / (f1 + f2 g) on the cylinder (u, v), perturbation D1.

#include <limits>
#include <string>

#include "ctw/expr.hpp"

namespace ctw {

enum class CaseTag { A, B, C };

CaseTag parse_case(const std::string& s);
const char* case_name(CaseTag c);

struct ModelSpec {
    double u_left = -std::numeric_limits<double>::infinity();
    double u_right = std::numeric_limits<double>::infinity();
    std::string f1, f2, g, d1 = "0";
    int mu = 0;
    CaseTag tag = CaseTag::A;
};

struct DepthModel {
    double u_left = 0.0, u_right = 1.0;
    Expr f1, f2, g, d1;
    int mu = 0;
    CaseTag tag = CaseTag::A;

    bool shore_left() const { return tag == CaseTag::B || tag == CaseTag::C; }
    bool shore_right() const { return tag == CaseTag::B; }

    double F1(double u) const { return f1.eval(Bindings().set(Var::U, u)); }
    double F2(double u) const { return f2.eval(Bindings().set(Var::U, u)); }
    double G(double v) const { return g.eval(Bindings().set(Var::V, v)); }
    double D1(double u, double v) const { return d1.eval(Bindings::uv(u, v)); }
    double f(double u) const { return F1(u) / F2(u); }
};

// Parses and validates; throws ConfigError with a named diagnostic.
DepthModel load_model(const ModelSpec& spec);

// Detected from the behaviour of f = f1/f2 at the configured endpoints.
CaseTag classify_case(const DepthModel& m);

// D0(u, v) = f2 / (f1 + f2 g).
double depth(const DepthModel& m, double u, double v);

// Subprincipal symbol D1 (pu^2 + pv^2), and its restriction D1 E (f + g) to the energy surface.
double h_sub_raw(const DepthModel& m, double u, double v, double pu, double pv);
double h_sub_on_shell(const DepthModel& m, double E, double u, double v);

}  // namespace ctw
