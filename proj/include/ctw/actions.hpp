#pragma once

// Turning points, actions, frequencies and Bohr-Sommerfeld quantization for the
// separable Hamiltonian  pu^2 + pv^2 = E (f(u) + g(v)),  pu^2 = E f - kappa,  pv^2 = E g + kappa.

#include <array>

#include "ctw/model.hpp"
#include "ctw/quadrature.hpp"

namespace ctw {

enum class Side { Left, Right };
enum class CausticKind { Simple, Coastal };

struct CausticDescriptor {
    Side side = Side::Left;
    CausticKind kind = CausticKind::Simple;
    double location = 0.0;
};

struct TurningPoints {
    CausticDescriptor left, right;
};

// Bisection + secant on E f1 - kappa f2; rejects multi-well radicands.
TurningPoints find_turning_points(const DepthModel& m, double E, double kappa);

struct Actions {
    double I1 = 0.0, I2 = 0.0;
    double err1 = 0.0, err2 = 0.0;  // quadrature error estimates
};

Actions action_integrals(const DepthModel& m, double E, double kappa);

struct ActionJacobian {
    double dI1_dE = 0.0, dI1_dk = 0.0, dI2_dE = 0.0, dI2_dk = 0.0;
    double det() const { return dI1_dE * dI2_dk - dI1_dk * dI2_dE; }
};

// Central differences with one Richardson step; `rel_step` is relative to max(|E|, |kappa|).
ActionJacobian action_jacobian_fd(const DepthModel& m, double E, double kappa, double rel_step = 1e-5);
// Same derivatives from their integral representations.
ActionJacobian action_jacobian_exact(const DepthModel& m, double E, double kappa);

struct Frequencies {
    // dE/dI from the inverted finite-difference Jacobian.
    std::array<double, 2> canonical{};
    // Constant angle velocities (2 pi / T1, 4 pi <f2> / eta(2 pi)) in the time
    // tau with dtau/dt = 1/(f1 + f2 g).  canonical = time_scale * angular.
    std::array<double, 2> angular{};
    double time_scale = 1.0;
    ActionJacobian jacobian;
};

Frequencies frequencies(const DepthModel& m, double E, double kappa);

struct TorusOptions {
    int u_panels = 4096;
    int v_panels = 2048;
    int order = 10;
};

// One invariant torus with its running-integral tables.  The u-tables live in
// theta in [0, pi] with u = u0 + L sin^2(theta/2), L = u1 - u0, which removes the
// square-root behaviour at both ends of the motion interval.
struct TorusData {
    DepthModel model;
    double E = 1.0, kappa = 0.0;
    TurningPoints caustics;
    double u0 = 0.0, u1 = 1.0;
    double I1 = 0.0, I2 = 0.0;
    double T1 = 0.0;         // int du / (sqrt(E f1 - kappa f2) sqrt(f2))
    double mean_f2 = 0.0;    // <f2> over alpha1
    double eta_total = 0.0;  // eta(2 pi)
    Frequencies freq;

    // theta channels: 0 S (pu du), 1 alpha (du / (pu f2)), 2 f2 * alpha, 3 f1 * alpha
    CumulativeTable utab;
    // v channels: 0 S2 (pv dv), 1 eta (dv / pv), 2 g * eta
    CumulativeTable vtab;

    double length() const { return u1 - u0; }
    double theta_of_u(double u) const;
    double u_of_theta(double theta) const;
    double radicand(double u) const;  // E f1 - kappa f2
    double p_u(double u) const;       // sqrt(E f - kappa)
    double p_v(double v) const;       // sqrt(E g + kappa)
    double S_L(double u) const;       // int_{u0}^{u} pu
    double S_R(double u) const;       // int_{u}^{u1} pu
    double S2(double v) const;        // int_0^v pv, any real v
    double eta(double v) const;       // int_0^v 1/pv, any real v
    double v_of_eta(double e) const;  // inverse of eta on the real line
};

TorusData build_torus(const DepthModel& m, double E, double kappa, const TorusOptions& opt = {});

struct QuantizedMode {
    std::array<int, 2> nu{};
    double h = 0.0;
    std::array<double, 2> I_nu{};  // (h (nu1 + 1/2), h nu2)
    std::array<double, 2> q{};     // I_nu - I(reference)
};

std::array<double, 2> action_defect(const TorusData& t, std::array<int, 2> nu, double h);
QuantizedMode make_mode(const TorusData& reference, std::array<int, 2> nu, double h);

struct QuantizationResult {
    double kappa = 0.0;
    double h = 0.0;
    QuantizedMode mode;
    int iterations = 0;
    double residual = 0.0;
};

// 2-D Newton on (kappa, h) for 2 S1 = 2 pi h (nu1 + 1/2), S2(2 pi) = 2 pi h nu2.
// q is taken against `reference` when given, otherwise against the solved torus (q = 0).
QuantizationResult solve_quantization(const DepthModel& m, std::array<int, 2> nu, double E = 1.0,
                                      const TorusData* reference = nullptr);

// Admissible kappa range (-E min g, E max f) sampled on the model grid.
std::array<double, 2> kappa_window(const DepthModel& m, double E);

}  // namespace ctw
