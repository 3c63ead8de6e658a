#pragma once

// Residual of the leading term under the discretized operator
//   H psi = -h^2 [ d_u (D d_u psi) + d_v (D d_v psi) ],  D = D0 + mu h D1,
// sixth-order conservative flux differences, v periodic.

#include <functional>
#include <string>
#include <vector>

#include "ctw/field.hpp"

namespace ctw {

using Coefficient = std::function<double(double u, double v)>;

Coefficient operator_coefficient(const DepthModel& m, double h, double mu);

// Rows [i_lo, i_hi] of H psi on a uniform grid u x v with v_j = 2 pi j / nv; psi row-major, v fastest.
// Needs 5 rows of stencil on each side of the window.
std::vector<cplx> apply_operator(const Coefficient& D, const std::vector<double>& u, std::size_t nv,
                                 const std::vector<cplx>& psi, double h, std::size_t i_lo, std::size_t i_hi);
std::vector<cplx> apply_operator(const DepthModel& m, const WaveField& field, double h, double mu, std::size_t i_lo,
                                 std::size_t i_hi);

struct ResidualOptions {
    double band = 0.15;           // excluded |alpha1 - {0, pi}| bands
    double pass_threshold = 0.5;  // relative residual above this is a FAIL
    bool check_grid = true;       // recompute at half spacing
    double grid_tolerance = 0.2;
    bool zero_lambda = false;     // use E instead of E + h lambda
};

struct ResidualReport {
    double l2_residual = 0.0, l2_norm = 0.0, relative_residual = 0.0;
    double relative_re = 0.0, relative_im = 0.0;  // Re psi and Im psi on their own
    double window_u0 = 0.0, window_u1 = 0.0;
    int fd_order = 6;
    double h = 0.0, energy = 0.0;
    double refined_l2_residual = -1.0;  // at half spacing, when checked
    bool grid_limited = false;
    bool pass = false;
};

// u-range of the interior window
std::array<double, 2> interior_window(const AngleChart& chart, double band);

// Residual of a computed field on the rows inside [window_u0, window_u1].
ResidualReport residual(const DepthModel& m, const WaveField& field, double energy, double mu, double window_u0,
                        double window_u1, const ResidualOptions& opt = {});

// Full check for one mode: field at the given grid and, if requested, at half spacing.
ResidualReport residual(const AngleChart& chart, const TransportSolution& A, const QuantizedMode& mode,
                        const FieldOptions& field_opt = {}, const ResidualOptions& opt = {});
// Same, for a field already evaluated with `field_opt`.
ResidualReport residual(const AngleChart& chart, const TransportSolution& A, const QuantizedMode& mode,
                        const WaveField& field, const FieldOptions& field_opt, const ResidualOptions& opt = {});

struct StudyOptions {
    int count = 3;
    double E = 1.0;
    FieldOptions field;
    ResidualOptions residual;
    TransportOptions transport;
};

struct StudyMember {
    std::array<int, 2> nu{};
    double kappa = 0.0, h = 0.0, lambda = 0.0;
    ResidualReport report;
    bool excluded = false;
    std::string note;
};

struct StudyResult {
    std::vector<StudyMember> members;
    double slope = 0.0, slope_re = 0.0, slope_im = 0.0;
    bool pass = false;  // slope >= 1.7
};

// Least-squares slope of log(r) against log(h).
double fit_slope(const std::vector<double>& h, const std::vector<double>& r);

// Modes m * direction, m = 1..count, each quantized on its own torus (q = 0).
StudyResult convergence_study(const DepthModel& m, std::array<int, 2> direction, const StudyOptions& opt = {});

}  // namespace ctw
