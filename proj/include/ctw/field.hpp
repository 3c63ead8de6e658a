#pragma once

// Leading term of the glued eigenfunction
//   psi = P e^{i S2(v)/h} ( rho_L conj(W^L) + e^{i pi I1/h - i pi/2} rho_R W^R ),
//   P   = sqrt(pi (f + g)) / sqrt(2 h pu pv),
// with Airy kernels at simple caustics and Bessel kernels at coastal ones.
// Only the special-function kernel of W^L is conjugated, not its amplitudes; the
// Airy kernels carry a factor sqrt(2h) so both kernel types share the
// interior asymptotics sqrt(2h/pi) cos(S/h - pi/4).

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "ctw/transport.hpp"

namespace ctw {

struct FieldOptions {
    int nu = 512, nv = 512;          // u from u0 to u1 inclusive, v = 2 pi j / nv
    double delta = M_PI / 8;         // partition width in alpha1
    double mid = M_PI / 2;           // partition centre in alpha1
    double caustic_band = 1e-6;      // relative to the motion-interval length
    double u_min = NAN, u_max = NAN; // optional sub-range; defaults to the motion interval
};

// exp-based C-infinity step: 0 for x <= -1, 1 for x >= 1, sigma(x) + sigma(-x) = 1
double smoothstep(double x);
std::pair<double, double> partition_of_unity(double alpha1, double delta = M_PI / 8, double mid = M_PI / 2);

// (B^L_+, B^L_-, B^R_+, B^R_-)
std::array<cplx, 4> defect_multipliers(const AngleChart& chart, std::array<double, 2> q, double h, double u);

// (A_ev^L, A_odd^L, A_ev^R, A_odd^R); alpha2 is taken on the sheet of each term.
std::array<cplx, 4> amplitude_combinations(const AngleChart& chart, const TransportSolution& A, std::array<double, 2> q,
                                           double h, double u, double v);

// Kernel pair (F, G) of one side: W = A_ev F + i A_odd G.
std::pair<double, double> airy_kernels(double S, double h);    // sqrt(2h) (z^{1/6} Ai(-z^{2/3}), z^{-1/6} Ai'(-z^{2/3}))
std::pair<double, double> bessel_kernels(double S, double h);  // (sqrt(S) J0(S/h), sqrt(S) J1(S/h))

class FieldEvaluator {
public:
    FieldEvaluator(const AngleChart& chart, const TransportSolution& A, const QuantizedMode& mode,
                   const FieldOptions& opt = {});

    // v-only data of one grid column
    struct Column {
        double g = 0.0, pv = 0.0, a2base = 0.0;
        cplx phase;  // exp(i S2(v) / h)
    };
    Column column(double v) const;

    cplx operator()(double u, double v) const;
    // One grid row, caustic-band limit included; out[j] for cols[j].
    void row(double u, const std::vector<Column>& cols, cplx* out) const;
    // Kernel-conjugated W^L and the phased W^R at one point (no prefactor, no partition).
    std::pair<cplx, cplx> sides(double u, double v) const;
    // Raw formula without the caustic-band limit; infinite or NaN exactly on a caustic.
    cplx raw(double u, double v) const;
    double band() const { return band_; }
    const AngleChart& chart() const { return chart_; }
    const FieldOptions& options() const { return opt_; }
    double prefactor(double u, double v) const;

private:
    struct RowData;
    RowData row_data(double u) const;
    std::pair<cplx, cplx> sides(const RowData& r, const Column& c) const;
    void raw_row(double u, const std::vector<Column>& cols, cplx* out) const;
    std::pair<double, double> kernels(Side side, double S) const;

    const AngleChart& chart_;
    const TransportSolution& A_;
    QuantizedMode mode_;
    FieldOptions opt_;
    double band_;
    cplx right_phase_;
};

struct WaveField {
    std::vector<double> u, v;
    std::vector<cplx> values;  // row-major in u, v fastest
    double E = 1.0, kappa = 0.0, h = 0.0, lambda = 0.0;
    std::array<int, 2> nu{};
    CaseTag tag = CaseTag::A;
    int clipped = 0;  // grid nodes outside the motion interval set to 0

    double energy() const { return E + h * lambda; }
    std::size_t nu_count() const { return u.size(); }
    std::size_t nv_count() const { return v.size(); }
    cplx at(std::size_t i, std::size_t j) const { return values[i * v.size() + j]; }
    double max_abs() const;
    double l2_norm() const;  // 2-D trapezoid, periodic in v
};

WaveField evaluate_psi(const AngleChart& chart, const TransportSolution& A, const QuantizedMode& mode,
                       const FieldOptions& opt = {});

// max over the overlap strip |alpha1 - mid| <= delta/2 of |conj W^L - phase W^R| / (h max|W|)
double overlap_constant(const FieldEvaluator& ev, double h, int samples_u = 64, int samples_v = 32);

}  // namespace ctw
