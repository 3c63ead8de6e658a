#pragma once

// Transport equation on the 2-torus
//   <omega, d/dalpha> A + i G A = 0,   G = f (H_sub - lambda) + <omega, q> / h,
// solved by A = exp(i Phi) with Phi_k = i G_k / <omega, k>.

#include <array>
#include <complex>
#include <vector>

#include "ctw/torus.hpp"

namespace ctw {

using cplx = std::complex<double>;

// Raised when a mode |k|_inf <= N has |<omega, k>| below the divisor floor.
class ResonanceError : public NumericalError {
public:
    ResonanceError(std::array<int, 2> k, double divisor);
    std::array<int, 2> k() const { return k_; }
    double divisor() const { return divisor_; }

private:
    std::array<int, 2> k_;
    double divisor_;
};

struct TransportOptions {
    int N = 16;
    int grid = 256;
    double divisor_floor = 1e-8;
};

struct TransportSolution {
    double lambda = 0.0;
    int N = 0;
    int grid = 0;
    std::array<double, 2> omega{};
    // (2N+1)^2 coefficients, index (k1 + N) * (2N+1) + (k2 + N)
    std::vector<cplx> G_coeffs, Phi_coeffs;
    double G0 = 0.0;              // |mean of G| with lambda inserted
    double min_divisor = 0.0;     // over 0 < |k|_inf <= N
    double residual_bound = 0.0;  // sum of |G_k| over the computed modes beyond N
    double phi_tail = 0.0;        // sum of |G_k / <omega,k>| over the same modes

    cplx G(int k1, int k2) const { return G_coeffs[index(k1, k2)]; }
    cplx Phi(int k1, int k2) const { return Phi_coeffs[index(k1, k2)]; }
    double phi(double a1, double a2) const;
    // <omega, grad Phi> from the series
    double phi_flow_derivative(double a1, double a2) const;
    cplx amplitude(double a1, double a2) const { return std::polar(1.0, phi(a1, a2)); }
    // Phi(a1, .) as a series in alpha2: coefficients c_{k2}, k2 = -N..N
    std::vector<cplx> row_coeffs(double a1) const;
    double phi_row(const std::vector<cplx>& c, double a2) const;
    bool trivial() const;  // Phi identically zero

private:
    int index(int k1, int k2) const { return (k1 + N) * (2 * N + 1) + (k2 + N); }
};

double compute_lambda(const AngleChart& chart, std::array<double, 2> q, double h, int grid = 512);

TransportSolution solve_transport(const AngleChart& chart, std::array<double, 2> q, double h, double lambda,
                                  const TransportOptions& opt = {});

// Same solve from samples G[i * n + j] at (2 pi i / n, 2 pi j / n); opt.grid is ignored.
TransportSolution fourier_solve(std::array<double, 2> omega, const std::vector<double>& G, int n, double lambda,
                                const TransportOptions& opt = {});

// max over an n x n alpha-grid of |<omega, grad A> + i G A|, derivative taken from the series
double transport_residual(const AngleChart& chart, const TransportSolution& sol, std::array<double, 2> q, double h,
                          int n = 256);

struct Divisor {
    std::array<int, 2> k{};
    double value = 0.0;  // |<omega, k>|
};

struct ResonanceReport {
    std::vector<Divisor> smallest;  // ascending, one of each +-k pair
    double C1 = 0.0, C2 = 0.0;      // |<omega,k>| >= C1 / (|k1| + |k2|)^C2 on the scanned range
    bool resonant = false;          // some divisor vanishes to rounding
};

ResonanceReport resonance_report(std::array<double, 2> omega, int N, int count = 10);

}  // namespace ctw
