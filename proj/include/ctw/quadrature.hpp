#pragma once

// Gauss-Legendre rules, composite integration and cumulative integral tables.

#include <cmath>
#include <functional>
#include <vector>

#include "ctw/error.hpp"

namespace ctw {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1], ascending
    std::vector<double> w;
};

// n-point rule; computed once per n and cached.
const GaussRule& gauss_legendre(int n);

template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
    const GaussRule& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(c + h * r.x[i]);
    return s * h;
}

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // difference between the last two panel refinements
    int panels = 0;
};

// Composite Gauss-Legendre with `nodes` points per panel; the panel count is doubled
// until successive results agree to tol * max(1, |value|).
template <class F>
QuadResult integrate_composite(F&& f, double a, double b, double tol, int nodes = 64, int max_panels = 1 << 12) {
    auto run = [&](int panels) {
        double s = 0.0, w = (b - a) / panels;
        for (int k = 0; k < panels; ++k) s += integrate_gl(f, a + k * w, a + (k + 1) * w, nodes);
        return s;
    };
    QuadResult r;
    r.panels = 1;
    double prev = run(1);
    for (int p = 2; p <= max_panels; p *= 2) {
        double cur = run(p);
        r.value = cur;
        r.error = std::abs(cur - prev);
        r.panels = p;
        if (r.error <= tol * std::max(1.0, std::abs(cur))) return r;
        prev = cur;
    }
    throw NumericalError("quadrature did not converge: achieved error estimate " + std::to_string(r.error) + " with " +
                         std::to_string(r.panels) + " panels");
}

namespace detail {
struct HermiteKnots {
    double y0, y1, d0, d1, s0, s1, h;
};
}  // namespace detail

// Running integrals F_c(x) = int_a^x q_c(t) dt of several channels q_c over [a, b].
// Panels are uniform with a Gauss-Legendre rule inside each; the integrand is never
// evaluated at panel boundaries, so removable endpoint singularities are harmless.
// Values between boundaries come from quintic Hermite interpolation using the
// integrand and its derivative (both extrapolated from the panel nodes).
class CumulativeTable {
public:
    using Integrand = std::function<void(double x, double* out)>;

    CumulativeTable() = default;
    CumulativeTable(double a, double b, int panels, int order, int channels, const Integrand& q);

    double a() const { return a_; }
    double b() const { return b_; }
    int channels() const { return channels_; }
    int panels() const { return panels_; }
    double total(int c) const { return left_[idx(panels_, c)]; }
    double from_left(int c, double x) const;   // int_a^x
    double from_right(int c, double x) const;  // int_x^b
    double slope(int c, double x) const;       // interpolated integrand
    // Inverse of from_left for a channel with positive integrand.
    double inverse_left(int c, double value) const;

private:
    double a_ = 0.0, b_ = 1.0, dx_ = 1.0;
    int panels_ = 0, channels_ = 0;
    std::vector<double> left_, right_, deriv_, deriv2_;  // (panels + 1) x channels
    std::size_t idx(int i, int c) const { return static_cast<std::size_t>(i) * channels_ + c; }
    void locate(double x, int& i, double& t) const;
    detail::HermiteKnots knots(int i, int c, bool from_right) const;
};

}  // namespace ctw
