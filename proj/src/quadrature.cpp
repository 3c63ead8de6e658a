#include "ctw/quadrature.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace ctw {

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) throw NumericalError("Gauss-Legendre order must be positive");
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    // Newton iteration on P_n from Chebyshev-like initial guesses.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return cache.emplace(n, std::move(r)).first->second;
}

CumulativeTable::CumulativeTable(double a, double b, int panels, int order, int channels, const Integrand& q)
    : a_(a), b_(b), dx_((b - a) / panels), panels_(panels), channels_(channels) {
    if (!(b > a) || panels < 1 || channels < 1) throw NumericalError("invalid cumulative table layout");
    const GaussRule& r = gauss_legendre(order);
    const int m = order;
    std::vector<double> panel_int(static_cast<std::size_t>(panels) * channels);
    std::vector<double> at_left(static_cast<std::size_t>(panels) * channels), at_right(at_left.size());
    std::vector<double> d_left(at_left.size()), d_right(at_left.size());
    std::vector<double> vals(static_cast<std::size_t>(m) * channels);
    // Lagrange weights that extrapolate node values to t = -1 and t = +1.
    // Also their derivatives, for the second slope of the quintic interpolant.
    std::vector<double> lw_lo(m), lw_hi(m), dw_lo(m), dw_hi(m);
    for (int j = 0; j < m; ++j) {
        double lo = 1.0, hi = 1.0, slo = 0.0, shi = 0.0;
        for (int k = 0; k < m; ++k) {
            if (k == j) continue;
            lo *= (-1.0 - r.x[k]) / (r.x[j] - r.x[k]);
            hi *= (1.0 - r.x[k]) / (r.x[j] - r.x[k]);
        }
        for (int k = 0; k < m; ++k) {
            slo += 1.0 / (-1.0 - r.x[k]);
            shi += 1.0 / (1.0 - r.x[k]);
        }
        slo -= 1.0 / (-1.0 - r.x[j]);
        shi -= 1.0 / (1.0 - r.x[j]);
        lw_lo[j] = lo;
        lw_hi[j] = hi;
        dw_lo[j] = lo * slo;
        dw_hi[j] = hi * shi;
    }
    for (int p = 0; p < panels; ++p) {
        double x0 = a + p * dx_, half = 0.5 * dx_;
        for (int j = 0; j < m; ++j) q(x0 + half * (1.0 + r.x[j]), &vals[static_cast<std::size_t>(j) * channels]);
        for (int c = 0; c < channels; ++c) {
            double s = 0.0, lo = 0.0, hi = 0.0, dlo = 0.0, dhi = 0.0;
            for (int j = 0; j < m; ++j) {
                double y = vals[static_cast<std::size_t>(j) * channels + c];
                if (!std::isfinite(y)) throw NumericalError("non-finite integrand in cumulative table");
                s += r.w[j] * y;
                lo += lw_lo[j] * y;
                hi += lw_hi[j] * y;
                dlo += dw_lo[j] * y;
                dhi += dw_hi[j] * y;
            }
            panel_int[idx(p, c)] = s * half;
            at_left[idx(p, c)] = lo;
            at_right[idx(p, c)] = hi;
            d_left[idx(p, c)] = dlo / half;
            d_right[idx(p, c)] = dhi / half;
        }
    }
    left_.assign(static_cast<std::size_t>(panels + 1) * channels, 0.0);
    right_.assign(left_.size(), 0.0);
    deriv_.assign(left_.size(), 0.0);
    deriv2_.assign(left_.size(), 0.0);
    for (int c = 0; c < channels; ++c) {
        for (int p = 0; p < panels; ++p) left_[idx(p + 1, c)] = left_[idx(p, c)] + panel_int[idx(p, c)];
        for (int p = panels - 1; p >= 0; --p) right_[idx(p, c)] = right_[idx(p + 1, c)] + panel_int[idx(p, c)];
        deriv_[idx(0, c)] = at_left[idx(0, c)];
        deriv_[idx(panels, c)] = at_right[idx(panels - 1, c)];
        deriv2_[idx(0, c)] = d_left[idx(0, c)];
        deriv2_[idx(panels, c)] = d_right[idx(panels - 1, c)];
        for (int p = 1; p < panels; ++p) {
            deriv_[idx(p, c)] = 0.5 * (at_right[idx(p - 1, c)] + at_left[idx(p, c)]);
            deriv2_[idx(p, c)] = 0.5 * (d_right[idx(p - 1, c)] + d_left[idx(p, c)]);
        }
    }
}

void CumulativeTable::locate(double x, int& i, double& t) const {
    double s = (x - a_) / dx_;
    if (s <= 0.0) {
        i = 0;
        t = 0.0;
        return;
    }
    if (s >= panels_) {
        i = panels_ - 1;
        t = 1.0;
        return;
    }
    i = std::min(static_cast<int>(s), panels_ - 1);
    t = s - i;
}

namespace {
// Quintic Hermite on t in [0,1] with values, slopes and second slopes at both ends.
using Knots = detail::HermiteKnots;
inline double quintic(const Knots& k, double t) {
    double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    double H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5, H1 = t - 6 * t3 + 8 * t4 - 3 * t5, H2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    double H5 = 10 * t3 - 15 * t4 + 6 * t5, H4 = -4 * t3 + 7 * t4 - 3 * t5, H3 = 0.5 * (t3 - 2 * t4 + t5);
    return k.y0 * H0 + k.h * k.d0 * H1 + k.h * k.h * k.s0 * H2 + k.y1 * H5 + k.h * k.d1 * H4 + k.h * k.h * k.s1 * H3;
}
inline double quintic_slope(const Knots& k, double t) {
    double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    double H0 = -30 * t2 + 60 * t3 - 30 * t4, H1 = 1 - 18 * t2 + 32 * t3 - 15 * t4, H2 = t - 4.5 * t2 + 6 * t3 - 2.5 * t4;
    double H5 = -H0, H4 = -12 * t2 + 28 * t3 - 15 * t4, H3 = 1.5 * t2 - 4 * t3 + 2.5 * t4;
    return (k.y0 * H0 + k.y1 * H5) / k.h + k.d0 * H1 + k.d1 * H4 + k.h * (k.s0 * H2 + k.s1 * H3);
}
}  // namespace

detail::HermiteKnots CumulativeTable::knots(int i, int c, bool from_right) const {
    const double sgn = from_right ? -1.0 : 1.0;
    const std::vector<double>& y = from_right ? right_ : left_;
    return {y[idx(i, c)], y[idx(i + 1, c)], sgn * deriv_[idx(i, c)], sgn * deriv_[idx(i + 1, c)],
            sgn * deriv2_[idx(i, c)], sgn * deriv2_[idx(i + 1, c)], dx_};
}

double CumulativeTable::from_left(int c, double x) const {
    int i;
    double t;
    locate(x, i, t);
    return quintic(knots(i, c, false), t);
}

double CumulativeTable::from_right(int c, double x) const {
    int i;
    double t;
    locate(x, i, t);
    return quintic(knots(i, c, true), t);
}

double CumulativeTable::slope(int c, double x) const {
    int i;
    double t;
    locate(x, i, t);
    return quintic_slope(knots(i, c, false), t);
}

double CumulativeTable::inverse_left(int c, double value) const {
    if (value <= 0.0) return a_;
    if (value >= total(c)) return b_;
    // boundary values are increasing for a positive integrand
    int lo = 0, hi = panels_;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        if (left_[idx(mid, c)] <= value)
            lo = mid;
        else
            hi = mid;
    }
    const Knots k = knots(lo, c, false);
    double tl = 0.0, tr = 1.0;
    double t = (k.y1 > k.y0) ? (value - k.y0) / (k.y1 - k.y0) : 0.5;
    for (int it = 0; it < 60; ++it) {
        double f = quintic(k, t) - value;
        if (f > 0)
            tr = t;
        else
            tl = t;
        double fp = quintic_slope(k, t) * dx_;
        double tn = fp > 0 ? t - f / fp : 0.5 * (tl + tr);
        if (!(tn > tl && tn < tr)) tn = 0.5 * (tl + tr);
        if (std::abs(tn - t) < 1e-16) {
            t = tn;
            break;
        }
        t = tn;
    }
    return a_ + (lo + t) * dx_;
}

}  // namespace ctw
