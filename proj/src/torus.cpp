#include "ctw/torus.hpp"

#include <cmath>

namespace ctw {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

double reduce(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}
}  // namespace

AngleChart build_chart(std::shared_ptr<const TorusData> torus) {
    AngleChart c;
    c.torus = std::move(torus);
    const TorusData& t = *c.torus;
    // <f2> as the trapezoid mean of f2(u(alpha1)) over 4096 samples; the integrand
    // is smooth and even about 0 and pi, so this matches the table quadrature.
    const int n = 4096;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        double w = (i == 0 || i == n) ? 0.5 : 1.0;
        s += w * t.model.F2(c.u_of_alpha1(M_PI * i / n));
    }
    c.mean_f2 = s / n;
    if (std::abs(c.mean_f2 - t.mean_f2) > 1e-8 * std::abs(t.mean_f2))
        throw NumericalError("chart: trapezoid and quadrature values of <f2> disagree");
    c.time_scale = t.freq.time_scale;
    c.omega = {c.time_scale * t.freq.angular[0], c.time_scale * t.freq.angular[1]};
    // monotonicity of the alpha1 table
    double prev = -1.0;
    for (int i = 0; i <= 1024; ++i) {
        double a = c.alpha1_of_u(t.u0 + (t.u1 - t.u0) * i / 1024);
        if (a < prev) throw NumericalError("chart: alpha1(u) is not monotone");
        prev = a;
    }
    return c;
}

double AngleChart::alpha1_of_u(double u) const {
    const TorusData& tt = *torus;
    double th = tt.theta_of_u(u);
    if (th <= 0.5 * M_PI) return M_PI * tt.utab.from_left(1, th) / tt.T1;
    return M_PI - M_PI * tt.utab.from_right(1, th) / tt.T1;
}

double AngleChart::u_of_alpha1(double a) const {
    const TorusData& tt = *torus;
    double r = reduce(a);
    if (r > M_PI) r = kTwoPi - r;
    double th = tt.utab.inverse_left(1, r * tt.T1 / M_PI);
    return tt.u_of_theta(th);
}

double AngleChart::correction(double a) const {
    const TorusData& tt = *torus;
    double r = reduce(a);
    double sign = 1.0;
    if (r > M_PI) {
        r = kTwoPi - r;
        sign = -1.0;
    }
    const double th = tt.utab.inverse_left(1, r * tt.T1 / M_PI);
    const double k = sign * kTwoPi / tt.eta_total;
    // F = (2 pi / eta(2 pi)) (<f2> P(theta) - Q(theta)), P and Q the running alpha and
    // f2*alpha integrals; both brackets vanish at theta = pi, so past pi/2 use the right tails.
    if (th <= 0.5 * M_PI) return k * (tt.mean_f2 * tt.utab.from_left(1, th) - tt.utab.from_left(2, th));
    return k * (tt.utab.from_right(2, th) - tt.mean_f2 * tt.utab.from_right(1, th));
}

double AngleChart::alpha2(double u, double v, int sheet) const {
    const TorusData& tt = *torus;
    double a1 = alpha1_of_u(u);
    return kTwoPi * tt.eta(v) / tt.eta_total + sheet * correction(a1);
}

double AngleChart::v_of(double a1, double a2) const {
    const TorusData& tt = *torus;
    return tt.v_of_eta((a2 - correction(a1)) * tt.eta_total / kTwoPi);
}

ChartRow chart_row(const AngleChart& chart, double a1) {
    ChartRow r;
    r.u = chart.u_of_alpha1(a1);
    r.f1 = chart.t().model.F1(r.u);
    r.f2 = chart.t().model.F2(r.u);
    r.F = chart.correction(a1);
    return r;
}

double measure_factor(const AngleChart& chart, const ChartRow& row, double v) {
    return chart.time_scale * (row.f1 + row.f2 * chart.t().model.G(v));
}

double h_sub_on_torus(const AngleChart& chart, const ChartRow& row, double v) {
    const TorusData& t = chart.t();
    if (t.model.mu == 0) return 0.0;
    const double d1 = t.model.D1(row.u, v);
    if (row.f2 == 0.0) {
        if (std::abs(d1) > 1e-12) throw NumericalError("subprincipal symbol is not finite at the shore: D1 does not vanish there");
        return 0.0;
    }
    double val = d1 * t.E * (row.f1 + row.f2 * t.model.G(v)) / row.f2;
    if (!std::isfinite(val)) throw NumericalError("subprincipal symbol is not finite at u=" + std::to_string(row.u));
    return val;
}

double measure_factor(const AngleChart& chart, std::array<double, 2> alpha) {
    ChartRow row = chart_row(chart, alpha[0]);
    return measure_factor(chart, row, chart.v_of(alpha[0], alpha[1]));
}

double h_sub_on_torus(const AngleChart& chart, std::array<double, 2> alpha) {
    ChartRow row = chart_row(chart, alpha[0]);
    return h_sub_on_torus(chart, row, chart.v_of(alpha[0], alpha[1]));
}

}  // namespace ctw
