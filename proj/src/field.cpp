#include "ctw/field.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "ctw/special.hpp"

namespace ctw {

namespace {
constexpr cplx kI(0.0, 1.0);

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
}  // namespace

double smoothstep(double x) {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = bump(1.0 + x), b = bump(1.0 - x);
    return a / (a + b);
}

std::pair<double, double> partition_of_unity(double alpha1, double delta, double mid) {
    const double rl = smoothstep((mid - alpha1) / delta);
    return {rl, 1.0 - rl};
}

namespace {
std::array<cplx, 4> multipliers_at(double a1, std::array<double, 2> q, double h) {
    const double s = q[0] / h;
    return {std::polar(1.0, s * (a1 - M_PI)), std::polar(1.0, s * (-a1 - M_PI)), std::polar(1.0, s * (a1 - M_PI)),
            std::polar(1.0, -s * (a1 - M_PI))};
}

// X_+ and X_- of the two sheets for one side
std::pair<cplx, cplx> sheet_terms(const AngleChart& chart, const TransportSolution& A, std::array<double, 2> q,
                                  double h, double u, double v, double a1, cplx Bp, cplx Bm) {
    const double a2p = chart.alpha2(u, v, +1), a2m = chart.alpha2(u, v, -1);
    const cplx Xp = Bp * A.amplitude(a1, a2p) * std::polar(1.0, q[1] * a2p / h);
    const cplx Xm = Bm * A.amplitude(-a1, a2m) * std::polar(1.0, q[1] * a2m / h);
    return {Xp, Xm};
}
}  // namespace

std::array<cplx, 4> defect_multipliers(const AngleChart& chart, std::array<double, 2> q, double h, double u) {
    return multipliers_at(chart.alpha1_of_u(u), q, h);
}

std::array<cplx, 4> amplitude_combinations(const AngleChart& chart, const TransportSolution& A, std::array<double, 2> q,
                                           double h, double u, double v) {
    const double a1 = chart.alpha1_of_u(u);
    const auto B = multipliers_at(a1, q, h);
    const auto [Lp, Lm] = sheet_terms(chart, A, q, h, u, v, a1, B[0], B[1]);
    const auto [Rp, Rm] = sheet_terms(chart, A, q, h, u, v, a1, B[2], B[3]);
    return {0.5 * (Lp + Lm), 0.5 * (-Lp + Lm), 0.5 * (Rp + Rm), 0.5 * (-Rp + Rm)};
}

std::pair<double, double> airy_kernels(double S, double h) {
    const double z = 1.5 * S / h;
    const double x = std::cbrt(z * z);
    const double z6 = std::pow(z, 1.0 / 6.0);
    const double s = std::sqrt(2.0 * h);
    return {s * z6 * airy_ai(-x), s * airy_ai_prime(-x) / z6};
}

std::pair<double, double> bessel_kernels(double S, double h) {
    const double r = std::sqrt(S);
    return {r * bessel_j0(S / h), r * bessel_j1(S / h)};
}

FieldEvaluator::FieldEvaluator(const AngleChart& chart, const TransportSolution& A, const QuantizedMode& mode,
                               const FieldOptions& opt)
    : chart_(chart), A_(A), mode_(mode), opt_(opt) {
    const TorusData& t = chart.t();
    band_ = opt.caustic_band * t.length();
    right_phase_ = std::polar(1.0, M_PI * t.I1 / mode.h - 0.5 * M_PI);
}

std::pair<double, double> FieldEvaluator::kernels(Side side, double S) const {
    const TorusData& t = chart_.t();
    const CausticKind kind = side == Side::Left ? t.caustics.left.kind : t.caustics.right.kind;
    return kind == CausticKind::Coastal ? bessel_kernels(S, mode_.h) : airy_kernels(S, mode_.h);
}

double FieldEvaluator::prefactor(double u, double v) const {
    const TorusData& t = chart_.t();
    const double fg = t.model.f(u) + t.model.G(v);
    return std::sqrt(M_PI * fg) / std::sqrt(2.0 * mode_.h * t.p_u(u) * t.p_v(v));
}

FieldEvaluator::Column FieldEvaluator::column(double v) const {
    const TorusData& t = chart_.t();
    Column c;
    c.g = t.model.G(v);
    c.pv = t.p_v(v);
    c.a2base = 2.0 * M_PI * t.eta(v) / t.eta_total;
    c.phase = std::polar(1.0, t.S2(v) / mode_.h);
    return c;
}

struct FieldEvaluator::RowData {
    double a1, rl, rr, F, f, pu;
    double FL = 0, GL = 0, FR = 0, GR = 0;
    std::array<cplx, 4> B;
    std::vector<cplx> cp, cm;  // Phi(+a1, .), Phi(-a1, .)
};

FieldEvaluator::RowData FieldEvaluator::row_data(double u) const {
    const TorusData& t = chart_.t();
    RowData r;
    r.a1 = chart_.alpha1_of_u(u);
    std::tie(r.rl, r.rr) = partition_of_unity(r.a1, opt_.delta, opt_.mid);
    r.F = chart_.correction(r.a1);
    r.f = t.model.f(u);
    r.pu = t.p_u(u);
    std::tie(r.FL, r.GL) = kernels(Side::Left, t.S_L(u));
    std::tie(r.FR, r.GR) = kernels(Side::Right, t.S_R(u));
    r.B = multipliers_at(r.a1, mode_.q, mode_.h);
    r.cp = A_.row_coeffs(r.a1);
    r.cm = A_.row_coeffs(-r.a1);
    return r;
}

std::pair<cplx, cplx> FieldEvaluator::sides(const RowData& r, const Column& c) const {
    const double h = mode_.h, q2 = mode_.q[1];
    const double a2p = c.a2base + r.F, a2m = c.a2base - r.F;
    const cplx Ap = std::polar(1.0, A_.phi_row(r.cp, a2p) + q2 * a2p / h);
    const cplx Am = std::polar(1.0, A_.phi_row(r.cm, a2m) + q2 * a2m / h);
    const cplx Lp = r.B[0] * Ap, Lm = r.B[1] * Am, Rp = r.B[2] * Ap, Rm = r.B[3] * Am;
    const cplx WL = 0.5 * (Lp + Lm) * r.FL - kI * 0.5 * (-Lp + Lm) * r.GL;
    const cplx WR = 0.5 * (Rp + Rm) * r.FR + kI * 0.5 * (-Rp + Rm) * r.GR;
    return {WL, right_phase_ * WR};
}

std::pair<cplx, cplx> FieldEvaluator::sides(double u, double v) const { return sides(row_data(u), column(v)); }

void FieldEvaluator::raw_row(double u, const std::vector<Column>& cols, cplx* out) const {
    const RowData r = row_data(u);
    const double pre = M_PI / (2.0 * mode_.h * r.pu);
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const Column& c = cols[j];
        const auto [L, R] = sides(r, c);
        const cplx glued = (r.rl > 0.0 ? r.rl * L : 0.0) + (r.rr > 0.0 ? r.rr * R : 0.0);
        out[j] = std::sqrt(pre * (r.f + c.g) / c.pv) * c.phase * glued;
    }
}

cplx FieldEvaluator::raw(double u, double v) const {
    cplx z;
    raw_row(u, {column(v)}, &z);
    return z;
}

void FieldEvaluator::row(double u, const std::vector<Column>& cols, cplx* out) const {
    const TorusData& t = chart_.t();
    const std::size_t n = cols.size();
    if (u < t.u0 || u > t.u1) {
        std::fill(out, out + n, cplx(0.0));
        return;
    }
    auto limit = [&](double edge, double dir) {
        std::vector<cplx> p1(n), p2(n);
        raw_row(edge + dir * band_, cols, p1.data());
        raw_row(edge + dir * 2.0 * band_, cols, p2.data());
        const double s = (std::abs(u - edge) - band_) / band_;
        for (std::size_t j = 0; j < n; ++j) out[j] = p1[j] + s * (p2[j] - p1[j]);
    };
    if (u - t.u0 < band_) return limit(t.u0, +1.0);
    if (t.u1 - u < band_) return limit(t.u1, -1.0);
    raw_row(u, cols, out);
    for (std::size_t j = 0; j < n; ++j)
        if (!std::isfinite(out[j].real()) || !std::isfinite(out[j].imag()))
            throw NumericalError("non-finite field value at u=" + std::to_string(u) + ", v=" + std::to_string(j));
}

cplx FieldEvaluator::operator()(double u, double v) const {
    cplx z;
    row(u, {column(v)}, &z);
    return z;
}

double WaveField::max_abs() const {
    double m = 0.0;
    for (const cplx& z : values) m = std::max(m, std::abs(z));
    return m;
}

double WaveField::l2_norm() const {
    const std::size_t nu = u.size(), nv = v.size();
    if (nu < 2 || nv < 1) return 0.0;
    const double du = (u.back() - u.front()) / double(nu - 1), dv = 2.0 * M_PI / double(nv);
    double acc = 0.0;
    for (std::size_t i = 0; i < nu; ++i) {
        const double w = (i == 0 || i + 1 == nu) ? 0.5 : 1.0;
        for (std::size_t j = 0; j < nv; ++j) acc += w * std::norm(values[i * nv + j]);
    }
    return std::sqrt(acc * du * dv);
}

WaveField evaluate_psi(const AngleChart& chart, const TransportSolution& A, const QuantizedMode& mode,
                       const FieldOptions& opt) {
    if (opt.nu < 2 || opt.nv < 1) throw ConfigError("field grid needs at least 2 x 1 points");
    const TorusData& t = chart.t();
    FieldEvaluator ev(chart, A, mode, opt);
    WaveField w;
    w.E = t.E;
    w.kappa = t.kappa;
    w.h = mode.h;
    w.lambda = A.lambda;
    w.nu = mode.nu;
    w.tag = t.model.tag;
    const double a = std::isnan(opt.u_min) ? t.u0 : opt.u_min, b = std::isnan(opt.u_max) ? t.u1 : opt.u_max;
    w.u.resize(opt.nu);
    for (int i = 0; i < opt.nu; ++i) w.u[i] = i + 1 == opt.nu ? b : a + (b - a) * i / (opt.nu - 1);
    w.v.resize(opt.nv);
    for (int j = 0; j < opt.nv; ++j) w.v[j] = 2.0 * M_PI * j / opt.nv;
    w.values.resize(std::size_t(opt.nu) * opt.nv);
    std::vector<FieldEvaluator::Column> cols(opt.nv);
    for (int j = 0; j < opt.nv; ++j) cols[j] = ev.column(w.v[j]);
    for (int i = 0; i < opt.nu; ++i) {
        if (w.u[i] < t.u0 || w.u[i] > t.u1) w.clipped += opt.nv;
        ev.row(w.u[i], cols, w.values.data() + std::size_t(i) * opt.nv);
    }
    return w;
}

double overlap_constant(const FieldEvaluator& ev, double h, int samples_u, int samples_v) {
    const AngleChart& c = ev.chart();
    const double lo = ev.options().mid - 0.5 * ev.options().delta, span = ev.options().delta;
    double diff = 0.0, wmax = 0.0;
    for (int i = 0; i < samples_u; ++i) {
        const double u = c.u_of_alpha1(lo + span * i / (samples_u - 1));
        for (int j = 0; j < samples_v; ++j) {
            const auto [L, R] = ev.sides(u, 2.0 * M_PI * j / samples_v);
            diff = std::max(diff, std::abs(L - R));
            wmax = std::max({wmax, std::abs(L), std::abs(R)});
        }
    }
    return diff / (h * wmax);
}

}  // namespace ctw
