#include "ctw/actions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ctw {

namespace {

struct UMap {
    double u0, u1;
    double u(double th) const {
        const double L = u1 - u0;
        if (th <= 0.5 * M_PI) {
            double s = std::sin(0.5 * th);
            return u0 + L * s * s;
        }
        double c = std::cos(0.5 * th);
        return u1 - L * c * c;
    }
    double theta(double u) const {
        const double L = u1 - u0;
        if (u <= u0) return 0.0;
        if (u >= u1) return M_PI;
        if (u - u0 <= u1 - u) return 2.0 * std::asin(std::sqrt((u - u0) / L));
        return M_PI - 2.0 * std::asin(std::sqrt((u1 - u) / L));
    }
};

// u-side integrands in theta: S, alpha, f2 alpha, f1 alpha.
void u_channels(const DepthModel& m, double E, double kappa, const UMap& map, double th, double* out) {
    // du/dtheta from the rounded u itself, so that the steep factor and the
    // Jacobian see the same distances to the ends
    const double u = map.u(th), j = std::sqrt(std::max(0.0, (u - map.u0) * (map.u1 - u)));
    const double f1 = m.F1(u), f2 = m.F2(u);
    const double R = std::max(E * f1 - kappa * f2, std::numeric_limits<double>::min());
    const double a = j / std::sqrt(R * f2);
    out[0] = std::sqrt(R / f2) * j;
    out[1] = a;
    out[2] = f2 * a;
    out[3] = f1 * a;
}

void v_channels(const DepthModel& m, double E, double kappa, double v, double* out) {
    const double g = m.G(v);
    const double q = E * g + kappa;
    if (!(q > 0.0)) throw NumericalError("E g(v) + kappa is not positive at v=" + std::to_string(v));
    const double p = std::sqrt(q);
    out[0] = p;
    out[1] = 1.0 / p;
    out[2] = g / p;
}

// Multi-channel composite Gauss-Legendre with panel doubling.  A channel is done
// once two refinements agree to tol; channels that hit the rounding floor first
// (integrands evaluated through a cancelling radicand next to a simple turning
// point) keep their best estimate if it is within 1e-10.
template <int K, class F>
std::array<double, K> integrate_channels(F&& fn, double a, double b, double tol, std::array<double, K>* err) {
    const GaussRule& r = gauss_legendre(64);
    auto run = [&](int panels) {
        std::array<double, K> s{};
        double w = (b - a) / panels;
        double buf[K];
        for (int p = 0; p < panels; ++p) {
            double c = a + (p + 0.5) * w, h = 0.5 * w;
            for (std::size_t i = 0; i < r.x.size(); ++i) {
                fn(c + h * r.x[i], buf);
                for (int k = 0; k < K; ++k) s[k] += r.w[i] * h * buf[k];
            }
        }
        return s;
    };
    std::array<double, K> prev = run(1), best{}, best_err;
    best_err.fill(std::numeric_limits<double>::infinity());
    std::array<bool, K> done{};
    for (int p = 2; p <= 4096; p *= 2) {
        std::array<double, K> cur = run(p);
        bool all = true;
        for (int k = 0; k < K; ++k) {
            if (done[k]) continue;
            double e = std::abs(cur[k] - prev[k]);
            if (e < best_err[k]) best_err[k] = e, best[k] = cur[k];
            if (e <= tol * std::max(1.0, std::abs(cur[k])))
                done[k] = true;
            else if (p >= 16 && best_err[k] <= 1e-10 * std::max(1.0, std::abs(best[k])) && e > 8.0 * best_err[k])
                done[k] = true;  // rounding floor reached
            else
                all = false;
        }
        if (all) break;
        prev = cur;
    }
    double worst = 0.0;
    for (int k = 0; k < K; ++k) {
        if (err) (*err)[k] = best_err[k];
        if (!done[k] && best_err[k] > 1e-10 * std::max(1.0, std::abs(best[k]))) worst = std::max(worst, best_err[k]);
    }
    if (worst > 0.0) {
        std::ostringstream os;
        os << "action quadrature did not converge: achieved error estimate " << worst;
        throw NumericalError(os.str());
    }
    return best;
}

struct Integrals {
    TurningPoints tp;
    std::array<double, 4> u{};
    std::array<double, 3> v{};
    std::array<double, 4> uerr{};
    std::array<double, 3> verr{};
};

Integrals compute_integrals(const DepthModel& m, double E, double kappa, double tol = 1e-14) {
    Integrals out;
    out.tp = find_turning_points(m, E, kappa);
    UMap map{out.tp.left.location, out.tp.right.location};
    out.u = integrate_channels<4>([&](double th, double* o) { u_channels(m, E, kappa, map, th, o); }, 0.0, M_PI, tol, &out.uerr);
    out.v = integrate_channels<3>([&](double v, double* o) { v_channels(m, E, kappa, v, o); }, 0.0, 2.0 * M_PI, tol, &out.verr);
    return out;
}

double refine_root(const DepthModel& m, double E, double kappa, double a, double b) {
    auto R = [&](double u) { return E * m.F1(u) - kappa * m.F2(u); };
    double fa = R(a), fb = R(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw NumericalError("turning point bracket without sign change");
    // bisection to a narrow bracket, then safeguarded secant
    for (int it = 0; it < 200 && b - a > 1e-6 * std::max(1.0, std::abs(a)); ++it) {
        double c = 0.5 * (a + b), fc = R(c);
        if (fc == 0.0) return c;
        if ((fc > 0) == (fa > 0))
            a = c, fa = fc;
        else
            b = c, fb = fc;
    }
    for (int it = 0; it < 100; ++it) {
        double c = b - fb * (b - a) / (fb - fa);
        if (!(c > a && c < b)) c = 0.5 * (a + b);
        double fc = R(c);
        if (fc == 0.0) return c;
        if ((fc > 0) == (fa > 0))
            a = c, fa = fc;
        else
            b = c, fb = fc;
        if (b - a <= 1e-13) break;
        // secant from one side can stall; force a bisection when progress is slow
        double mid = 0.5 * (a + b), fm = R(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (fa > 0))
            a = mid, fa = fm;
        else
            b = mid, fb = fm;
        if (b - a <= 1e-13) break;
    }
    return std::abs(fa) <= std::abs(fb) ? a : b;
}

double expand_to_negative(const DepthModel& m, double E, double kappa, double start, double dir) {
    double step = 1.0;
    for (int k = 0; k < 60; ++k, step *= 2.0) {
        double u = start + dir * step;
        if (E * m.F1(u) - kappa * m.F2(u) < 0.0) return u;
    }
    throw NumericalError("motion interval is unbounded towards " + std::string(dir < 0 ? "-inf" : "+inf"));
}

}  // namespace

TurningPoints find_turning_points(const DepthModel& m, double E, double kappa) {
    if (!(E > 0.0)) throw NumericalError("energy E must be positive");
    double a = m.u_left, b = m.u_right;
    if (!std::isfinite(a)) a = expand_to_negative(m, E, kappa, std::isfinite(b) ? b : 0.0, -1.0);
    if (!std::isfinite(b)) b = expand_to_negative(m, E, kappa, std::isfinite(m.u_left) ? m.u_left : 0.0, 1.0);
    const int n = 4096;
    auto R = [&](double u) { return E * m.F1(u) - kappa * m.F2(u); };
    std::vector<double> us(n);
    std::vector<char> pos(n);
    for (int j = 0; j < n; ++j) {
        us[j] = a + (b - a) * (j + 0.5) / n;
        pos[j] = R(us[j]) > 0.0;
    }
    int comps = 0, first = -1, last = -1;
    for (int j = 0; j < n; ++j) {
        if (pos[j] && (j == 0 || !pos[j - 1])) {
            ++comps;
            if (first < 0) first = j;
        }
        if (pos[j]) last = j;
    }
    if (comps == 0) throw NumericalError("radicand E f1 - kappa f2 is not positive anywhere in the cylinder");
    if (comps > 1) {
        std::ostringstream os;
        os << "multi-well radicand: E f1 - kappa f2 has " << comps << " positive components (E=" << E << ", kappa=" << kappa << ")";
        throw NumericalError(os.str());
    }
    TurningPoints tp;
    tp.left.side = Side::Left;
    tp.right.side = Side::Right;
    if (first == 0) {
        if (!m.shore_left()) {
            if (std::isfinite(m.u_left)) throw NumericalError("motion reaches the non-coastal boundary u_L without a turning point");
            throw NumericalError("no turning point found on the left");
        }
        tp.left.kind = CausticKind::Coastal;
        tp.left.location = m.u_left;
    } else {
        tp.left.kind = CausticKind::Simple;
        tp.left.location = refine_root(m, E, kappa, us[first - 1], us[first]);
    }
    if (last == n - 1) {
        if (!m.shore_right()) {
            if (std::isfinite(m.u_right)) throw NumericalError("motion reaches the non-coastal boundary u_R without a turning point");
            throw NumericalError("no turning point found on the right");
        }
        tp.right.kind = CausticKind::Coastal;
        tp.right.location = m.u_right;
    } else {
        tp.right.kind = CausticKind::Simple;
        tp.right.location = refine_root(m, E, kappa, us[last], us[last + 1]);
    }
    return tp;
}

Actions action_integrals(const DepthModel& m, double E, double kappa) {
    Integrals in = compute_integrals(m, E, kappa);
    Actions a;
    a.I1 = in.u[0] / M_PI;
    a.I2 = in.v[0] / (2.0 * M_PI);
    a.err1 = in.uerr[0] / M_PI;
    a.err2 = in.verr[0] / (2.0 * M_PI);
    return a;
}

ActionJacobian action_jacobian_exact(const DepthModel& m, double E, double kappa) {
    Integrals in = compute_integrals(m, E, kappa);
    ActionJacobian J;
    J.dI1_dE = in.u[3] / (2.0 * M_PI);
    J.dI1_dk = -in.u[2] / (2.0 * M_PI);
    J.dI2_dE = in.v[2] / (4.0 * M_PI);
    J.dI2_dk = in.v[1] / (4.0 * M_PI);
    return J;
}

ActionJacobian action_jacobian_fd(const DepthModel& m, double E, double kappa, double rel_step) {
    const double scale = std::max(std::abs(E), std::abs(kappa));
    auto diff = [&](double dE, double dk) {
        Actions p = action_integrals(m, E + dE, kappa + dk), q = action_integrals(m, E - dE, kappa - dk);
        double s = 2.0 * (dE + dk);
        return std::array<double, 2>{(p.I1 - q.I1) / s, (p.I2 - q.I2) / s};
    };
    const double hstep = rel_step * scale;
    auto rich = [&](bool wrtE) {
        auto d1 = wrtE ? diff(hstep, 0) : diff(0, hstep);
        auto d2 = wrtE ? diff(hstep / 2, 0) : diff(0, hstep / 2);
        return std::array<double, 2>{(4 * d2[0] - d1[0]) / 3, (4 * d2[1] - d1[1]) / 3};
    };
    auto dE = rich(true), dk = rich(false);
    ActionJacobian J;
    J.dI1_dE = dE[0];
    J.dI2_dE = dE[1];
    J.dI1_dk = dk[0];
    J.dI2_dk = dk[1];
    return J;
}

Frequencies frequencies(const DepthModel& m, double E, double kappa) {
    Frequencies fr;
    fr.jacobian = action_jacobian_fd(m, E, kappa);
    const ActionJacobian& J = fr.jacobian;
    const double norm = std::max({std::abs(J.dI1_dE), std::abs(J.dI1_dk), std::abs(J.dI2_dE), std::abs(J.dI2_dk)});
    const double det = J.det();
    if (!(std::abs(det) > 1e-12 * norm * norm)) throw NumericalError("singular action Jacobian: frequencies undefined");
    // first row of the inverse: dE/dI
    fr.canonical = {J.dI2_dk / det, -J.dI1_dk / det};
    Integrals in = compute_integrals(m, E, kappa);
    const double T1 = in.u[1], mean_f2 = in.u[2] / in.u[1], eta = in.v[1];
    fr.angular = {2.0 * M_PI / T1, 4.0 * M_PI * mean_f2 / eta};
    fr.time_scale = fr.canonical[0] * T1 / (2.0 * M_PI);
    return fr;
}

double TorusData::theta_of_u(double u) const { return UMap{u0, u1}.theta(u); }
double TorusData::u_of_theta(double th) const { return UMap{u0, u1}.u(th); }
double TorusData::radicand(double u) const { return E * model.F1(u) - kappa * model.F2(u); }
double TorusData::p_u(double u) const { return std::sqrt(std::max(0.0, radicand(u) / model.F2(u))); }
double TorusData::p_v(double v) const { return std::sqrt(E * model.G(v) + kappa); }

double TorusData::S_L(double u) const { return utab.from_left(0, theta_of_u(u)); }
double TorusData::S_R(double u) const { return utab.from_right(0, theta_of_u(u)); }

namespace {
inline void wrap_v(double v, double& base, double& k) {
    k = std::floor(v / (2.0 * M_PI));
    base = v - 2.0 * M_PI * k;
    if (base >= 2.0 * M_PI) base -= 2.0 * M_PI, k += 1.0;
    if (base < 0.0) base = 0.0;
}
}  // namespace

double TorusData::S2(double v) const {
    double b, k;
    wrap_v(v, b, k);
    return k * vtab.total(0) + vtab.from_left(0, b);
}

double TorusData::eta(double v) const {
    double b, k;
    wrap_v(v, b, k);
    return k * eta_total + vtab.from_left(1, b);
}

double TorusData::v_of_eta(double e) const {
    double k = std::floor(e / eta_total);
    double r = e - k * eta_total;
    return 2.0 * M_PI * k + vtab.inverse_left(1, r);
}

TorusData build_torus(const DepthModel& m, double E, double kappa, const TorusOptions& opt) {
    TorusData t;
    t.model = m;
    t.E = E;
    t.kappa = kappa;
    for (int j = 0; j < 2048; ++j) {
        double v = 2.0 * M_PI * j / 2048;
        if (!(E * m.G(v) + kappa > 0.0))
            throw NumericalError("E g(v) + kappa must be positive for all v (fails at v=" + std::to_string(v) + ")");
    }
    t.caustics = find_turning_points(m, E, kappa);
    t.u0 = t.caustics.left.location;
    t.u1 = t.caustics.right.location;
    UMap map{t.u0, t.u1};
    t.utab = CumulativeTable(0.0, M_PI, opt.u_panels, opt.order, 4, [&](double th, double* o) { u_channels(m, E, kappa, map, th, o); });
    t.vtab = CumulativeTable(0.0, 2.0 * M_PI, opt.v_panels, opt.order, 3, [&](double v, double* o) { v_channels(m, E, kappa, v, o); });
    t.I1 = t.utab.total(0) / M_PI;
    t.I2 = t.vtab.total(0) / (2.0 * M_PI);
    t.T1 = t.utab.total(1);
    t.mean_f2 = t.utab.total(2) / t.T1;
    t.eta_total = t.vtab.total(1);
    if (!(t.I1 > 0.0 && t.I2 > 0.0)) throw NumericalError("non-positive action");
    t.freq = frequencies(m, E, kappa);
    return t;
}

std::array<double, 2> action_defect(const TorusData& t, std::array<int, 2> nu, double h) {
    return {h * (nu[0] + 0.5) - t.I1, h * nu[1] - t.I2};
}

QuantizedMode make_mode(const TorusData& reference, std::array<int, 2> nu, double h) {
    QuantizedMode q;
    q.nu = nu;
    q.h = h;
    q.I_nu = {h * (nu[0] + 0.5), h * nu[1]};
    q.q = action_defect(reference, nu, h);
    return q;
}

std::array<double, 2> kappa_window(const DepthModel& m, double E) {
    double gmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 2048; ++j) gmin = std::min(gmin, m.G(2.0 * M_PI * j / 2048));
    double fmax = -std::numeric_limits<double>::infinity();
    double a = std::isfinite(m.u_left) ? m.u_left : -50.0, b = std::isfinite(m.u_right) ? m.u_right : 50.0;
    for (int j = 1; j < 4096; ++j) {
        double u = a + (b - a) * j / 4096;
        fmax = std::max(fmax, m.f(u));
    }
    return {-E * gmin, E * fmax};
}

QuantizationResult solve_quantization(const DepthModel& m, std::array<int, 2> nu, double E, const TorusData* reference) {
    if (nu[0] < 0 || nu[1] < 1) throw ConfigError("quantum numbers must satisfy nu1 >= 0, nu2 >= 1");
    const auto win = kappa_window(m, E);
    const double target = (nu[0] + 0.5) / nu[1];
    // Scan the admissible window (clustered at its lower edge) for a bracket of I1/I2 = target.
    struct Sample {
        double kappa, ratio;
        bool ok;
    };
    std::vector<Sample> scan;
    const int ns = 200;
    for (int j = 1; j < ns; ++j) {
        double s = static_cast<double>(j) / ns;
        double k = win[0] + (win[1] - win[0]) * s * s * s * s;
        Sample sm{k, 0.0, false};
        try {
            Actions a = action_integrals(m, E, k);
            sm.ratio = a.I1 / a.I2;
            sm.ok = true;
        } catch (const NumericalError&) {
        }
        scan.push_back(sm);
    }
    double k0 = std::numeric_limits<double>::quiet_NaN(), klo = win[0], khi = win[1];
    for (std::size_t j = 0; j + 1 < scan.size(); ++j) {
        if (scan[j].ok && scan[j + 1].ok && (scan[j].ratio - target) * (scan[j + 1].ratio - target) <= 0.0) {
            double w = (target - scan[j].ratio) / (scan[j + 1].ratio - scan[j].ratio);
            k0 = scan[j].kappa + w * (scan[j + 1].kappa - scan[j].kappa);
            klo = scan[j].kappa;
            khi = scan[j + 1].kappa;
            // widen to the valid neighbours so Newton has room
            if (j > 0 && scan[j - 1].ok) klo = scan[j - 1].kappa;
            if (j + 2 < scan.size() && scan[j + 2].ok) khi = scan[j + 2].kappa;
            break;
        }
    }
    if (!std::isfinite(k0)) throw NumericalError("quantization: no admissible kappa reproduces I1/I2 = (nu1+1/2)/nu2");

    double kappa = k0;
    double h = action_integrals(m, E, kappa).I2 / nu[1];
    QuantizationResult res;
    for (int it = 1; it <= 50; ++it) {
        Actions a = action_integrals(m, E, kappa);
        const double r1 = 2.0 * M_PI * (a.I1 - h * (nu[0] + 0.5));
        const double r2 = 2.0 * M_PI * (a.I2 - h * nu[1]);
        res.residual = std::max(std::abs(r1), std::abs(r2));
        res.iterations = it;
        if (res.residual <= 1e-12) {
            res.kappa = kappa;
            res.h = h;
            break;
        }
        ActionJacobian J = action_jacobian_exact(m, E, kappa);
        const double a11 = 2.0 * M_PI * J.dI1_dk, a12 = -2.0 * M_PI * (nu[0] + 0.5);
        const double a21 = 2.0 * M_PI * J.dI2_dk, a22 = -2.0 * M_PI * nu[1];
        const double det = a11 * a22 - a12 * a21;
        if (det == 0.0) throw NumericalError("quantization: singular Newton matrix");
        double dk = -(r1 * a22 - a12 * r2) / det;
        double dh = -(a11 * r2 - r1 * a21) / det;
        double step = 1.0;
        while (!(kappa + step * dk > klo && kappa + step * dk < khi) && step > 1e-6) step *= 0.5;
        if (!(kappa + step * dk > win[0])) throw NumericalError("quantization: kappa left the admissible window E g + kappa > 0");
        kappa += step * dk;
        h += step * dh;
        if (!(h > 0.0)) throw NumericalError("quantization: h became non-positive");
        if (it == 50) throw NumericalError("quantization: Newton did not converge in 50 iterations (residual " + std::to_string(res.residual) + ")");
    }
    if (reference) {
        res.mode = make_mode(*reference, nu, res.h);
    } else {
        res.mode.nu = nu;
        res.mode.h = res.h;
        res.mode.I_nu = {res.h * (nu[0] + 0.5), res.h * nu[1]};
        res.mode.q = {0.0, 0.0};
    }
    return res;
}

}  // namespace ctw
