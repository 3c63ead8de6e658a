#include "ctw/verify.hpp"

#include <cmath>
#include <sstream>

namespace ctw {

namespace {
// sixth-order staggered first derivative: sum c_m (x_{+m-1/2} - x_{-m+1/2}) / delta
constexpr double kC1 = 75.0 / 64.0, kC2 = -25.0 / 384.0, kC3 = 3.0 / 640.0;

void check_uniform(const std::vector<double>& u) {
    if (u.size() < 11) throw NumericalError("grid too small for the sixth-order stencil");
    const double du = (u.back() - u.front()) / double(u.size() - 1);
    for (std::size_t i = 1; i < u.size(); ++i)
        if (std::abs(u[i] - u[i - 1] - du) > 1e-9 * std::abs(du)) throw NumericalError("non-uniform u grid");
}
}  // namespace

Coefficient operator_coefficient(const DepthModel& m, double h, double mu) {
    if (mu == 0.0) return [&m](double u, double v) { return depth(m, u, v); };
    return [&m, h, mu](double u, double v) { return depth(m, u, v) + mu * h * m.D1(u, v); };
}

std::vector<cplx> apply_operator(const Coefficient& D, const std::vector<double>& u, std::size_t nv,
                                 const std::vector<cplx>& psi, double h, std::size_t i_lo, std::size_t i_hi) {
    check_uniform(u);
    const std::size_t nu = u.size();
    if (psi.size() != nu * nv) throw NumericalError("field size does not match the grid");
    if (nv < 6) throw NumericalError("v grid too small for the sixth-order stencil");
    if (i_lo < 5 || i_hi + 5 >= nu || i_lo > i_hi) throw NumericalError("window too close to the grid edge or caustics");
    const double du = (u.back() - u.front()) / double(nu - 1), dv = 2.0 * M_PI / double(nv);
    auto P = [&](std::size_t i, std::size_t j) { return psi[i * nv + j]; };
    auto wrap = [nv](long j) { return std::size_t((j % long(nv) + long(nv)) % long(nv)); };

    // u-fluxes at i + 1/2 for i = i_lo - 3 .. i_hi + 2
    const std::size_t nf = i_hi - i_lo + 6;
    std::vector<cplx> Fu(nf * nv);
    for (std::size_t r = 0; r < nf; ++r) {
        const std::size_t i = i_lo - 3 + r;
        const double um = u[i] + 0.5 * du;
        for (std::size_t j = 0; j < nv; ++j) {
            const cplx g = kC1 * (P(i + 1, j) - P(i, j)) + kC2 * (P(i + 2, j) - P(i - 1, j)) + kC3 * (P(i + 3, j) - P(i - 2, j));
            Fu[r * nv + j] = D(um, (double(j)) * dv) * g / du;
        }
    }
    const std::size_t rows = i_hi - i_lo + 1;
    std::vector<cplx> out(rows * nv);
    std::vector<cplx> Fv(nv);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t i = i_lo + r;
        // v-fluxes at j + 1/2
        for (std::size_t j = 0; j < nv; ++j) {
            const long J = long(j);
            const cplx g = kC1 * (P(i, wrap(J + 1)) - P(i, j)) + kC2 * (P(i, wrap(J + 2)) - P(i, wrap(J - 1))) +
                           kC3 * (P(i, wrap(J + 3)) - P(i, wrap(J - 2)));
            Fv[j] = D(u[i], (double(j) + 0.5) * dv) * g / dv;
        }
        const std::size_t c = r + 3;  // flux row of i + 1/2
        for (std::size_t j = 0; j < nv; ++j) {
            const long J = long(j);
            auto fu = [&](std::size_t row) { return Fu[row * nv + j]; };
            const cplx divu = (kC1 * (fu(c) - fu(c - 1)) + kC2 * (fu(c + 1) - fu(c - 2)) + kC3 * (fu(c + 2) - fu(c - 3))) / du;
            const cplx divv = (kC1 * (Fv[j] - Fv[wrap(J - 1)]) + kC2 * (Fv[wrap(J + 1)] - Fv[wrap(J - 2)]) +
                               kC3 * (Fv[wrap(J + 2)] - Fv[wrap(J - 3)])) / dv;
            out[r * nv + j] = -h * h * (divu + divv);
        }
    }
    return out;
}

std::vector<cplx> apply_operator(const DepthModel& m, const WaveField& field, double h, double mu, std::size_t i_lo,
                                 std::size_t i_hi) {
    return apply_operator(operator_coefficient(m, h, mu), field.u, field.v.size(), field.values, h, i_lo, i_hi);
}

std::array<double, 2> interior_window(const AngleChart& chart, double band) {
    if (!(band > 0.0) || band >= 0.5 * M_PI) throw ConfigError("window band must lie in (0, pi/2)");
    return {chart.u_of_alpha1(band), chart.u_of_alpha1(M_PI - band)};
}

ResidualReport residual(const DepthModel& m, const WaveField& field, double energy, double mu, double window_u0,
                        double window_u1, const ResidualOptions& opt) {
    const std::vector<double>& u = field.u;
    check_uniform(u);
    const std::size_t nu = u.size(), nv = field.v.size();
    const double du = (u.back() - u.front()) / double(nu - 1);
    // the alpha1 bands set the window; it is then clamped to keep the stencil
    // 5 rows inside the grid (at least 4 cells from a caustic on the grid edge)
    double lo = std::ceil((window_u0 - u.front()) / du - 1e-9), hi = std::floor((window_u1 - u.front()) / du + 1e-9);
    lo = std::max(lo, 5.0);
    hi = std::min(hi, double(nu) - 6);
    if (lo > hi) {
        std::ostringstream os;
        os << "window too close to caustics: no row of the " << nu << "-row grid keeps a 5-row stencil margin";
        throw NumericalError(os.str());
    }
    const std::size_t i_lo = std::size_t(lo), i_hi = std::size_t(hi);
    const std::vector<cplx> Hpsi = apply_operator(m, field, field.h, mu, i_lo, i_hi);

    double res = 0, nrm = 0, res_re = 0, nrm_re = 0, res_im = 0, nrm_im = 0;
    for (std::size_t i = i_lo; i <= i_hi; ++i) {
        const double w = (i == i_lo || i == i_hi) ? 0.5 : 1.0;
        for (std::size_t j = 0; j < nv; ++j) {
            const cplx p = field.at(i, j);
            const cplx r = Hpsi[(i - i_lo) * nv + j] - energy * p;
            res += w * std::norm(r);
            nrm += w * std::norm(p);
            res_re += w * r.real() * r.real();
            nrm_re += w * p.real() * p.real();
            res_im += w * r.imag() * r.imag();
            nrm_im += w * p.imag() * p.imag();
        }
    }
    const double cell = du * 2.0 * M_PI / double(nv);
    ResidualReport rep;
    rep.l2_residual = std::sqrt(res * cell);
    rep.l2_norm = std::sqrt(nrm * cell);
    rep.relative_residual = rep.l2_residual / rep.l2_norm;
    rep.relative_re = std::sqrt(res_re / nrm_re);
    rep.relative_im = std::sqrt(res_im / nrm_im);
    rep.window_u0 = u[i_lo];
    rep.window_u1 = u[i_hi];
    rep.h = field.h;
    rep.energy = energy;
    rep.pass = rep.relative_residual <= opt.pass_threshold;
    return rep;
}

ResidualReport residual(const AngleChart& chart, const TransportSolution& A, const QuantizedMode& mode,
                        const WaveField& w, const FieldOptions& field_opt, const ResidualOptions& opt) {
    const TorusData& t = chart.t();
    const double energy = t.E + (opt.zero_lambda ? 0.0 : mode.h * A.lambda);
    const auto win = interior_window(chart, opt.band);
    ResidualReport rep = residual(t.model, w, energy, t.model.mu, win[0], win[1], opt);
    if (opt.check_grid) {
        FieldOptions fine = field_opt;
        fine.nu = 2 * field_opt.nu - 1;
        fine.nv = 2 * field_opt.nv;
        const WaveField wf = evaluate_psi(chart, A, mode, fine);
        // same u-range as the coarse run so the clamp does not move the window
        const ResidualReport r2 = residual(t.model, wf, energy, t.model.mu, rep.window_u0, rep.window_u1, opt);
        rep.refined_l2_residual = r2.l2_residual;
        rep.grid_limited = std::abs(r2.l2_residual - rep.l2_residual) > opt.grid_tolerance * rep.l2_residual;
    }
    return rep;
}

ResidualReport residual(const AngleChart& chart, const TransportSolution& A, const QuantizedMode& mode,
                        const FieldOptions& field_opt, const ResidualOptions& opt) {
    return residual(chart, A, mode, evaluate_psi(chart, A, mode, field_opt), field_opt, opt);
}

double fit_slope(const std::vector<double>& h, const std::vector<double>& r) {
    if (h.size() != r.size() || h.size() < 2) throw NumericalError("insufficient points for a slope fit");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        mx += std::log(h[i]);
        my += std::log(r[i]);
    }
    mx /= double(h.size());
    my /= double(h.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double x = std::log(h[i]) - mx;
        sxx += x * x;
        sxy += x * (std::log(r[i]) - my);
    }
    if (sxx == 0.0) throw NumericalError("insufficient points: all runs share one h");
    return sxy / sxx;
}

StudyResult convergence_study(const DepthModel& m, std::array<int, 2> direction, const StudyOptions& opt) {
    if (opt.count < 3)
        throw ConfigError("insufficient points: a convergence study needs at least 3 modes, got " + std::to_string(opt.count));
    StudyResult out;
    std::vector<double> hs, rs, rre, rim;
    for (int k = 1; k <= opt.count; ++k) {
        StudyMember mem;
        mem.nu = {k * direction[0], k * direction[1]};
        const QuantizationResult qr = solve_quantization(m, mem.nu, opt.E);
        mem.kappa = qr.kappa;
        mem.h = qr.h;
        const AngleChart chart = build_chart(build_torus(m, opt.E, qr.kappa));
        mem.lambda = compute_lambda(chart, qr.mode.q, qr.h);
        const TransportSolution A = solve_transport(chart, qr.mode.q, qr.h, mem.lambda, opt.transport);
        mem.report = residual(chart, A, qr.mode, opt.field, opt.residual);
        if (mem.report.grid_limited) {
            mem.excluded = true;
            mem.note = "grid-limited: halving the spacing changed the residual by more than " +
                       std::to_string(int(opt.residual.grid_tolerance * 100)) + "%";
        } else {
            hs.push_back(mem.h);
            rs.push_back(mem.report.relative_residual);
            rre.push_back(mem.report.relative_re);
            rim.push_back(mem.report.relative_im);
        }
        out.members.push_back(mem);
    }
    if (hs.size() < 2) throw NumericalError("insufficient points: fewer than 2 grid-independent runs on the ray");
    out.slope = fit_slope(hs, rs);
    out.slope_re = fit_slope(hs, rre);
    out.slope_im = fit_slope(hs, rim);
    out.pass = out.slope >= 1.7;
    return out;
}

}  // namespace ctw
