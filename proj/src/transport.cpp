#include "ctw/transport.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ctw {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

std::string resonance_message(std::array<int, 2> k, double d) {
    std::ostringstream os;
    os.precision(6);
    os << "small divisor: |<omega,k>| = " << d << " at k = (" << k[0] << ", " << k[1] << ")";
    return os.str();
}

double dot(std::array<double, 2> w, int k1, int k2) { return w[0] * k1 + w[1] * k2; }

// f and f * H_sub on an n x n alpha-grid, row-major in alpha1.
struct Samples {
    std::vector<double> f, fh;
};

Samples sample(const AngleChart& chart, int n) {
    const TorusData& t = chart.t();
    Samples s;
    s.f.resize(std::size_t(n) * n);
    s.fh.resize(std::size_t(n) * n);
    for (int i = 0; i < n; ++i) {
        const ChartRow row = chart_row(chart, kTwoPi * i / n);
        for (int j = 0; j < n; ++j) {
            const double v = t.v_of_eta((kTwoPi * j / n - row.F) * t.eta_total / kTwoPi);
            const double f = measure_factor(chart, row, v);
            s.f[std::size_t(i) * n + j] = f;
            s.fh[std::size_t(i) * n + j] = f * h_sub_on_torus(chart, row, v);
        }
    }
    return s;
}

double compute_lambda(const Samples& s, std::array<double, 2> omega, std::array<double, 2> q, double h) {
    const double n2 = double(s.f.size());
    double sf = 0.0, sfh = 0.0;
    for (std::size_t i = 0; i < s.f.size(); ++i) {
        sf += s.f[i];
        sfh += s.fh[i];
    }
    // trapezoid weights (2 pi / n)^2 cancel except against the (2 pi)^2 defect term
    const double defect = (omega[0] * q[0] + omega[1] * q[1]) / h;
    return (sfh / n2 + defect) / (sf / n2);
}

}  // namespace

ResonanceError::ResonanceError(std::array<int, 2> k, double divisor)
    : NumericalError(resonance_message(k, divisor)), k_(k), divisor_(divisor) {}

double compute_lambda(const AngleChart& chart, std::array<double, 2> q, double h, int grid) {
    return compute_lambda(sample(chart, grid), chart.omega, q, h);
}

TransportSolution fourier_solve(std::array<double, 2> omega, const std::vector<double>& G, int n, double lambda,
                                const TransportOptions& opt) {
    const int N = opt.N;
    if (N < 1 || 2 * N >= n) throw ConfigError("fourier order must satisfy 1 <= N < grid / 2");
    if (G.size() != std::size_t(n) * n) throw NumericalError("transport samples do not match the grid");
    const auto& w = omega;

    TransportSolution sol;
    sol.lambda = lambda;
    sol.N = N;
    sol.grid = n;
    sol.omega = w;
    sol.min_divisor = std::numeric_limits<double>::infinity();
    std::array<int, 2> worst{};
    for (int k1 = -N; k1 <= N; ++k1)
        for (int k2 = -N; k2 <= N; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            const double d = std::abs(dot(w, k1, k2));
            // report k with k1 > 0 (or k1 = 0, k2 > 0) among the pair +-k
            if (k1 < 0 || (k1 == 0 && k2 < 0)) continue;
            if (d < sol.min_divisor) worst = {k1, k2};
            sol.min_divisor = std::min(sol.min_divisor, d);
        }
    if (sol.min_divisor < opt.divisor_floor) throw ResonanceError(worst, sol.min_divisor);

    fftw_complex* buf = fftw_alloc_complex(std::size_t(n) * n);
    fftw_plan plan = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    for (std::size_t i = 0; i < G.size(); ++i) {
        buf[i][0] = G[i];
        buf[i][1] = 0.0;
    }
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    const double scale = 1.0 / (double(n) * n);
    auto coeff = [&](int k1, int k2) {
        const std::size_t r = std::size_t((k1 + n) % n), c = std::size_t((k2 + n) % n);
        return cplx(buf[r * n + c][0], buf[r * n + c][1]) * scale;
    };
    const int M = 2 * N + 1;
    sol.G_coeffs.assign(std::size_t(M) * M, 0.0);
    sol.Phi_coeffs.assign(std::size_t(M) * M, 0.0);
    for (int k1 = -N; k1 <= N; ++k1)
        for (int k2 = -N; k2 <= N; ++k2) {
            const cplx g = coeff(k1, k2);
            sol.G_coeffs[std::size_t(k1 + N) * M + (k2 + N)] = g;
            if (k1 != 0 || k2 != 0) sol.Phi_coeffs[std::size_t(k1 + N) * M + (k2 + N)] = cplx(0.0, 1.0) * g / dot(w, k1, k2);
        }
    sol.G0 = std::abs(coeff(0, 0));
    // Force exact conjugate symmetry so that Phi is real to rounding.
    for (int k1 = -N; k1 <= N; ++k1)
        for (int k2 = -N; k2 <= N; ++k2) {
            const std::size_t a = std::size_t(k1 + N) * M + (k2 + N), b = std::size_t(-k1 + N) * M + (-k2 + N);
            if (a < b) {
                const cplx p = 0.5 * (sol.Phi_coeffs[a] + std::conj(sol.Phi_coeffs[b]));
                sol.Phi_coeffs[a] = p;
                sol.Phi_coeffs[b] = std::conj(p);
            }
        }
    const int kmax = n / 2 - 1;
    for (int k1 = -kmax; k1 <= kmax; ++k1)
        for (int k2 = -kmax; k2 <= kmax; ++k2) {
            if (std::max(std::abs(k1), std::abs(k2)) <= N) continue;
            const double g = std::abs(coeff(k1, k2));
            sol.residual_bound += g;
            const double d = std::abs(dot(w, k1, k2));
            sol.phi_tail += d > 0.0 ? g / d : (g > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        }
    fftw_free(buf);
    return sol;
}

TransportSolution solve_transport(const AngleChart& chart, std::array<double, 2> q, double h, double lambda,
                                  const TransportOptions& opt) {
    const Samples s = sample(chart, opt.grid);
    const double defect = (chart.omega[0] * q[0] + chart.omega[1] * q[1]) / h;
    std::vector<double> G(s.f.size());
    for (std::size_t i = 0; i < G.size(); ++i) G[i] = s.fh[i] - lambda * s.f[i] + defect;
    return fourier_solve(chart.omega, G, opt.grid, lambda, opt);
}

namespace {

template <class Weight>
double series(const TransportSolution& s, double a1, double a2, Weight weight) {
    const int N = s.N;
    std::vector<cplx> e1(2 * N + 1), e2(2 * N + 1);
    const cplx z1 = std::polar(1.0, a1), z2 = std::polar(1.0, a2);
    e1[N] = e2[N] = 1.0;
    for (int k = 1; k <= N; ++k) {
        e1[N + k] = e1[N + k - 1] * z1;
        e2[N + k] = e2[N + k - 1] * z2;
        e1[N - k] = std::conj(e1[N + k]);
        e2[N - k] = std::conj(e2[N + k]);
    }
    double acc = 0.0;
    for (int k1 = -N; k1 <= N; ++k1) {
        cplx row = 0.0;
        for (int k2 = -N; k2 <= N; ++k2) row += weight(k1, k2) * s.Phi(k1, k2) * e2[N + k2];
        acc += (row * e1[N + k1]).real();
    }
    return acc;
}

}  // namespace

double TransportSolution::phi(double a1, double a2) const {
    if (Phi_coeffs.empty()) return 0.0;
    return series(*this, a1, a2, [](int, int) { return cplx(1.0); });
}

double TransportSolution::phi_flow_derivative(double a1, double a2) const {
    if (Phi_coeffs.empty()) return 0.0;
    return series(*this, a1, a2, [this](int k1, int k2) { return cplx(0.0, dot(omega, k1, k2)); });
}

std::vector<cplx> TransportSolution::row_coeffs(double a1) const {
    std::vector<cplx> c(2 * N + 1, 0.0);
    if (Phi_coeffs.empty()) return c;
    for (int k1 = -N; k1 <= N; ++k1) {
        const cplx e = std::polar(1.0, k1 * a1);
        for (int k2 = -N; k2 <= N; ++k2) c[k2 + N] += Phi(k1, k2) * e;
    }
    return c;
}

double TransportSolution::phi_row(const std::vector<cplx>& c, double a2) const {
    if (Phi_coeffs.empty()) return 0.0;
    const cplx z = std::polar(1.0, a2);
    cplx e = 1.0, acc = c[N];
    for (int k = 1; k <= N; ++k) {
        e *= z;
        acc += c[N + k] * e + c[N - k] * std::conj(e);
    }
    return acc.real();
}

bool TransportSolution::trivial() const {
    return std::all_of(Phi_coeffs.begin(), Phi_coeffs.end(), [](cplx c) { return c == 0.0; });
}

double transport_residual(const AngleChart& chart, const TransportSolution& sol, std::array<double, 2> q, double h,
                          int n) {
    const TorusData& t = chart.t();
    const double defect = (sol.omega[0] * q[0] + sol.omega[1] * q[1]) / h;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a1 = kTwoPi * i / n;
        const ChartRow row = chart_row(chart, a1);
        for (int j = 0; j < n; ++j) {
            const double a2 = kTwoPi * j / n;
            const double v = t.v_of_eta((a2 - row.F) * t.eta_total / kTwoPi);
            const double G = measure_factor(chart, row, v) * (h_sub_on_torus(chart, row, v) - sol.lambda) + defect;
            const cplx A = sol.amplitude(a1, a2);
            const cplx dA = cplx(0.0, sol.phi_flow_derivative(a1, a2)) * A;
            worst = std::max(worst, std::abs(dA + cplx(0.0, G) * A));
        }
    }
    return worst;
}

ResonanceReport resonance_report(std::array<double, 2> omega, int N, int count) {
    if (!std::isfinite(omega[0]) || !std::isfinite(omega[1]) || (omega[0] == 0.0 && omega[1] == 0.0))
        throw NumericalError("resonance report needs a finite nonzero frequency vector");
    ResonanceReport rep;
    std::vector<Divisor> all;
    std::vector<double> by_norm(2 * N + 1, std::numeric_limits<double>::infinity());
    const double scale = std::abs(omega[0]) + std::abs(omega[1]);
    for (int k1 = 0; k1 <= N; ++k1)
        for (int k2 = -N; k2 <= N; ++k2) {
            if (k1 == 0 && k2 <= 0) continue;
            const double d = std::abs(dot(omega, k1, k2));
            all.push_back({{k1, k2}, d});
            const int n1 = k1 + std::abs(k2);
            by_norm[n1] = std::min(by_norm[n1], d);
            if (d <= 1e-12 * scale * std::max(k1, std::abs(k2))) rep.resonant = true;
        }
    std::stable_sort(all.begin(), all.end(), [](const Divisor& a, const Divisor& b) { return a.value < b.value; });
    all.resize(std::min<std::size_t>(all.size(), std::size_t(count)));
    rep.smallest = all;
    if (rep.resonant) return rep;

    // least squares through the running-minimum records of log d against log |k|_1
    std::vector<std::pair<double, double>> rec;
    double best = std::numeric_limits<double>::infinity();
    for (int n1 = 1; n1 <= 2 * N; ++n1)
        if (by_norm[n1] < best) {
            best = by_norm[n1];
            rec.emplace_back(std::log(double(n1)), std::log(best));
        }
    if (rec.size() >= 2) {
        double mx = 0, my = 0;
        for (auto [x, y] : rec) mx += x, my += y;
        mx /= rec.size();
        my /= rec.size();
        double sxx = 0, sxy = 0;
        for (auto [x, y] : rec) sxx += (x - mx) * (x - mx), sxy += (x - mx) * (y - my);
        rep.C2 = std::max(0.0, -sxy / sxx);
    }
    rep.C1 = std::numeric_limits<double>::infinity();
    for (int n1 = 1; n1 <= 2 * N; ++n1)
        if (std::isfinite(by_norm[n1])) rep.C1 = std::min(rep.C1, by_norm[n1] * std::pow(double(n1), rep.C2));
    return rep;
}

}  // namespace ctw
