// ctw: quantize a torus, build the leading-term eigenfunction and check its residual.
//
// exit status: 0 ok, 2 configuration error, 3 numerical failure, 4 failed --check

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "ctw/export.hpp"

using namespace ctw;

namespace {

constexpr int kConfigError = 2, kNumericalError = 3, kCheckFailed = 4;

struct Flags {
    std::string config, out, grid, ray, omega;
    bool no_plots = false, check = false;
    double window_band = NAN, divisor_floor = NAN;
    int fourier_order = 0, ray_count = 3;
};

std::array<int, 2> parse_ints(const std::string& s, const char* what, const char* seps) {
    std::array<int, 2> v{};
    char tail = 0;
    std::string fmt = std::string("%d") + seps + "%d%c";
    if (std::sscanf(s.c_str(), fmt.c_str(), &v[0], &v[1], &tail) != 2)
        throw ConfigError(std::string(what) + ": cannot parse '" + s + "'");
    return v;
}

RunConfig configure(const Flags& f) {
    if (f.config.empty()) throw ConfigError("--config is required");
    RunConfig cfg = load_config(f.config);
    if (!f.out.empty()) cfg.output.directory = f.out;
    if (!f.grid.empty()) {
        auto g = parse_ints(f.grid, "--grid", "x");
        if (g[0] < 16 || g[1] < 16) throw ConfigError("--grid must be at least 16x16");
        cfg.field.nu = g[0];
        cfg.field.nv = g[1];
    }
    if (f.no_plots) cfg.output.plots = false;
    if (!std::isnan(f.window_band)) {
        if (!(f.window_band > 0) || f.window_band >= M_PI / 2) throw ConfigError("--window-band must lie in (0, pi/2)");
        cfg.residual.band = f.window_band;
    }
    if (f.fourier_order > 0) cfg.transport.N = f.fourier_order;
    if (cfg.transport.grid < 2 * cfg.transport.N + 2) cfg.transport.grid = 2 * cfg.transport.N + 2;
    if (!std::isnan(f.divisor_floor)) cfg.transport.divisor_floor = f.divisor_floor;
    return cfg;
}

void print_quantize(const PipelineResult& r) {
    const TorusData& t = *r.torus;
    std::printf("case            %s\n", case_name(r.detected_case));
    std::printf("turning points  %.12g  %.12g\n", t.caustics.left.location, t.caustics.right.location);
    std::printf("E, kappa        %.15g  %.15g\n", t.E, t.kappa);
    std::printf("actions         %.12g  %.12g\n", t.I1, t.I2);
    std::printf("frequencies     %.8g  %.8g  (dE/dI: %.8g  %.8g)\n", t.freq.angular[0], t.freq.angular[1],
                r.chart->omega[0], r.chart->omega[1]);
    std::printf("nu              %d  %d\n", r.mode.nu[0], r.mode.nu[1]);
    std::printf("h, 1/h          %.15g  %.15g\n", r.mode.h, 1.0 / r.mode.h);
    std::printf("q/h             %.8g  %.8g\n", r.mode.q[0] / r.mode.h, r.mode.q[1] / r.mode.h);
}

void print_later(const PipelineResult& r) {
    if (r.transport)
        std::printf("lambda          %.10g  (N = %d, tail %.3g, transport residual %.3g)\n", r.transport->lambda,
                    r.transport->N, r.transport->residual_bound, r.transport_residual);
    if (r.field) {
        std::printf("field           %zu x %zu, max |psi| %.6g, overlap constant %.4g\n", r.field->u.size(),
                    r.field->v.size(), r.field->max_abs(), r.overlap);
        if (r.field->clipped > 0)
            std::fprintf(stderr, "warning: %d grid nodes lie outside the motion interval and were set to 0\n",
                         r.field->clipped);
    }
    if (r.residual) {
        const ResidualReport& q = *r.residual;
        std::printf("residual        %.6e relative on u in [%.6g, %.6g]%s  %s\n", q.relative_residual, q.window_u0,
                    q.window_u1, q.grid_limited ? " (grid-limited)" : "", q.pass ? "PASS" : "FAIL");
    }
}

int run_stage(const Flags& f, Stage stage, bool outputs) {
    RunConfig cfg = configure(f);
    ArtifactSet out(cfg.output.directory);
    PipelineResult r = run_pipeline(cfg, stage);
    print_quantize(r);
    print_later(r);
    if (outputs) write_outputs(r, out);
    else {
        std::ofstream(out.add("report.json")) << report_json(r);
        std::ofstream(out.add("timing.json")) << timing_json(r);
    }
    out.commit();
    if (f.check && r.residual && (!r.residual->pass || r.residual->grid_limited)) return kCheckFailed;
    return 0;
}

int run_resonances(const Flags& f) {
    std::array<double, 2> omega{};
    int N = f.fourier_order > 0 ? f.fourier_order : 16;
    if (!f.omega.empty()) {
        double a, b;
        char tail;
        if (std::sscanf(f.omega.c_str(), "%lf,%lf%c", &a, &b, &tail) != 2) throw ConfigError("--omega: cannot parse '" + f.omega + "'");
        omega = {a, b};
    } else {
        RunConfig cfg = configure(f);
        if (f.fourier_order <= 0) N = cfg.transport.N;
        omega = run_pipeline(cfg, Stage::Quantize).chart->omega;
    }
    const ResonanceReport rep = resonance_report(omega, N);
    std::printf("omega           %.10g  %.10g\n", omega[0], omega[1]);
    std::printf("%-12s %s\n", "k", "|<omega,k>|");
    for (const auto& d : rep.smallest) std::printf("(%3d,%3d)    %.6e\n", d.k[0], d.k[1], d.value);
    std::printf("C1 = %.6g  C2 = %.4g\n", rep.C1, rep.C2);
    if (rep.resonant) std::printf("RESONANT: a divisor vanishes to rounding\n");
    return f.check && rep.resonant ? kCheckFailed : 0;
}

int run_study(const Flags& f) {
    RunConfig cfg = configure(f);
    if (f.ray.empty()) throw ConfigError("study needs --ray a,b");
    const auto ray = parse_ints(f.ray, "--ray", ",");
    if (ray[0] < 0 || ray[1] < 0 || ray[0] + ray[1] == 0) throw ConfigError("--ray must be a non-negative, non-zero pair");
    StudyOptions opt;
    opt.count = f.ray_count;
    opt.E = cfg.E;
    opt.field = cfg.field;
    opt.residual = cfg.residual;
    opt.transport = cfg.transport;
    ArtifactSet out(cfg.output.directory);
    const StudyResult s = convergence_study(load_model(cfg.model), ray, opt);
    nlohmann::ordered_json j;
    j["ray"] = ray;
    j["members"] = nlohmann::ordered_json::array();
    for (const auto& m : s.members) {
        std::printf("nu = (%d,%d)  h = %.6g  lambda = %.6g  relative residual = %.6e%s\n", m.nu[0], m.nu[1], m.h,
                    m.lambda, m.report.relative_residual, m.excluded ? ("  excluded: " + m.note).c_str() : "");
        j["members"].push_back({{"nu", m.nu},
                                {"kappa", m.kappa},
                                {"h", m.h},
                                {"lambda", m.lambda},
                                {"relative_residual", m.report.relative_residual},
                                {"relative_residual_re", m.report.relative_re},
                                {"relative_residual_im", m.report.relative_im},
                                {"l2_norm", m.report.l2_norm},
                                {"excluded", m.excluded},
                                {"note", m.note}});
    }
    j["slope"] = s.slope;
    j["slope_re"] = s.slope_re;
    j["slope_im"] = s.slope_im;
    j["pass"] = s.pass;
    std::printf("slope = %.4f (re %.4f, im %.4f)  %s\n", s.slope, s.slope_re, s.slope_im, s.pass ? "PASS" : "FAIL");
    std::ofstream(out.add("study.json")) << j.dump(2) << '\n';
    out.commit();
    return f.check && !s.pass ? kCheckFailed : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asymptotic eigenfunctions of a degenerate depth operator on a cylinder"};
    app.require_subcommand(1);
    Flags f;
    auto common = [&f](CLI::App* s) {
        s->add_option("--config", f.config, "configuration file");
        s->add_option("--out", f.out, "output directory");
        s->add_option("--grid", f.grid, "field grid NxM");
        s->add_flag("--no-plots", f.no_plots, "skip PNG heatmaps");
        s->add_option("--window-band", f.window_band, "alpha1 band excluded from the residual window");
        s->add_option("--fourier-order", f.fourier_order, "transport truncation N");
        s->add_option("--divisor-floor", f.divisor_floor, "smallest admissible |<omega,k>|");
        s->add_flag("--check", f.check, "exit with status 4 when the stage's check fails");
    };
    auto* quantize = app.add_subcommand("quantize", "actions, frequencies and the quantized mode");
    auto* field = app.add_subcommand("field", "evaluate and export the leading-term field");
    auto* verify = app.add_subcommand("verify", "field plus its operator residual");
    auto* run = app.add_subcommand("run", "full pipeline with all exports");
    auto* study = app.add_subcommand("study", "convergence study along a ray of quantum numbers");
    auto* reson = app.add_subcommand("resonances", "small divisors of the frequency vector");
    for (auto* s : {quantize, field, verify, run, study, reson}) common(s);
    study->add_option("--ray", f.ray, "direction a,b");
    study->add_option("--ray-count", f.ray_count, "number of modes on the ray")->check(CLI::PositiveNumber);
    reson->add_option("--omega", f.omega, "frequency vector a,b (instead of a config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*quantize) return run_stage(f, Stage::Quantize, false);
        if (*field) return run_stage(f, Stage::Field, true);
        if (*verify) return run_stage(f, Stage::Verify, true);
        if (*run) return run_stage(f, Stage::Verify, true);
        if (*study) return run_study(f);
        if (*reson) return run_resonances(f);
    } catch (const ResonanceError& e) {
        std::fprintf(stderr, "numerical failure: %s (k = (%d,%d), divisor %.3e)\n", e.what(), e.k()[0], e.k()[1],
                     e.divisor());
        return kNumericalError;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfigError;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumericalError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kNumericalError;
    }
    return 0;
}
