#include "ctw/pipeline.hpp"

#include <chrono>

namespace ctw {

namespace {
class Stopwatch {
public:
    explicit Stopwatch(double& slot) : slot_(slot), t0_(std::chrono::steady_clock::now()) {}
    ~Stopwatch() { slot_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
    double& slot_;
    std::chrono::steady_clock::time_point t0_;
};
}  // namespace

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::Quantize: return "quantize";
        case Stage::Transport: return "transport";
        case Stage::Field: return "field";
        case Stage::Verify: return "verify";
    }
    return "?";
}

PipelineResult run_pipeline(const RunConfig& cfg, Stage last) {
    PipelineResult r;
    r.config = cfg;
    r.last = last;

    {
        Stopwatch sw(r.timing["quantize"]);
        const DepthModel m = load_model(cfg.model);
        r.detected_case = classify_case(m);
        if (cfg.kappa) {
            auto ref = std::make_shared<const TorusData>(build_torus(m, cfg.E, *cfg.kappa));
            if (cfg.h) {
                r.mode = make_mode(*ref, cfg.nu, *cfg.h);
            } else {
                r.quantization = solve_quantization(m, cfg.nu, cfg.E, ref.get());
                r.mode = r.quantization->mode;
            }
            r.torus = ref;
        } else {
            r.quantization = solve_quantization(m, cfg.nu, cfg.E);
            r.mode = r.quantization->mode;
            r.torus = std::make_shared<const TorusData>(build_torus(m, cfg.E, r.quantization->kappa));
        }
        r.chart = std::make_unique<AngleChart>(build_chart(r.torus));
    }
    if (last == Stage::Quantize) return r;

    {
        Stopwatch sw(r.timing["transport"]);
        const double lambda = compute_lambda(*r.chart, r.mode.q, r.mode.h);
        r.resonances = resonance_report(r.chart->omega, cfg.transport.N);
        r.transport = solve_transport(*r.chart, r.mode.q, r.mode.h, lambda, cfg.transport);
        r.transport_residual = transport_residual(*r.chart, *r.transport, r.mode.q, r.mode.h);
    }
    if (last == Stage::Transport) return r;

    {
        Stopwatch sw(r.timing["field"]);
        r.field = evaluate_psi(*r.chart, *r.transport, r.mode, cfg.field);
        const FieldEvaluator ev(*r.chart, *r.transport, r.mode, cfg.field);
        r.overlap = overlap_constant(ev, r.mode.h);
    }
    if (last == Stage::Field) return r;

    {
        Stopwatch sw(r.timing["verify"]);
        r.residual = residual(*r.chart, *r.transport, r.mode, *r.field, cfg.field, cfg.residual);
    }
    return r;
}

}  // namespace ctw
