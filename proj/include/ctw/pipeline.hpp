#pragma once

// load -> quantize -> chart -> transport -> field -> verify, stopping at a named stage.

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "ctw/config.hpp"

namespace ctw {

enum class Stage { Quantize = 0, Transport = 1, Field = 2, Verify = 3 };

struct PipelineResult {
    RunConfig config;
    Stage last = Stage::Quantize;

    CaseTag detected_case = CaseTag::A;
    std::shared_ptr<const TorusData> torus;  // torus the chart is built on
    std::optional<QuantizationResult> quantization;
    QuantizedMode mode;
    std::unique_ptr<AngleChart> chart;

    std::optional<TransportSolution> transport;
    double transport_residual = 0.0;
    ResonanceReport resonances;

    std::optional<WaveField> field;
    double overlap = 0.0;

    std::optional<ResidualReport> residual;

    // wall-clock seconds per stage; kept out of the deterministic report
    std::map<std::string, double> timing;

    double kappa() const { return torus->kappa; }
    double h() const { return mode.h; }
};

PipelineResult run_pipeline(const RunConfig& cfg, Stage last);

const char* stage_name(Stage s);

}  // namespace ctw
