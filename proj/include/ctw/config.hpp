#pragma once

// Run configuration: a sectioned key = value file.
//
//   [model]     u_left u_right f1 f2 g d1 mu case
//   [torus]     E kappa                      kappa = from-nu, or a number
//   [mode]      nu h reference               h = from-quantization, or a number
//   [transport] N grid divisor_floor
//   [field]     nu nv delta caustic_band window_band u_min u_max
//   [output]    directory formats plots physical
//
// Numbers may be constant expressions ("1/14.3", "pi/8").  String values may be
// wrapped in double quotes.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ctw/verify.hpp"

namespace ctw {

// Which torus the action defect q is measured against.
enum class ReferencePolicy {
    Configured,  // the torus at the configured kappa
    Quantized,   // the quantized torus itself, q = 0
};

struct OutputOptions {
    std::string directory = "out";
    bool csv = true, binary = true;
    bool plots = true;
    bool physical = true;  // extra heatmap in x = e^u (cos v, sin v)
};

struct RunConfig {
    ModelSpec model;
    double E = 1.0;
    std::optional<double> kappa;  // empty: from the quantization conditions
    std::array<int, 2> nu{};
    std::optional<double> h;      // empty: from the quantization conditions
    ReferencePolicy reference = ReferencePolicy::Quantized;
    TransportOptions transport;
    FieldOptions field;
    ResidualOptions residual;
    OutputOptions output;
    std::string source;  // path it was read from
};

RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");
RunConfig load_config(const std::string& path);

// Constant expression or "inf" / "-inf".
double parse_number(const std::string& text, const std::string& key);

}  // namespace ctw
