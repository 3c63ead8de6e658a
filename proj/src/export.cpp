#include "ctw/export.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <memory>

namespace ctw {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

ArtifactSet::ArtifactSet(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    if (!fs::exists(dir_)) {
        if (!fs::create_directories(dir_, ec) || ec) throw ConfigError("cannot create output directory '" + dir_.string() + "'");
        created_dir_ = true;
    } else if (!fs::is_directory(dir_)) {
        throw ConfigError("output path '" + dir_.string() + "' is not a directory");
    }
}

ArtifactSet::~ArtifactSet() {
    if (!committed_) discard();
}

fs::path ArtifactSet::add(const std::string& name) {
    files_.push_back(dir_ / name);
    return files_.back();
}

void ArtifactSet::discard() {
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    files_.clear();
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
    committed_ = true;
}

namespace {

std::ofstream open_out(const fs::path& p, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(p, mode);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    return f;
}

void put_le(std::ostream& os, double x) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    os.write(reinterpret_cast<const char*>(&bits), 8);
}

json field_shape(const WaveField& w) {
    return {{"nu", w.u.size()},
            {"nv", w.v.size()},
            {"u_first", w.u.front()},
            {"u_last", w.u.back()},
            {"v_first", 0.0},
            {"v_step", 2 * M_PI / double(w.v.size())}};
}

double max_abs_re(const WaveField& w) {
    double m = 0;
    for (const auto& z : w.values) m = std::max(m, std::abs(z.real()));
    return m > 0 ? m : 1.0;
}

void write_png(const fs::path& path, int width, int height, const std::vector<unsigned char>& rgb) {
    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp) throw ConfigError("cannot write '" + path.string() + "'");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, nullptr);
        throw NumericalError("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw NumericalError("libpng failed writing '" + path.string() + "'");
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y) png_write_row(png, rgb.data() + std::size_t(y) * std::size_t(width) * 3);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// bilinear in u, periodic in v
double sample_re(const WaveField& w, double u, double v) {
    const std::size_t nu = w.u.size(), nv = w.v.size();
    const double du = (w.u.back() - w.u.front()) / double(nu - 1), dv = 2 * M_PI / double(nv);
    double x = (u - w.u.front()) / du, y = std::fmod(v, 2 * M_PI) / dv;
    if (y < 0) y += double(nv);
    std::size_t i = std::min(std::size_t(std::max(0.0, std::floor(x))), nu - 2);
    std::size_t j = std::size_t(std::floor(y)) % nv, j1 = (j + 1) % nv;
    const double s = x - double(i), t = y - std::floor(y);
    return (1 - s) * ((1 - t) * w.at(i, j).real() + t * w.at(i, j1).real()) +
           s * ((1 - t) * w.at(i + 1, j).real() + t * w.at(i + 1, j1).real());
}

const char* kind_name(CausticKind k) { return k == CausticKind::Simple ? "simple" : "coastal"; }

json caustic_json(const CausticDescriptor& c) { return {{"location", c.location}, {"kind", kind_name(c.kind)}}; }

json residual_json(const ResidualReport& r) {
    json j = {{"l2_residual", r.l2_residual},
              {"l2_norm", r.l2_norm},
              {"relative_residual", r.relative_residual},
              {"relative_residual_re", r.relative_re},
              {"relative_residual_im", r.relative_im},
              {"interior_window", {r.window_u0, r.window_u1}},
              {"fd_order", r.fd_order},
              {"h", r.h},
              {"energy", r.energy},
              {"grid_limited", r.grid_limited},
              {"pass", r.pass}};
    if (r.refined_l2_residual >= 0) j["refined_l2_residual"] = r.refined_l2_residual;
    return j;
}

}  // namespace

std::array<unsigned char, 3> diverging_color(double t) {
    t = std::clamp(t, -1.0, 1.0);
    static constexpr double neg[3] = {33, 102, 172}, pos[3] = {178, 24, 43}, mid[3] = {247, 247, 247};
    const double* end = t < 0 ? neg : pos;
    const double a = std::abs(t);
    std::array<unsigned char, 3> c{};
    for (int k = 0; k < 3; ++k) c[k] = static_cast<unsigned char>(std::lround(mid[k] + a * (end[k] - mid[k])));
    return c;
}

void write_field_csv(const fs::path& path, const WaveField& w) {
    auto f = open_out(path);
    f << "u,v,re_psi,im_psi\n" << std::setprecision(17);
    for (std::size_t i = 0; i < w.u.size(); ++i)
        for (std::size_t j = 0; j < w.v.size(); ++j) {
            const cplx z = w.at(i, j);
            f << w.u[i] << ',' << w.v[j] << ',' << z.real() << ',' << z.imag() << '\n';
        }
    if (!f) throw ConfigError("failed writing '" + path.string() + "'");
}

void write_field_binary(const fs::path& bin, const fs::path& sidecar, const WaveField& w) {
    {
        auto f = open_out(bin, std::ios::out | std::ios::binary);
        for (const auto& z : w.values) {
            put_le(f, z.real());
            put_le(f, z.imag());
        }
        if (!f) throw ConfigError("failed writing '" + bin.string() + "'");
    }
    json j = {{"file", bin.filename().string()},
              {"dtype", "float64"},
              {"byte_order", "little"},
              {"layout", "u-major, v fastest; each node is (re, im)"},
              {"grid", field_shape(w)},
              {"u_uniform", true},
              {"E", w.E},
              {"kappa", w.kappa},
              {"h", w.h},
              {"lambda", w.lambda},
              {"nu", w.nu}};
    auto f = open_out(sidecar);
    f << j.dump(2) << '\n';
}

void write_heatmap_cylinder(const fs::path& path, const WaveField& w, int max_px) {
    const int width = int(std::min<std::size_t>(w.u.size(), std::size_t(max_px)));
    const int height = int(std::min<std::size_t>(w.v.size(), std::size_t(max_px)));
    const double scale = max_abs_re(w);
    std::vector<unsigned char> rgb(std::size_t(width) * std::size_t(height) * 3);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const std::size_t i = std::size_t(x) * (w.u.size() - 1) / std::size_t(std::max(1, width - 1));
            const std::size_t j = std::size_t(height - 1 - y) * w.v.size() / std::size_t(height);
            const auto c = diverging_color(w.at(i, j).real() / scale);
            std::copy(c.begin(), c.end(), rgb.begin() + (std::size_t(y) * std::size_t(width) + std::size_t(x)) * 3);
        }
    write_png(path, width, height, rgb);
}

void write_heatmap_physical(const fs::path& path, const WaveField& w, int px) {
    const double u0 = w.u.front(), u1 = w.u.back(), R = std::exp(u1);
    const double scale = max_abs_re(w);
    std::vector<unsigned char> rgb(std::size_t(px) * std::size_t(px) * 3, 200);
    for (int y = 0; y < px; ++y)
        for (int x = 0; x < px; ++x) {
            const double x1 = R * (2.0 * (x + 0.5) / px - 1.0), x2 = R * (1.0 - 2.0 * (y + 0.5) / px);
            const double r = std::hypot(x1, x2);
            if (r <= 0) continue;
            const double u = std::log(r);
            if (u < u0 || u > u1) continue;
            const auto c = diverging_color(sample_re(w, u, std::atan2(x2, x1)) / scale);
            std::copy(c.begin(), c.end(), rgb.begin() + (std::size_t(y) * std::size_t(px) + std::size_t(x)) * 3);
        }
    write_png(path, px, px, rgb);
}

std::string report_json(const PipelineResult& r) {
    const RunConfig& c = r.config;
    const TorusData& t = *r.torus;
    json j;
    j["stage"] = stage_name(r.last);
    j["model"] = {{"u_left", c.model.u_left},
                  {"u_right", c.model.u_right},
                  {"f1", c.model.f1},
                  {"f2", c.model.f2},
                  {"g", c.model.g},
                  {"d1", c.model.d1},
                  {"mu", c.model.mu},
                  {"case", case_name(c.model.tag)},
                  {"detected_case", case_name(r.detected_case)}};
    j["torus"] = {{"E", t.E},
                  {"kappa", t.kappa},
                  {"reference", c.reference == ReferencePolicy::Configured ? "configured" : "quantized"},
                  {"caustics", {caustic_json(t.caustics.left), caustic_json(t.caustics.right)}},
                  {"motion_interval", {t.u0, t.u1}},
                  {"actions", {t.I1, t.I2}},
                  {"frequencies", t.freq.angular},
                  {"frequencies_canonical", r.chart->omega},
                  {"time_scale", r.chart->time_scale}};
    j["mode"] = {{"nu", r.mode.nu},
                 {"h", r.mode.h},
                 {"inverse_h", 1.0 / r.mode.h},
                 {"I_nu", r.mode.I_nu},
                 {"q", r.mode.q},
                 {"q_over_h", {r.mode.q[0] / r.mode.h, r.mode.q[1] / r.mode.h}}};
    if (r.quantization)
        j["quantization"] = {{"kappa", r.quantization->kappa},
                             {"h", r.quantization->h},
                             {"iterations", r.quantization->iterations},
                             {"residual", r.quantization->residual}};
    if (r.transport) {
        const TransportSolution& A = *r.transport;
        j["transport"] = {{"lambda", A.lambda},
                          {"energy", t.E + r.mode.h * A.lambda},
                          {"N", A.N},
                          {"grid", A.grid},
                          {"divisor_floor", c.transport.divisor_floor},
                          {"min_divisor", A.min_divisor},
                          {"residual_bound", A.residual_bound},
                          {"phi_tail", A.phi_tail},
                          {"transport_residual", r.transport_residual},
                          {"trivial", A.trivial()}};
        json table = json::array();
        for (const auto& d : r.resonances.smallest) table.push_back({{"k", d.k}, {"divisor", d.value}});
        j["resonances"] = {{"smallest", table},
                           {"C1", r.resonances.C1},
                           {"C2", r.resonances.C2},
                           {"resonant", r.resonances.resonant}};
    }
    if (r.field) {
        const WaveField& w = *r.field;
        j["field"] = {{"grid", field_shape(w)},
                      {"clipped_nodes", w.clipped},
                      {"max_abs", w.max_abs()},
                      {"l2_norm", w.l2_norm()},
                      {"delta", c.field.delta},
                      {"caustic_band", c.field.caustic_band},
                      {"overlap_constant", r.overlap}};
    }
    if (r.residual) j["residual"] = residual_json(*r.residual);
    return j.dump(2) + "\n";
}

std::string timing_json(const PipelineResult& r) {
    json j = json::object();
    for (const auto& [k, v] : r.timing) j[k] = v;
    return json{{"seconds", j}}.dump(2) + "\n";
}

void write_outputs(const PipelineResult& r, ArtifactSet& out) {
    if (r.field) {
        const WaveField& w = *r.field;
        if (r.config.output.csv) write_field_csv(out.add("field.csv"), w);
        if (r.config.output.binary) {
            auto bin = out.add("field.bin");
            write_field_binary(bin, out.add("field.json"), w);
        }
        if (r.config.output.plots) {
            write_heatmap_cylinder(out.add("re_psi_cylinder.png"), w);
            if (r.config.output.physical) write_heatmap_physical(out.add("re_psi_physical.png"), w);
        }
    }
    open_out(out.add("report.json")) << report_json(r);
    open_out(out.add("timing.json")) << timing_json(r);
}

}  // namespace ctw
