#pragma once

// Field exports, heatmaps and the run report.

#include <filesystem>
#include <string>
#include <vector>

#include "ctw/pipeline.hpp"

namespace ctw {

// Files written during one run; removed together if the run fails.
class ArtifactSet {
public:
    explicit ArtifactSet(std::filesystem::path dir);
    ~ArtifactSet();
    const std::filesystem::path& dir() const { return dir_; }
    // Registers and returns dir / name.
    std::filesystem::path add(const std::string& name);
    const std::vector<std::filesystem::path>& files() const { return files_; }
    void commit() { committed_ = true; }
    void discard();  // removes registered files, and the directory if this set created it and it is empty

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> files_;
    bool created_dir_ = false, committed_ = false;
};

// header "u,v,re_psi,im_psi", one line per node, u-major
void write_field_csv(const std::filesystem::path& path, const WaveField& w);
// little-endian float64 (re, im) pairs, u-major, with a JSON sidecar describing the layout
void write_field_binary(const std::filesystem::path& bin, const std::filesystem::path& sidecar, const WaveField& w);

// (r, g, b) of a diverging map on [-1, 1], white at 0
std::array<unsigned char, 3> diverging_color(double t);

// Re psi over the cylinder: u to the right, v upwards.
void write_heatmap_cylinder(const std::filesystem::path& path, const WaveField& w, int max_px = 1024);
// Re psi in x = e^u (cos v, sin v); pixels outside the grid's u-range are left grey.
void write_heatmap_physical(const std::filesystem::path& path, const WaveField& w, int px = 800);

// Deterministic JSON report (no timings; those go to timing_json).
std::string report_json(const PipelineResult& r);
std::string timing_json(const PipelineResult& r);

// Writes the exports the config asks for, plus report.json and timing.json.
void write_outputs(const PipelineResult& r, ArtifactSet& out);

}  // namespace ctw
