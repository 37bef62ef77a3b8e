#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qci/cutoff.hpp"
#include "qci/models.hpp"
#include "qci/region.hpp"

namespace qci {

struct SystemSpec {
    std::string kind = "torus";  // torus | surface_of_revolution | liouville_torus
    int dim = 2;
    std::string profile = "sphere";
    std::vector<double> params;
    std::string table;  // profile table path (overrides profile)
    LiouvilleParams liouville;
};

struct CutoffSpec {
    std::string kind = "none";  // none | sor_ratio | torus_cone
    double c_min = 0.0, c_max = 0.5, width = 0.1;
    Vec axis;
    double half_angle = 0.0;
};

struct RegionSpec {
    std::string kind = "box";  // box | ball | cone | p1_ball
    Vec axis;
    double half_angle = 0.0;
};

/// One experiment, read from a versioned YAML document with strict keys.
struct ExperimentConfig {
    std::string source;
    int schema = 1;
    std::string id = "experiment";
    std::string target = "pointwise_diag";
    SystemSpec system;
    bool has_band = false;
    double band_lo = 0.0, band_hi = 0.0;
    CutoffSpec cutoff;
    Vec c_bar;
    std::vector<double> lambdas;
    std::vector<Vec> points;
    int pair_count = 10;
    double pair_separation = 0.4;  // |x - y| = separation / lambda
    std::string offdiag_mode = "full_phase";
    RegionSpec region;
    Vec ray;
    std::string expect = "bounded";  // smoothed_measure: bounded | decay
    double delta0 = std::numeric_limits<double>::quiet_NaN();
    int grid_size = 4096;
    double lam_max = 0.0;  // 0: chosen from the experiment
    bool richardson = true;
    int m_cap = -1;
    std::vector<double> probes;
    int cluster_boxes = 40;
    int geometry_cells = 63;
    int geometry_phi_cells = 90;
    int geometry_refine = 3;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    int threads = 0;
};

ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

ModelSystem build_system(const SystemSpec& spec);
CutoffSymbol build_cutoff(const CutoffSpec& spec);
/// Region of the experiment at scale lambda.
SpectralRegion build_region(const ExperimentConfig& cfg, const ModelSystem& system, double lambda);

}  // namespace qci
