#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "horizonlab/geometry.hpp"
#include "horizonlab/minkowski.hpp"
#include "horizonlab/mode_ode.hpp"
#include "horizonlab/verify.hpp"

namespace hzl {

inline constexpr const char* kCodeVersion = "horizonlab-1.0.0";

// Settings of all commands. Loaded from a flat `key = value` file with
// [sections]; unknown sections or keys throw ConfigError.
struct RunConfig {
    // [model]
    std::string profile_text = "exact";
    MetricProfile profile = MetricProfile::exact();
    // [run]
    int k_max = 8;
    std::vector<double> sigmas{0.7, 1.3, 2.1};
    double sigma_min = 0.2, sigma_max = 3.0;  // sigma window for table commands
    int sigma_points = 20;
    std::uint64_t seed = 20240611;
    int workers = 0;  // 0: logical cores
    std::string out_dir = "out";
    std::string cache_dir = ".horizonlab-cache";
    double c_F = 0.0;
    // [tolerances]
    std::map<std::string, double> tolerances;
    // [verify]
    std::vector<int> criteria;
    int hadamard_k_max = 16;
    // [poles]
    BranchLabel pole_label = BranchLabel::retarded();
    cplx pole_corner0{0.2, 0.0}, pole_corner1{3.0, 0.0};
    int pole_grid = 141;
    int pole_grid_imag = 0;  // 0: same as pole_grid
    // [greens]
    BranchLabel greens_label = BranchLabel::retarded();
    int greens_points = 200;
    // [twopoint]
    int twopoint_sources = 8;
    // [radiation]
    RadiationSettings radiation;
    int field_points = 41;
    double field_extent = 6.0;

    VerifyConfig verify_config() const;
    // The sigma grid of table commands: the explicit list when given on the
    // command line, else sigma_points equispaced values in [sigma_min, sigma_max].
    std::vector<double> sigma_grid() const;
    bool sigma_list_override = false;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// "re+imi", "re-imi", "re", "imi".
cplx parse_complex(const std::string& s);
std::string format_complex(cplx z);
// Comma-separated reals.
std::vector<double> parse_list(const std::string& s);
BranchLabel parse_label(const std::string& s);

}  // namespace hzl
