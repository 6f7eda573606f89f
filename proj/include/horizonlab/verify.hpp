#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "horizonlab/geometry.hpp"

namespace hzl {

struct VerifyConfig {
    MetricProfile profile = MetricProfile::exact();
    std::vector<double> sigmas{0.7, 1.3, 2.1};
    int k_max = 8;
    int hadamard_k_max = 16;
    std::uint64_t seed = 20240611;
    int workers = 1;
    double c_F = 0.0;
    // Threshold overrides by record id.
    std::map<std::string, double> tolerances;
    // Restrict the suite to these criteria (empty: all).
    std::vector<int> criteria;
};

// One measured quantity. relation "<=" passes when measured <= threshold,
// ">=" when measured >= threshold. A non-finite measurement fails.
struct CheckRecord {
    std::string id;
    int criterion = 0;
    std::string inputs;       // sigma, k range, label or side
    double measured = 0.0;
    double threshold = 0.0;
    std::string relation = "<=";
    double time_limit = 0.0;  // seconds for the job, 0 if not timed
    bool pass = false;
    std::string note;         // diagnostics that are reported, not asserted
    double wall_time = 0.0;   // of the job that produced the record
};

// A unit of work producing one or more records.
struct CheckJob {
    std::string name;
    int criterion = 0;
    double time_limit = 0.0;
    std::function<std::vector<CheckRecord>()> run;
};

std::vector<CheckJob> build_registry(const VerifyConfig& cfg);

// Runs the jobs on cfg.workers threads; records come back in registry order
// with pass flags, thresholds overrides and wall times filled in.
std::vector<CheckRecord> run_registry(const std::vector<CheckJob>& jobs, const VerifyConfig& cfg,
                                      const std::function<void(const CheckRecord&)>& on_record = {});

// Deterministic reports (no wall times).
std::string records_json(const std::vector<CheckRecord>& records);
std::string records_csv(const std::vector<CheckRecord>& records);
// Wall times per record.
std::string timings_csv(const std::vector<CheckRecord>& records);

// 17 significant digits.
std::string format_double(double x);

}  // namespace hzl
