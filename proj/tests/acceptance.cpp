// Acceptance suite: runs the verification registry with default settings and
// prints one PASS/FAIL line per criterion. Criterion 14 times the suite and
// reruns it with a different worker count to check byte-identical reports.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "horizonlab/verify.hpp"

using namespace hzl;

namespace {

constexpr double kSuiteBudgetSeconds = 300.0;

struct Summary {
    int records = 0, failed = 0;
    std::string worst;  // first failing record, or the one closest to its threshold
    double worst_margin = 1e300;
};

double margin(const CheckRecord& r) {
    double scale = std::max(std::abs(r.threshold), 1e-300);
    return r.relation == ">=" ? (r.measured - r.threshold) / scale : (r.threshold - r.measured) / scale;
}

std::vector<CheckRecord> run_suite(int workers, double& seconds) {
    VerifyConfig cfg;
    cfg.workers = workers;
    auto t0 = std::chrono::steady_clock::now();
    auto records = run_registry(build_registry(cfg), cfg, [](const CheckRecord& r) {
        std::fprintf(stderr, "  %s [%2d] %-38s %s measured %.6g %s %.6g\n", r.pass ? "ok  " : "FAIL", r.criterion,
                     r.id.c_str(), r.inputs.c_str(), r.measured, r.relation.c_str(), r.threshold);
    });
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return records;
}

}  // namespace

int main() {
    double t_first = 0.0, t_second = 0.0;
    std::fprintf(stderr, "suite run 1 (1 worker)\n");
    auto first = run_suite(1, t_first);

    std::map<int, Summary> by_criterion;
    for (int c = 1; c <= 13; ++c) by_criterion[c];
    for (const auto& r : first) {
        Summary& s = by_criterion[r.criterion];
        ++s.records;
        double m = r.pass ? margin(r) : -1e300;
        if (!r.pass) ++s.failed;
        if (m < s.worst_margin) {
            s.worst_margin = m;
            char buf[512];
            std::snprintf(buf, sizeof buf, "%s (%s) measured %.6g %s %.6g", r.id.c_str(), r.inputs.c_str(),
                          r.measured, r.relation.c_str(), r.threshold);
            s.worst = buf;
        }
    }

    bool all = true;
    for (const auto& [c, s] : by_criterion) {
        bool pass = s.records > 0 && s.failed == 0;
        all = all && pass;
        std::printf("%s criterion %2d: %d records, %d failed; tightest: %s\n", pass ? "PASS" : "FAIL", c, s.records,
                    s.failed, s.records ? s.worst.c_str() : "none");
    }

    std::fprintf(stderr, "suite run 2 (2 workers)\n");
    auto second = run_suite(2, t_second);
    bool same_json = records_json(first) == records_json(second);
    bool same_csv = records_csv(first) == records_csv(second);
    bool fast = t_first < kSuiteBudgetSeconds;
    bool pass14 = fast && same_json && same_csv;
    all = all && pass14;
    std::printf("%s criterion 14: suite %.1f s (limit %.0f s), rerun %.1f s; json %s, csv %s\n",
                pass14 ? "PASS" : "FAIL", t_first, kSuiteBudgetSeconds, t_second,
                same_json ? "identical" : "differs", same_csv ? "identical" : "differs");

    std::printf("%s\n", all ? "ALL PASS" : "SOME FAILED");
    return all ? 0 : 1;
}
