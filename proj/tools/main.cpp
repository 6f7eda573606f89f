#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "horizonlab/commands.hpp"
#include "horizonlab/errors.hpp"

using namespace hzl;

namespace {

struct Flags {
    std::string config, out, sigma;
    int k_max = -1, workers = -1;
    bool no_cache = false;
};

RunConfig resolve(const Flags& f) {
    RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
    if (!f.out.empty()) cfg.out_dir = f.out;
    if (f.k_max >= 0) cfg.k_max = f.k_max;
    if (f.workers >= 0) cfg.workers = f.workers;
    if (!f.sigma.empty()) {
        cfg.sigmas = parse_list(f.sigma);
        cfg.sigma_list_override = true;
    }
    if (const char* env = std::getenv("HORIZONLAB_CACHE"); env && *env) cfg.cache_dir = env;
    return cfg;
}

int run_verify(const RunConfig& cfg) {
    const VerifyConfig vc = cfg.verify_config();
    auto jobs = build_registry(vc);
    auto records = run_registry(jobs, vc, [](const CheckRecord& r) {
        std::printf("%s  [%2d] %-36s %-52s measured %-24s %s %s\n", r.pass ? "PASS" : "FAIL", r.criterion, r.id.c_str(),
                    r.inputs.c_str(), format_double(r.measured).c_str(), r.relation.c_str(),
                    format_double(r.threshold).c_str());
        std::fflush(stdout);
    });
    write_outputs(cfg.out_dir, {{"report.json", records_json(records)},
                                {"report.csv", records_csv(records)},
                                {"timings.csv", timings_csv(records)}});
    int failed = 0;
    for (const auto& r : records) failed += !r.pass;
    std::printf("%zu records, %d failed; reports in %s\n", records.size(), failed, cfg.out_dir.c_str());
    return failed ? 1 : 0;
}

int run_table(const std::string& name, const RunConfig& cfg, bool no_cache) {
    std::function<std::vector<OutputFile>()> compute;
    if (name == "poles") compute = [&] { return cmd_poles(cfg); };
    else if (name == "greens") compute = [&] { return cmd_greens(cfg); };
    else if (name == "scattering") compute = [&] { return cmd_scattering(cfg); };
    else if (name == "twopoint") compute = [&] { return cmd_twopoint(cfg); };
    else compute = [&] { return cmd_radiation(cfg); };
    ResultCache cache(cfg.cache_dir);
    CachedResult r = run_cached(name, cfg, no_cache ? nullptr : &cache, compute);
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    write_outputs(cfg.out_dir, r.files);
    for (const auto& f : r.files)
        std::printf("wrote %s/%s%s\n", cfg.out_dir.c_str(), f.name.c_str(), r.from_cache ? " (cached)" : "");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Propagators, states and scattering data on the globe with horizons"};
    app.require_subcommand(1);
    Flags flags;
    app.add_option("--config", flags.config, "configuration file (key = value with [sections])");
    app.add_option("--out", flags.out, "output directory");
    app.add_option("--k-max", flags.k_max, "largest mode number")->check(CLI::NonNegativeNumber);
    app.add_option("--sigma", flags.sigma, "comma-separated sigma list");
    app.add_option("--workers", flags.workers, "worker threads (0: logical cores)")->check(CLI::NonNegativeNumber);
    app.add_flag("--no-cache", flags.no_cache, "neither read nor write the result cache");
    const char* names[] = {"verify", "poles", "greens", "scattering", "twopoint", "radiation"};
    const char* help[] = {"run every registered check and write JSON/CSV reports",
                          "pole table of the connection determinant",
                          "mode solutions of the chosen inverse for a reproducible source",
                          "cap and de Sitter scattering matrices on the sigma grid",
                          "two-point function reports",
                          "Minkowski radiation data and a field snapshot"};
    std::string chosen;
    for (int i = 0; i < 6; ++i) {
        auto* sub = app.add_subcommand(names[i], help[i]);
        sub->fallthrough();
        sub->callback([&chosen, i, &names] { chosen = names[i]; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        RunConfig cfg = resolve(flags);
        if (chosen == "verify") return run_verify(cfg);
        return run_table(chosen, cfg, flags.no_cache);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
