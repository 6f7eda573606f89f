#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "horizonlab/commands.hpp"
#include "horizonlab/config.hpp"
#include "horizonlab/errors.hpp"

using namespace hzl;
namespace fs = std::filesystem;

namespace {

int data_rows(const std::string& csv) {
    int n = 0;
    for (char c : csv) n += c == '\n';
    return n - 1;  // header
}

const OutputFile& file(const std::vector<OutputFile>& files, const std::string& name) {
    for (const auto& f : files)
        if (f.name == name) return f;
    throw std::runtime_error("missing output " + name);
}

fs::path fresh_dir(const std::string& tag) {
    fs::path d = fs::temp_directory_path() / ("horizonlab-test-" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("config parsing") {
    RunConfig c = parse_config("k_max = 3\n[run]\nsigma = 0.5, 1.5\nseed = 9\n[poles]\nlabel = advanced\n"
                               "corner1 = 0.27+3.2i\n[tolerances]\nccr = 1e-6\n[model]\nprofile = 0.4, -0.3, -0.1\n");
    CHECK(c.k_max == 3);
    CHECK(c.sigmas == std::vector<double>{0.5, 1.5});
    CHECK(c.seed == 9);
    CHECK(c.pole_label == BranchLabel::advanced());
    CHECK(c.pole_corner1 == cplx(0.27, 3.2));
    CHECK(c.tolerances.at("ccr") == 1e-6);
    CHECK_FALSE(c.profile.is_exact());
    CHECK(c.verify_config().k_max == 3);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("[run]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nowhere]\nk_max = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nk_max = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nk_max = two\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[greens]\nlabel = sideways\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[model]\nprofile = 1, 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[verify]\ncriteria = 0, 3\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/horizonlab.ini"), ConfigError);
}

TEST_CASE("complex and list values") {
    CHECK(parse_complex("2") == cplx(2, 0));
    CHECK(parse_complex("1.5i") == cplx(0, 1.5));
    CHECK(parse_complex("-i") == cplx(0, -1));
    CHECK(parse_complex("+3.2") == cplx(3.2, 0));
    CHECK(parse_complex("-0.23-3.2i") == cplx(-0.23, -3.2));
    CHECK(parse_complex("2e-3+1e+2i") == cplx(2e-3, 100));
    CHECK(parse_complex(" 0.5 - 1i ") == cplx(0.5, -1));
    CHECK_THROWS_AS(parse_complex("1+xi"), ConfigError);
    for (cplx z : {cplx(0.1, -2.5), cplx(-3, 0.25)}) CHECK(parse_complex(format_complex(z)) == z);
    CHECK_THROWS_AS(parse_list("1,,2"), ConfigError);
}

TEST_CASE("sigma grid") {
    RunConfig c;
    auto g = c.sigma_grid();
    REQUIRE(g.size() == 20);
    CHECK(g.front() == 0.2);
    CHECK(g.back() == doctest::Approx(3.0));
    c.sigma_list_override = true;
    CHECK(c.sigma_grid() == c.sigmas);
}

TEST_CASE("scattering table has one row per mode and sigma") {
    RunConfig c;
    c.k_max = 4;
    auto out = cmd_scattering(c);
    CHECK(data_rows(file(out, "scattering_cap.csv").content) == 100);
    CHECK(data_rows(file(out, "scattering_ds.csv").content) == 100);
    // Deterministic output.
    auto again = cmd_scattering(c);
    CHECK(file(out, "scattering_ds.csv").content == file(again, "scattering_ds.csv").content);
}

TEST_CASE("no poles of the retarded family on the real window") {
    RunConfig c;
    c.k_max = 2;
    c.pole_grid = 41;
    CHECK(data_rows(file(cmd_poles(c), "poles.csv").content) == 0);
}

TEST_CASE("result cache roundtrip, identity and corruption") {
    fs::path dir = fresh_dir("cache");
    ResultCache cache(dir.string());
    RunConfig c;
    c.k_max = 1;
    int calls = 0;
    auto compute = [&] {
        ++calls;
        return std::vector<OutputFile>{{"a.csv", "x,y\n1,2\n"}, {"b.json", "{}"}};
    };
    auto r1 = run_cached("scattering", c, &cache, compute);
    CHECK_FALSE(r1.from_cache);
    auto r2 = run_cached("scattering", c, &cache, compute);
    CHECK(r2.from_cache);
    CHECK(calls == 1);
    REQUIRE(r2.files.size() == 2);
    CHECK(r2.files[0].content == r1.files[0].content);
    CHECK(r2.files[1].name == "b.json");

    RunConfig d = c;
    d.k_max = 2;
    CHECK(cache_identity("scattering", c) != cache_identity("scattering", d));
    CHECK(cache_identity("scattering", c) != cache_identity("poles", c));

    // Damage the stored entry: the run warns and recomputes.
    fs::path entry;
    for (const auto& e : fs::directory_iterator(dir)) entry = e.path();
    REQUIRE(!entry.empty());
    {
        std::fstream f(entry, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(-3, std::ios::end);
        f.put('#');
    }
    CHECK_THROWS_AS(cache.load(entry.stem().string()), CacheCorruption);
    auto r3 = run_cached("scattering", c, &cache, compute);
    CHECK_FALSE(r3.from_cache);
    CHECK(calls == 2);
    CHECK(r3.warnings.size() == 1);
    CHECK(run_cached("scattering", c, &cache, compute).from_cache);
    CHECK(run_cached("scattering", c, nullptr, compute).from_cache == false);
    fs::remove_all(dir);
}

TEST_CASE("cached and fresh command outputs agree") {
    fs::path dir = fresh_dir("agree");
    ResultCache cache(dir.string());
    RunConfig c;
    c.k_max = 1;
    c.sigma_points = 5;
    auto fresh = run_cached("scattering", c, &cache, [&] { return cmd_scattering(c); });
    auto hit = run_cached("scattering", c, &cache, [&] { return cmd_scattering(c); });
    REQUIRE(hit.from_cache);
    for (std::size_t i = 0; i < fresh.files.size(); ++i) CHECK(fresh.files[i].content == hit.files[i].content);
    fs::path out = dir / "out";
    write_outputs(out.string(), hit.files);
    std::ifstream in(out / "scattering_cap.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == fresh.files[0].content);
    fs::remove_all(dir);
}
