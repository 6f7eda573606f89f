#include "horizonlab/config.hpp"

#include <algorithm>
#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "horizonlab/errors.hpp"

namespace hzl {

namespace {

std::string unquote(std::string s) {
    boost::algorithm::trim(s);
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
        s = s.substr(1, s.size() - 2);
    return s;
}

double parse_real(const std::string& raw) {
    std::string s = unquote(raw);
    if (s.size() > 1 && s[0] == '+') s.erase(0, 1);  // from_chars rejects a leading plus
    double x = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) throw ConfigError("not a number: '" + raw + "'");
    return x;
}

long long parse_int(const std::string& raw) {
    std::string s = unquote(raw);
    long long x = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) throw ConfigError("not an integer: '" + raw + "'");
    return x;
}

int parse_count(const std::string& raw, int lo) {
    long long v = parse_int(raw);
    if (v < lo || v > 1000000) throw ConfigError("value out of range: '" + raw + "'");
    return int(v);
}

MetricProfile parse_profile(const std::string& raw) {
    std::string s = unquote(raw);
    if (s == "exact") return MetricProfile::exact();
    std::vector<double> c = parse_list(s);
    try {
        return MetricProfile::polynomial(c);
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid profile: ") + e.what());
    }
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
    static const std::map<std::string, std::map<std::string, Setter>> s = {
        {"model",
         {{"profile",
           [](RunConfig& c, const std::string& v) {
               c.profile = parse_profile(v);
               c.profile_text = unquote(v);
           }}}},
        {"run",
         {{"k_max", [](RunConfig& c, const std::string& v) { c.k_max = parse_count(v, 0); }},
          {"sigma", [](RunConfig& c, const std::string& v) { c.sigmas = parse_list(v); }},
          {"sigma_min", [](RunConfig& c, const std::string& v) { c.sigma_min = parse_real(v); }},
          {"sigma_max", [](RunConfig& c, const std::string& v) { c.sigma_max = parse_real(v); }},
          {"sigma_points", [](RunConfig& c, const std::string& v) { c.sigma_points = parse_count(v, 1); }},
          {"seed", [](RunConfig& c, const std::string& v) { c.seed = std::uint64_t(parse_int(v)); }},
          {"workers", [](RunConfig& c, const std::string& v) { c.workers = parse_count(v, 0); }},
          {"out", [](RunConfig& c, const std::string& v) { c.out_dir = unquote(v); }},
          {"cache_dir", [](RunConfig& c, const std::string& v) { c.cache_dir = unquote(v); }},
          {"c_F", [](RunConfig& c, const std::string& v) { c.c_F = parse_real(v); }}}},
        {"verify",
         {{"criteria",
           [](RunConfig& c, const std::string& v) {
               c.criteria.clear();
               for (double x : parse_list(v)) {
                   if (x != std::floor(x) || x < 1 || x > 14) throw ConfigError("criteria must be integers in 1..14");
                   c.criteria.push_back(int(x));
               }
           }},
          {"hadamard_k_max", [](RunConfig& c, const std::string& v) { c.hadamard_k_max = parse_count(v, 4); }}}},
        {"poles",
         {{"label", [](RunConfig& c, const std::string& v) { c.pole_label = parse_label(v); }},
          {"corner0", [](RunConfig& c, const std::string& v) { c.pole_corner0 = parse_complex(v); }},
          {"corner1", [](RunConfig& c, const std::string& v) { c.pole_corner1 = parse_complex(v); }},
          {"grid", [](RunConfig& c, const std::string& v) { c.pole_grid = parse_count(v, 2); }},
          {"grid_imag", [](RunConfig& c, const std::string& v) { c.pole_grid_imag = parse_count(v, 0); }}}},
        {"greens",
         {{"label", [](RunConfig& c, const std::string& v) { c.greens_label = parse_label(v); }},
          {"points", [](RunConfig& c, const std::string& v) { c.greens_points = parse_count(v, 2); }}}},
        {"twopoint", {{"sources", [](RunConfig& c, const std::string& v) { c.twopoint_sources = parse_count(v, 2); }}}},
        {"radiation",
         {{"r_max", [](RunConfig& c, const std::string& v) { c.radiation.r_max = parse_real(v); }},
          {"levels", [](RunConfig& c, const std::string& v) { c.radiation.levels = parse_count(v, 2); }},
          {"sigma_max", [](RunConfig& c, const std::string& v) { c.radiation.sigma_max = parse_real(v); }},
          {"sigma_points", [](RunConfig& c, const std::string& v) { c.radiation.sigma_points = parse_count(v, 2); }},
          {"mellin_points", [](RunConfig& c, const std::string& v) { c.radiation.mellin_points = parse_count(v, 16); }},
          {"field_points", [](RunConfig& c, const std::string& v) { c.field_points = parse_count(v, 2); }},
          {"field_extent", [](RunConfig& c, const std::string& v) { c.field_extent = parse_real(v); }}}},
    };
    return s;
}

}  // namespace

cplx parse_complex(const std::string& raw) {
    std::string s = unquote(raw);
    s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
    if (s.empty()) throw ConfigError("empty complex value");
    if (s.back() != 'i') return {parse_real(s), 0.0};
    std::string body = s.substr(0, s.size() - 1);
    // Split at the last sign that is not an exponent sign or the leading sign.
    std::size_t cut = std::string::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            cut = i;
            break;
        }
    }
    auto imag_part = [&](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_real(t);
    };
    if (cut == std::string::npos) return {0.0, imag_part(body)};
    return {parse_real(body.substr(0, cut)), imag_part(body.substr(cut))};
}

std::string format_complex(cplx z) {
    std::string re = format_double(z.real()), im = format_double(std::abs(z.imag()));
    return re + (std::signbit(z.imag()) ? "-" : "+") + im + "i";
}

std::vector<double> parse_list(const std::string& raw) {
    std::string s = unquote(raw);
    std::vector<std::string> parts;
    boost::algorithm::split(parts, s, boost::algorithm::is_any_of(","));
    std::vector<double> out;
    for (auto& p : parts) {
        boost::algorithm::trim(p);
        if (p.empty()) throw ConfigError("empty entry in list '" + raw + "'");
        out.push_back(parse_real(p));
    }
    return out;
}

BranchLabel parse_label(const std::string& raw) {
    std::string s = unquote(raw);
    for (const BranchLabel& I : all_branch_labels())
        if (I.name() == s) return I;
    throw ConfigError("unknown propagator label '" + raw + "'");
}

RunConfig parse_config(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    RunConfig cfg;
    const auto& sch = schema();
    for (const auto& [section, node] : tree) {
        if (node.empty()) {
            // Top-level key: looked up in [run].
            auto it = sch.at("run").find(section);
            if (it == sch.at("run").end()) throw ConfigError("unknown key '" + section + "'");
            it->second(cfg, node.data());
            continue;
        }
        if (section == "tolerances") {
            for (const auto& [key, val] : node) cfg.tolerances[key] = parse_real(val.data());
            continue;
        }
        auto sec = sch.find(section);
        if (sec == sch.end()) throw ConfigError("unknown section [" + section + "]");
        for (const auto& [key, val] : node) {
            auto it = sec->second.find(key);
            if (it == sec->second.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            it->second(cfg, val.data());
        }
    }
    if (cfg.sigma_max < cfg.sigma_min) throw ConfigError("sigma_max < sigma_min");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

VerifyConfig RunConfig::verify_config() const {
    VerifyConfig v;
    v.profile = profile;
    v.sigmas = sigmas;
    v.k_max = k_max;
    v.hadamard_k_max = hadamard_k_max;
    v.seed = seed;
    v.workers = workers > 0 ? workers : std::max(1u, std::thread::hardware_concurrency());
    v.c_F = c_F;
    v.tolerances = tolerances;
    v.criteria = criteria;
    return v;
}

std::vector<double> RunConfig::sigma_grid() const {
    if (sigma_list_override) return sigmas;
    std::vector<double> g;
    for (int i = 0; i < sigma_points; ++i)
        g.push_back(sigma_points > 1 ? sigma_min + (sigma_max - sigma_min) * i / (sigma_points - 1) : sigma_min);
    return g;
}

}  // namespace hzl
