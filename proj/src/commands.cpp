#include "horizonlab/commands.hpp"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "horizonlab/caps.hpp"
#include "horizonlab/desitter.hpp"
#include "horizonlab/errors.hpp"
#include "horizonlab/minkowski.hpp"
#include "horizonlab/states.hpp"

namespace hzl {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string num(double x) { return format_double(x); }

std::vector<double> grid_of(const RunConfig& cfg) { return cfg.sigma_grid(); }

}  // namespace

std::vector<OutputFile> cmd_poles(const RunConfig& cfg) {
    std::ostringstream o;
    o << "k,I,re_sigma,im_sigma,det_residual\n";
    const int n_im = cfg.pole_grid_imag > 0 ? cfg.pole_grid_imag : cfg.pole_grid;
    for (int k = 0; k <= cfg.k_max; ++k) {
        auto poles = pole_scan(k, cfg.pole_label, cfg.pole_corner0, cfg.pole_corner1, cfg.pole_grid, n_im, cfg.profile);
        for (const auto& p : poles)
            o << k << ',' << cfg.pole_label.name() << ',' << num(p.sigma.real()) << ',' << num(p.sigma.imag()) << ','
              << num(p.det_residual) << '\n';
    }
    return {{"poles.csv", o.str()}};
}

std::vector<OutputFile> cmd_greens(const RunConfig& cfg) {
    const SourceFunction f = random_sources(cfg.seed, 1, RegionMask::All)[0];
    std::ostringstream o;
    o << "sigma,k,I,theta,u_re,u_im\n";
    std::ostringstream meta;
    meta << "sigma,k,I,residual,aplus_plus_re,aplus_plus_im,aminus_plus_re,aminus_plus_im,"
            "aplus_minus_re,aplus_minus_im,aminus_minus_re,aminus_minus_im\n";
    for (double sg : cfg.sigmas)
        for (int k = 0; k <= cfg.k_max; ++k) {
            auto s = std::make_shared<const ModeSolver>(SigmaParam{sg}, k, cfg.profile);
            ModeGreens G = build_inverse(s, cfg.greens_label);
            InverseResult r = apply_inverse(G, f);
            const std::string I = cfg.greens_label.name();
            for (double th : default_grid(*s, cfg.greens_points)) {
                cplx u = r.solution.eval(th).u;
                o << num(sg) << ',' << k << ',' << I << ',' << num(th) << ',' << num(u.real()) << ',' << num(u.imag())
                  << '\n';
            }
            meta << num(sg) << ',' << k << ',' << I << ',' << num(r.residual / f.sup_norm());
            for (const AsymptoticData& d : {r.plus, r.minus})
                meta << ',' << num(d.aplus.real()) << ',' << num(d.aplus.imag()) << ',' << num(d.aminus.real()) << ','
                     << num(d.aminus.imag());
            meta << '\n';
        }
    return {{"greens.csv", o.str()}, {"greens_data.csv", meta.str()}};
}

std::vector<OutputFile> cmd_scattering(const RunConfig& cfg) {
    std::ostringstream cap, ds;
    cap << "k,sigma,re_S,im_S\n";
    ds << "k,sigma,S11_re,S11_im,S12_re,S12_im,S21_re,S21_im,S22_re,S22_im\n";
    const auto grid = grid_of(cfg);
    for (int k = 0; k <= cfg.k_max; ++k)
        for (double sg : grid) {
            SigmaParam sp{sg};
            cplx S = scattering_matrix_cap(sp, k);
            cap << k << ',' << num(sg) << ',' << num(S.real()) << ',' << num(S.imag()) << '\n';
            Eigen::Matrix2cd M = ds_scattering(sp, k);
            ds << k << ',' << num(sg);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) ds << ',' << num(M(i, j).real()) << ',' << num(M(i, j).imag());
            ds << '\n';
        }
    return {{"scattering_cap.csv", cap.str()}, {"scattering_ds.csv", ds.str()}};
}

std::vector<OutputFile> cmd_twopoint(const RunConfig& cfg) {
    ojson out = ojson::array();
    auto src = state_sources(cfg.seed, cfg.twopoint_sources);
    for (double sg : cfg.sigmas) {
        SigmaParam sp{sg};
        auto s0 = std::make_shared<const ModeSolver>(sp, 0, cfg.profile);
        const double alpha = symplectic_alpha(s0, src, +1).alpha;
        auto had = hadamard_proxy(sp, cfg.hadamard_k_max, alpha, {{0.3, 0.45}, {0.35, 0.35}, {kPi - 0.3, kPi - 0.45}},
                                  {{1.2, 1.5}, {0.4, 1.9}, {1.0, 2.6}});
        const double decay = std::max(had.cap_plus.final_slope, had.cap_minus.final_slope);
        for (int k = 0; k <= cfg.k_max; ++k) {
            auto s = k == 0 ? s0 : std::make_shared<const ModeSolver>(sp, k, cfg.profile);
            for (int side : {+1, -1}) {
                auto fit = symplectic_alpha(s, src, side);
                TwoPointForm tp = two_point_build(s, side, src, alpha);
                ojson e;
                e["sigma"] = sg;
                e["k"] = k;
                e["side"] = side > 0 ? "+" : "-";
                e["alpha"] = fit.alpha;
                e["ccr_residual"] = tp.ccr_residual();
                e["min_eig_plus"] = tp.min_eig_plus();
                e["min_eig_minus"] = tp.min_eig_minus();
                e["decay_rate"] = decay;
                out.push_back(e);
            }
        }
    }
    return {{"twopoint.json", out.dump(2) + "\n"}};
}

std::vector<OutputFile> cmd_radiation(const RunConfig& cfg) {
    const SpacetimeSource f = random_minkowski_sources(cfg.seed, 1, 1)[0];
    auto data = commutator_radiation(f, cfg.radiation);
    ojson out;
    out["sigma"] = data.empty() ? std::vector<double>{} : data[0].sigma;
    ojson ends = ojson::array();
    for (const RadiationData& d : data) {
        ojson e;
        e["direction"] = d.end.dir == NullDirection::Right ? "right" : "left";
        e["horizon"] = d.end.horizon > 0 ? "future" : "past";
        e["extrapolation_change"] = d.extrapolation_change;
        std::vector<double> pr, pi, mr, mi;
        for (std::size_t j = 0; j < d.sigma.size(); ++j) {
            pr.push_back(d.a_plus[j].real());
            pi.push_back(d.a_plus[j].imag());
            mr.push_back(d.a_minus[j].real());
            mi.push_back(d.a_minus[j].imag());
        }
        e["a_plus_re"] = pr;
        e["a_plus_im"] = pi;
        e["a_minus_re"] = mr;
        e["a_minus_im"] = mi;
        ends.push_back(e);
    }
    out["ends"] = ends;
    // Snapshot of G f on a square grid.
    auto G = propagator_apply(PropagatorKind::Commutator, f, cfg.c_F);
    std::ostringstream grid;
    grid << "t,x,u_re,u_im\n";
    const int n = cfg.field_points;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double t = -cfg.field_extent + 2.0 * cfg.field_extent * i / (n - 1);
            double x = -cfg.field_extent + 2.0 * cfg.field_extent * j / (n - 1);
            cplx u = G(t, x);
            grid << num(t) << ',' << num(x) << ',' << num(u.real()) << ',' << num(u.imag()) << '\n';
        }
    return {{"radiation.json", out.dump(2) + "\n"}, {"field.csv", grid.str()}};
}

std::string cache_identity(const std::string& command, const RunConfig& cfg) {
    std::ostringstream o;
    o << kCodeVersion << '\n' << command << '\n' << "profile=" << cfg.profile_text << '\n' << "k_max=" << cfg.k_max << '\n';
    o << "sigmas=";
    for (double s : cfg.sigmas) o << num(s) << ';';
    o << "\ngrid=";
    for (double s : cfg.sigma_grid()) o << num(s) << ';';
    o << "\nseed=" << cfg.seed << "\nc_F=" << num(cfg.c_F) << "\nhadamard_k_max=" << cfg.hadamard_k_max;
    o << "\npoles=" << cfg.pole_label.name() << ';' << format_complex(cfg.pole_corner0) << ';'
      << format_complex(cfg.pole_corner1) << ';' << cfg.pole_grid << ';' << cfg.pole_grid_imag;
    o << "\ngreens=" << cfg.greens_label.name() << ';' << cfg.greens_points;
    o << "\ntwopoint=" << cfg.twopoint_sources;
    const RadiationSettings& r = cfg.radiation;
    o << "\nradiation=" << num(r.r_max) << ';' << r.levels << ';' << num(r.s_panel) << ';' << num(r.tau_min) << ';'
      << num(r.tau_max) << ';' << r.mellin_points << ';' << num(r.sigma_max) << ';' << r.sigma_points << ';'
      << cfg.field_points << ';' << num(cfg.field_extent) << '\n';
    return o.str();
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalError("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string ResultCache::path_for(const std::string& key) const { return (fs::path(dir_) / (key + ".hzc")).string(); }

namespace {

std::string serialize(const std::vector<OutputFile>& files) {
    std::ostringstream o;
    for (const auto& f : files) o << "file " << f.name << ' ' << f.content.size() << '\n' << f.content;
    return o.str();
}

}  // namespace

std::optional<std::vector<OutputFile>> ResultCache::load(const std::string& key) const {
    const std::string path = path_for(key);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const std::size_t nl = text.find('\n');
    const std::string header = text.substr(0, nl);
    const std::string prefix = "hzl-cache 1 ";
    if (nl == std::string::npos || header.rfind(prefix, 0) != 0) throw CacheCorruption("bad header in " + path);
    const std::string payload = text.substr(nl + 1);
    if (sha256_hex(payload) != header.substr(prefix.size())) throw CacheCorruption("digest mismatch in " + path);
    std::vector<OutputFile> files;
    std::size_t pos = 0;
    while (pos < payload.size()) {
        const std::size_t eol = payload.find('\n', pos);
        if (eol == std::string::npos) throw CacheCorruption("truncated entry in " + path);
        std::istringstream line(payload.substr(pos, eol - pos));
        std::string tag, name;
        std::size_t size = 0;
        if (!(line >> tag >> name >> size) || tag != "file" || eol + 1 + size > payload.size())
            throw CacheCorruption("malformed entry in " + path);
        files.push_back({name, payload.substr(eol + 1, size)});
        pos = eol + 1 + size;
    }
    return files;
}

void ResultCache::store(const std::string& key, const std::vector<OutputFile>& files) const {
    fs::create_directories(dir_);
    const std::string payload = serialize(files);
    const std::string path = path_for(key), tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << "hzl-cache 1 " << sha256_hex(payload) << '\n' << payload;
    }
    fs::rename(tmp, path);
}

CachedResult run_cached(const std::string& command, const RunConfig& cfg, const ResultCache* cache,
                        const std::function<std::vector<OutputFile>()>& compute) {
    CachedResult r;
    const std::string key = command + "-" + sha256_hex(cache_identity(command, cfg)).substr(0, 32);
    if (cache) {
        try {
            if (auto hit = cache->load(key)) {
                r.files = std::move(*hit);
                r.from_cache = true;
                return r;
            }
        } catch (const CacheCorruption& e) {
            r.warnings.push_back(std::string(e.what()) + "; recomputing");
        }
    }
    r.files = compute();
    if (cache) cache->store(key, r.files);
    return r;
}

void write_outputs(const std::string& dir, const std::vector<OutputFile>& files) {
    fs::create_directories(dir);
    for (const auto& f : files) {
        std::ofstream out(fs::path(dir) / f.name, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write to output directory '" + dir + "'");
        out << f.content;
    }
}

}  // namespace hzl
