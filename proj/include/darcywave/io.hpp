#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "darcywave/continuation.hpp"
#include "darcywave/errors.hpp"
#include "darcywave/forcing.hpp"
#include "darcywave/params.hpp"
#include "darcywave/reconstruct.hpp"
#include "darcywave/spectral_field.hpp"

namespace darcywave {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// Everything needed to reproduce a run.
struct RunConfig {
    std::string preset;  ///< informational; empty for hand-written forcing
    PhysicalParams params;
    ForcingSpec forcing;
    ContinuationConfig continuation;
    std::string output_dir;
    std::uint64_t seed = 0;
    bool allow_uncertified = false;
};

namespace io_detail {

/// JSON has no infinity; +inf is stored as null.
inline json number(double v) { return std::isinf(v) && v > 0 ? json(nullptr) : json(v); }

inline double read_number(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_null()) return std::numeric_limits<double>::infinity();
    if (!v.is_number()) throw ConfigError(std::string("expected a number for '") + key + "'");
    return v.get<double>();
}

inline int read_int(const json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw ConfigError(std::string("expected an integer for '") + key + "'");
    return j.at(key).get<int>();
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
    }
}

inline void write_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char b[8];
    std::memcpy(b, &bits, 8);
    os.write(b, 8);
}

inline double read_f64(std::istream& is) {
    char b[8];
    if (!is.read(b, 8)) throw ConfigError("binary block truncated");
    std::uint64_t bits;
    std::memcpy(&bits, b, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

}  // namespace io_detail

// ---- params, forcing, continuation ----------------------------------------------------------

inline json to_json(const PhysicalParams& p) { return {{"g", p.g}, {"c", p.c}, {"h", p.h}}; }

inline PhysicalParams params_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("params must be an object");
    io_detail::reject_unknown(j, {"g", "c", "h"}, "params");
    PhysicalParams p;
    p.g = io_detail::read_number(j, "g", p.g);
    p.c = io_detail::read_number(j, "c", p.c);
    p.h = io_detail::read_number(j, "h", p.h);
    return p;
}

inline json to_json(const ForcingSpec& s) {
    json terms = json::array();
    for (const auto& t : s.terms)
        terms.push_back({{"target", to_string(t.target)},
                         {"amp", t.amp},
                         {"kind", t.kind == WaveKind::cos ? "cos" : "sin"},
                         {"m", t.m},
                         {"z", t.z}});
    return {{"terms", terms}};
}

inline ForcingSpec forcing_from_json(const json& j) {
    if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array())
        throw ConfigError("forcing must be an object with a 'terms' array");
    io_detail::reject_unknown(j, {"terms"}, "forcing");
    ForcingSpec s;
    for (const auto& e : j.at("terms")) {
        io_detail::reject_unknown(e, {"target", "amp", "kind", "m", "z"}, "forcing term");
        ForcingTerm t;
        const auto target = e.value("target", std::string{});
        if (target == "f1") t.target = Target::f1;
        else if (target == "f2") t.target = Target::f2;
        else if (target == "phi") t.target = Target::phi;
        else throw ConfigError("forcing term: target must be f1, f2 or phi");
        const auto kind = e.value("kind", std::string("cos"));
        if (kind == "cos") t.kind = WaveKind::cos;
        else if (kind == "sin") t.kind = WaveKind::sin;
        else throw ConfigError("forcing term: kind must be cos or sin");
        t.amp = io_detail::read_number(e, "amp", 0.0);
        t.m = io_detail::read_int(e, "m", 0);
        if (e.contains("z")) t.z = e.at("z").get<std::vector<double>>();
        s.terms.push_back(std::move(t));
    }
    try {
        s.validate();
    } catch (const ContractViolation& ex) {
        throw ConfigError(ex.what());
    }
    return s;
}

inline json to_json(const ContinuationConfig& c) {
    using io_detail::number;
    return {{"newton_tol", c.newton_tol},
            {"max_newton_iters", c.max_newton_iters},
            {"linear_tol", c.linear_tol},
            {"fd_step", c.fd_step},
            {"initial_step", c.initial_step},
            {"min_step", c.min_step},
            {"max_step", c.max_step},
            {"step_grow", c.step_grow},
            {"step_shrink", c.step_shrink},
            {"fast_newton_iters", c.fast_newton_iters},
            {"upkappa_max", number(c.upkappa_max)},
            {"distortion_max", number(c.distortion_max)},
            {"jacobian_min", c.jacobian_min},
            {"sobolev_max", number(c.sobolev_max)},
            {"holder_max", number(c.holder_max)},
            {"max_steps", c.max_steps},
            {"n", c.n},
            {"m_z", c.m_z},
            {"epsilon", c.epsilon},
            {"trend_window", c.trend_window}};
}

inline ContinuationConfig continuation_from_json(const json& j) {
    using io_detail::read_int;
    using io_detail::read_number;
    if (!j.is_object()) throw ConfigError("continuation must be an object");
    io_detail::reject_unknown(j,
                              {"newton_tol", "max_newton_iters", "linear_tol", "fd_step", "initial_step", "min_step", "max_step",
                               "step_grow", "step_shrink", "fast_newton_iters", "upkappa_max", "distortion_max", "jacobian_min",
                               "sobolev_max", "holder_max", "max_steps", "n", "m_z", "epsilon", "trend_window"},
                              "continuation");
    ContinuationConfig c;
    c.newton_tol = read_number(j, "newton_tol", c.newton_tol);
    c.max_newton_iters = read_int(j, "max_newton_iters", c.max_newton_iters);
    c.linear_tol = read_number(j, "linear_tol", c.linear_tol);
    c.fd_step = read_number(j, "fd_step", c.fd_step);
    c.initial_step = read_number(j, "initial_step", c.initial_step);
    c.min_step = read_number(j, "min_step", c.min_step);
    c.max_step = read_number(j, "max_step", c.max_step);
    c.step_grow = read_number(j, "step_grow", c.step_grow);
    c.step_shrink = read_number(j, "step_shrink", c.step_shrink);
    c.fast_newton_iters = read_int(j, "fast_newton_iters", c.fast_newton_iters);
    c.upkappa_max = read_number(j, "upkappa_max", c.upkappa_max);
    c.distortion_max = read_number(j, "distortion_max", c.distortion_max);
    c.jacobian_min = read_number(j, "jacobian_min", c.jacobian_min);
    c.sobolev_max = read_number(j, "sobolev_max", c.sobolev_max);
    c.holder_max = read_number(j, "holder_max", c.holder_max);
    c.max_steps = read_int(j, "max_steps", c.max_steps);
    c.n = read_int(j, "n", c.n);
    c.m_z = read_int(j, "m_z", c.m_z);
    c.epsilon = read_number(j, "epsilon", c.epsilon);
    c.trend_window = read_int(j, "trend_window", c.trend_window);
    c.validate();
    return c;
}

// ---- presets ----------------------------------------------------------------------------------

struct Preset {
    ForcingSpec forcing;
    PhysicalParams params;
};

inline const std::map<std::string, Preset>& preset_catalog() {
    static const std::map<std::string, Preset> catalog = [] {
        std::map<std::string, Preset> m;
        m["gravity-cosine"] = {ForcingSpec{{{Target::phi, 1.0, WaveKind::cos, 1, {1.0}}}}, PhysicalParams{1.0, 1.0, 1.0}};
        // c (d1 phi - f1) = 1 - 0.2 pi sin(2 pi x1) > 0 with g = 0
        m["speed-mode"] = {ForcingSpec{{{Target::phi, 0.1, WaveKind::cos, 1, {1.0}}, {Target::f1, -1.0, WaveKind::cos, 0, {1.0}}}},
                           PhysicalParams{0.0, 1.0, 1.0}};
        // d2 phi - f2 = 1 - 0.5 cos(2 pi x1) > 0 and div f = -pi sin(2 pi x1) x2
        m["bulk-forced"] = {ForcingSpec{{{Target::phi, 1.0, WaveKind::cos, 1, {1.0}},
                                         {Target::f1, 0.5, WaveKind::cos, 1, {0.0, 1.0}},
                                         {Target::f2, -1.0, WaveKind::cos, 0, {1.0}},
                                         {Target::f2, 0.5, WaveKind::cos, 1, {1.0}}}},
                            PhysicalParams{1.0, 1.0, 1.0}};
        return m;
    }();
    return catalog;
}

inline const Preset& preset(const std::string& name) {
    const auto& cat = preset_catalog();
    auto it = cat.find(name);
    if (it == cat.end()) throw ConfigError("unknown preset '" + name + "'");
    return it->second;
}

// ---- run config ------------------------------------------------------------------------------

inline json to_json(const RunConfig& rc) {
    json j{{"params", to_json(rc.params)},
           {"forcing", to_json(rc.forcing)},
           {"continuation", to_json(rc.continuation)},
           {"seed", rc.seed},
           {"allow_uncertified", rc.allow_uncertified}};
    if (!rc.preset.empty()) j["preset"] = rc.preset;
    if (!rc.output_dir.empty()) j["output_dir"] = rc.output_dir;
    return j;
}

/// A preset supplies forcing and params; explicit "forcing" or "params" entries override it.
inline RunConfig run_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    io_detail::reject_unknown(j, {"preset", "params", "forcing", "continuation", "output_dir", "seed", "allow_uncertified"}, "config");
    RunConfig rc;
    if (j.contains("preset")) {
        rc.preset = j.at("preset").get<std::string>();
        const auto& p = preset(rc.preset);
        rc.forcing = p.forcing;
        rc.params = p.params;
    }
    if (j.contains("params")) rc.params = params_from_json(j.at("params"));
    if (j.contains("forcing")) rc.forcing = forcing_from_json(j.at("forcing"));
    if (!j.contains("preset") && !j.contains("forcing")) throw ConfigError("config needs a 'preset' or a 'forcing' entry");
    if (j.contains("continuation")) rc.continuation = continuation_from_json(j.at("continuation"));
    rc.output_dir = j.value("output_dir", std::string{});
    rc.seed = j.value("seed", std::uint64_t{0});
    rc.allow_uncertified = j.value("allow_uncertified", false);
    try {
        rc.params.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return rc;
}

inline json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path.string() + "': " + e.what());
    }
}

inline RunConfig load_run_config(const fs::path& path) {
    try {
        return run_config_from_json(read_json_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("'" + path.string() + "': " + e.what());
    }
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

// ---- spectral dumps ----------------------------------------------------------------------------

/// One JSON header line, then (re, im) as little-endian f64 for xi = 0 .. N/2 - 1.
inline void write_spectral(std::ostream& os, const SpectralField& f) {
    const json header{{"format", "darcywave-spectral"}, {"version", 1}, {"n", f.size()}, {"modes", f.modes()},
                      {"mean_zero", f.mean_zero()}, {"dtype", "f64le"}};
    os << header.dump() << '\n';
    for (const auto& c : f.half()) {
        io_detail::write_f64(os, c.real());
        io_detail::write_f64(os, c.imag());
    }
}

inline SpectralField read_spectral(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("spectral dump: missing header");
    json h;
    try {
        h = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("spectral dump: bad header: ") + e.what());
    }
    if (h.value("format", std::string{}) != "darcywave-spectral") throw ConfigError("spectral dump: wrong format tag");
    const int n = h.at("n").get<int>();
    const int modes = h.at("modes").get<int>();
    if (n < 2 || n % 2 != 0 || modes != n / 2) throw ConfigError("spectral dump: inconsistent sizes");
    std::vector<cplx> half(static_cast<std::size_t>(modes));
    for (auto& c : half) {
        const double re = io_detail::read_f64(is);
        const double im = io_detail::read_f64(is);
        c = cplx(re, im);
    }
    const bool mz = h.at("mean_zero").get<bool>();
    if (mz) half[0] = cplx{};
    return SpectralField::from_half(std::move(half), mz);
}

inline void save_spectral(const fs::path& path, const SpectralField& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    write_spectral(out, f);
}

inline SpectralField load_spectral(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    return read_spectral(in);
}

// ---- branch records ------------------------------------------------------------------------------

inline json to_json(const Monitors& m) {
    using io_detail::number;
    return {{"upkappa", m.upkappa},
            {"sobolev", m.sobolev},
            {"holder", m.holder},
            {"distortion", number(m.distortion)},
            {"min_jacobian", m.min_jacobian},
            {"admissible", m.admissible},
            {"graphical", m.graphical},
            {"ellipticity_margin", m.ellipticity_margin},
            {"residual", m.residual}};
}

inline Monitors monitors_from_json(const json& j) {
    Monitors m;
    m.upkappa = j.at("upkappa").get<double>();
    m.sobolev = j.at("sobolev").get<double>();
    m.holder = j.at("holder").get<double>();
    m.distortion = io_detail::read_number(j, "distortion", 1.0);
    m.min_jacobian = j.at("min_jacobian").get<double>();
    m.admissible = j.at("admissible").get<bool>();
    m.graphical = j.at("graphical").get<bool>();
    m.ellipticity_margin = j.at("ellipticity_margin").get<double>();
    m.residual = j.at("residual").get<double>();
    return m;
}

inline std::string point_file_name(std::size_t index) {
    std::ostringstream s;
    s << "psi/point_" << std::setw(4) << std::setfill('0') << index << ".bin";
    return s.str();
}

inline json point_record(std::size_t index, const BranchPoint& p) {
    return {{"index", index},
            {"upkappa", p.upkappa},
            {"arclength", p.arclength},
            {"newton_iterations", p.newton_iterations},
            {"monitors", to_json(p.monitors)},
            {"psi", point_file_name(index)}};
}

inline json termination_record(const Branch& b) {
    json t{{"reason", to_string(b.reason)},
           {"tripped", b.tripped},
           {"fastest_growing", b.fastest_growing},
           {"detail", b.detail},
           {"points", b.points.size()}};
    if (!b.points.empty()) t["final_monitors"] = to_json(b.points.back().monitors);
    return {{"termination", t}};
}

/// Largest value of each monitor along the branch (smallest for the Jacobian).
inline json summary_record(const Branch& b) {
    Monitors mx;
    mx.min_jacobian = std::numeric_limits<double>::infinity();
    mx.distortion = 0.0;
    mx.ellipticity_margin = std::numeric_limits<double>::infinity();
    mx.admissible = true;
    mx.graphical = true;
    for (const auto& p : b.points) {
        const auto& m = p.monitors;
        mx.upkappa = std::max(mx.upkappa, m.upkappa);
        mx.sobolev = std::max(mx.sobolev, m.sobolev);
        mx.holder = std::max(mx.holder, m.holder);
        mx.distortion = std::max(mx.distortion, m.distortion);
        mx.min_jacobian = std::min(mx.min_jacobian, m.min_jacobian);
        mx.ellipticity_margin = std::min(mx.ellipticity_margin, m.ellipticity_margin);
        mx.residual = std::max(mx.residual, m.residual);
        mx.admissible = mx.admissible && m.admissible;
        mx.graphical = mx.graphical && m.graphical;
    }
    return {{"reason", to_string(b.reason)},
            {"tripped", b.tripped},
            {"fastest_growing", b.fastest_growing},
            {"detail", b.detail},
            {"points", b.points.size()},
            {"extremes", to_json(mx)}};
}

struct LoadedBranch {
    RunConfig config;
    std::vector<json> records;  ///< point records in order
    json termination;           ///< trailing record, null if absent
};

inline LoadedBranch load_branch(const fs::path& dir) {
    LoadedBranch lb;
    lb.config = load_run_config(dir / "config.json");
    std::ifstream in(dir / "branch.jsonl");
    if (!in) throw ConfigError("cannot open '" + (dir / "branch.jsonl").string() + "'");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("branch.jsonl: ") + e.what());
        }
        if (j.contains("termination")) lb.termination = j.at("termination");
        else lb.records.push_back(std::move(j));
    }
    return lb;
}

// ---- physical solution export ------------------------------------------------------------------------

/// JSON header line, then the blocks listed in the header as row-major little-endian f64.
inline void write_solution(const fs::path& path, const PhysicalSolution& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    const int mz = s.q.m_z(), mw = s.q.m_w();
    const std::vector<std::pair<std::string, const Eigen::MatrixXd*>> blocks{
        {"R1", &s.R.component(0)}, {"R2", &s.R.component(1)}, {"q", &s.q.component(0)},
        {"p", &s.p.component(0)},  {"v1", &s.v.component(0)}, {"v2", &s.v.component(1)},
        {"jacobian", &s.jacobian}};
    json names = json::array();
    for (const auto& b : blocks) names.push_back(b.first);
    const json header{{"format", "darcywave-solution"}, {"version", 1},     {"upkappa", s.upkappa},
                      {"params", to_json(s.params)},    {"m_z", mz},        {"m_w", mw},
                      {"z", s.q.grid().z()},            {"blocks", names},  {"dtype", "f64le"}};
    out << header.dump() << '\n';
    for (const auto& b : blocks)
        for (int iz = 0; iz < mz; ++iz)
            for (int j = 0; j < mw; ++j) io_detail::write_f64(out, (*b.second)(iz, j));
}

/// Plot table of the free surface: x1 x2 p v1 v2 per line.
inline std::string surface_table(const PhysicalSolution& s) {
    std::ostringstream o;
    o << std::setprecision(17) << "# x1 x2 p v1 v2\n";
    const int top = s.q.m_z() - 1;
    for (int j = 0; j < s.q.m_w(); ++j)
        o << s.R(0, top, j) << ' ' << s.R(1, top, j) << ' ' << s.p(0, top, j) << ' ' << s.v(0, top, j) << ' ' << s.v(1, top, j)
          << '\n';
    return o.str();
}

}  // namespace darcywave
