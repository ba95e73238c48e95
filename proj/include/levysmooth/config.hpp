#pragma once

// JSON experiment configs: schema validation (collecting every violation in
// one pass), model/function builders, normalization, and the config hash the
// manifest records. Unknown keys are rejected everywhere so typos fail loudly.

#include <cstdint>
#include <cstdio>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "common.hpp"
#include "kernels.hpp"
#include "sde.hpp"
#include "semigroup.hpp"
#include "spectral.hpp"
#include "subordinators.hpp"
#include "test_functions.hpp"

namespace levysmooth::config {

using nlohmann::json;

enum class Command {
    Moments,
    Density,
    SmoothCheck,
    Holder,
    Spectral,
    SdeCheck,
    Duhamel,
    DensityCriterion,
};

inline const char* to_string(Command c) {
    switch (c) {
        case Command::Moments: return "moments";
        case Command::Density: return "density";
        case Command::SmoothCheck: return "smooth-check";
        case Command::Holder: return "holder";
        case Command::Spectral: return "spectral";
        case Command::SdeCheck: return "sde-check";
        case Command::Duhamel: return "duhamel";
        case Command::DensityCriterion: return "density-criterion";
    }
    return "?";
}

struct ConfigError : std::runtime_error {
    std::vector<std::string> violations;
    explicit ConfigError(std::vector<std::string> v)
        : std::runtime_error(format(v)), violations(std::move(v)) {}
    static std::string format(const std::vector<std::string>& v) {
        std::string s = "invalid config:";
        for (const auto& e : v) s += "\n  - " + e;
        return s;
    }
};

struct ExperimentConfig {
    Command command = Command::Moments;
    json doc;  // normalized: defaults materialized, shapes canonical

    std::uint64_t seed() const { return doc.at("seed").get<std::uint64_t>(); }
    int threads() const { return doc.at("threads").get<int>(); }
    bool allow_divergent() const { return doc.at("allow_divergent").get<bool>(); }
    std::string out_dir() const { return doc.at("out").get<std::string>(); }

    bool operator==(const ExperimentConfig& o) const {
        return command == o.command && doc == o.doc;
    }
};

inline std::string serialize(const ExperimentConfig& cfg) { return cfg.doc.dump(2) + "\n"; }

inline std::string config_hash(const ExperimentConfig& cfg) {
    // FNV-1a 64 over the normalized serialization, minus the keys that cannot
    // affect results: the output directory, and threads (artifacts are
    // thread-count invariant by construction)
    json trimmed = cfg.doc;
    trimmed.erase("out");
    trimmed.erase("threads");
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : trimmed.dump(2)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// --- validation walker ----------------------------------------------------------

namespace detail {

// One JSON object being validated: typed getters record which keys were read,
// default-fill absent optionals in place, and push violations instead of
// throwing so a single parse reports everything wrong at once.
class Scope {
  public:
    Scope(json& j, std::string path, std::vector<std::string>& errs)
        : j_(j), path_(std::move(path)), errs_(errs) {}

    bool bad() const { return !j_.is_object(); }

    void fail(const std::string& what) { errs_.push_back(path_ + ": " + what); }
    void fail_key(const char* key, const std::string& what) {
        errs_.push_back(path_ + "." + key + ": " + what);
    }

    bool has(const char* key) {
        used_.insert(key);
        return j_.contains(key);
    }

    double num(const char* key, double lo, double hi, bool required, double def = 0.0) {
        used_.insert(key);
        if (!j_.contains(key)) {
            if (required) {
                fail_key(key, "missing required number");
                return def;
            }
            j_[key] = def;
            return def;
        }
        if (!j_[key].is_number()) {
            fail_key(key, "expected a number");
            return def;
        }
        const double v = j_[key].get<double>();
        if (!(v >= lo) || !(v <= hi)) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "out of range [%g, %g]", lo, hi);
            fail_key(key, buf);
        }
        return v;
    }

    std::int64_t integer(const char* key, std::int64_t lo, std::int64_t hi, bool required,
                         std::int64_t def = 0) {
        used_.insert(key);
        if (!j_.contains(key)) {
            if (required) {
                fail_key(key, "missing required integer");
                return def;
            }
            j_[key] = def;
            return def;
        }
        if (!j_[key].is_number_integer() && !j_[key].is_number_unsigned()) {
            fail_key(key, "expected an integer");
            return def;
        }
        const std::int64_t v = j_[key].get<std::int64_t>();
        if (v < lo || v > hi) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "out of range [%lld, %lld]",
                          static_cast<long long>(lo), static_cast<long long>(hi));
            fail_key(key, buf);
        }
        return v;
    }

    bool boolean(const char* key, bool def) {
        used_.insert(key);
        if (!j_.contains(key)) {
            j_[key] = def;
            return def;
        }
        if (!j_[key].is_boolean()) {
            fail_key(key, "expected a boolean");
            return def;
        }
        return j_[key].get<bool>();
    }

    std::string str(const char* key, const std::vector<std::string>& allowed,
                    bool required, const std::string& def = "") {
        used_.insert(key);
        if (!j_.contains(key)) {
            if (required) {
                fail_key(key, "missing required string");
                return def;
            }
            if (!def.empty() || allowed.empty()) j_[key] = def;
            return def;
        }
        if (!j_[key].is_string()) {
            fail_key(key, "expected a string");
            return def;
        }
        const std::string v = j_[key].get<std::string>();
        if (!allowed.empty()) {
            bool ok = false;
            for (const auto& a : allowed)
                if (a == v) ok = true;
            if (!ok) {
                std::string msg = "unknown value \"" + v + "\" (allowed:";
                for (const auto& a : allowed) msg += " " + a;
                fail_key(key, msg + ")");
            }
        }
        return v;
    }

    // positive number array, required
    Vec num_array(const char* key, double lo, double hi, std::size_t min_len) {
        used_.insert(key);
        Vec out;
        if (!j_.contains(key)) {
            fail_key(key, "missing required array");
            return out;
        }
        if (!j_[key].is_array() || j_[key].size() < min_len) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "expected an array of >= %zu numbers", min_len);
            fail_key(key, buf);
            return out;
        }
        for (const auto& e : j_[key]) {
            if (!e.is_number()) {
                fail_key(key, "array entries must be numbers");
                return {};
            }
            const double v = e.get<double>();
            if (!(v >= lo) || !(v <= hi)) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "entry %g out of range [%g, %g]", v, lo, hi);
                fail_key(key, buf);
            }
            out.push_back(v);
        }
        return out;
    }

    // nested object; returns nullptr (and records a violation when required)
    json* block(const char* key, bool required) {
        used_.insert(key);
        if (!j_.contains(key)) {
            if (required) fail_key(key, "missing required block");
            return nullptr;
        }
        if (!j_[key].is_object()) {
            fail_key(key, "expected an object block");
            return nullptr;
        }
        return &j_[key];
    }

    json* raw(const char* key, bool required) {
        used_.insert(key);
        if (!j_.contains(key)) {
            if (required) fail_key(key, "missing required field");
            return nullptr;
        }
        return &j_[key];
    }

    // call last: every key not touched by a getter is a violation
    void reject_unknown() {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) fail_key(it.key().c_str(), "unknown key");
    }

    const std::string& path() const { return path_; }
    json& get() { return j_; }

  private:
    json& j_;
    std::string path_;
    std::vector<std::string>& errs_;
    std::set<std::string> used_;
};

inline void check_subordinator(json& j, const std::string& path,
                               std::vector<std::string>& errs) {
    Scope s(j, path, errs);
    const std::string kind = s.str("kind", {"gamma", "stable", "drift"}, true);
    if (kind == "gamma") {
        s.num("a", 1e-12, 1e12, true);
        s.num("b", 1e-12, 1e12, true);
    } else if (kind == "stable") {
        s.num("rho", 1e-9, 1.0 - 1e-9, true);
    } else if (kind == "drift") {
        s.num("c", 1e-12, 1e12, true);
    }
    s.reject_unknown();
}

inline void check_noise(json& j, const std::string& path, std::vector<std::string>& errs) {
    Scope s(j, path, errs);
    const std::int64_t d = s.integer("dim", 1, 3, false, 1);
    if (json* sub = s.block("subordinator", true))
        check_subordinator(*sub, path + ".subordinator", errs);
    if (s.has("q")) {
        json& q = s.get()["q"];
        bool ok = q.is_array() && q.size() == static_cast<std::size_t>(d);
        if (ok)
            for (const auto& row : q) {
                if (!row.is_array() || row.size() != static_cast<std::size_t>(d)) ok = false;
                else
                    for (const auto& e : row)
                        if (!e.is_number()) ok = false;
            }
        if (!ok) s.fail_key("q", "expected a dim x dim numeric matrix");
    }
    if (json* p = s.block("perturbation", false)) {
        Scope ps(*p, path + ".perturbation", errs);
        ps.str("kind", {"fbm"}, true);
        ps.num("hurst", 1e-9, 1.0 - 1e-9, true);
        ps.reject_unknown();
    }
    s.reject_unknown();
}

inline void check_test_function(json& j, const std::string& path,
                                std::vector<std::string>& errs, int d) {
    Scope s(j, path, errs);
    const std::string kind =
        s.str("kind",
              {"indicator_box", "indicator_interval", "half_space", "gaussian_bump",
               "constant", "coordinate", "cosine"},
              true);
    if (kind == "indicator_box") s.num("radius", 1e-12, 1e6, true);
    if (kind == "indicator_interval") {
        if (d != 1) s.fail("indicator_interval needs dim = 1");
        const double lo = s.num("lo", -1e6, 1e6, true);
        const double hi = s.num("hi", -1e6, 1e6, true);
        if (!(lo < hi)) s.fail("need lo < hi");
    }
    if (kind == "half_space") {
        s.integer("coord", 0, d - 1, false, 0);
        s.num("level", -1e6, 1e6, false, 0.0);
    }
    if (kind == "constant") s.num("value", -1e12, 1e12, false, 1.0);
    if (kind == "coordinate") s.integer("coord", 0, d - 1, false, 0);
    if (kind == "cosine") s.num("freq", 1e-12, 1e6, false, 1.0);
    s.reject_unknown();
}

inline void check_drift(json& j, const std::string& path, std::vector<std::string>& errs,
                        int d) {
    Scope s(j, path, errs);
    const std::string kind = s.str("kind", {"zero", "constant", "ou", "tanh"}, true);
    if (kind == "constant") {
        json* v = s.raw("value", true);
        if (v && !v->is_number() &&
            !(v->is_array() && v->size() == static_cast<std::size_t>(d)))
            s.fail_key("value", "expected a number or dim-length array");
    }
    if (kind == "ou") s.num("rate", 1e-12, 1e6, true);
    if (kind == "tanh") {
        if (d != 1) s.fail("tanh drift needs dim = 1");
        s.num("amplitude", -1e6, 1e6, true);
    }
    s.reject_unknown();
}

inline void check_sigma(json& j, const std::string& path, std::vector<std::string>& errs,
                        int d) {
    Scope s(j, path, errs);
    const std::string kind = s.str("kind", {"scalar", "bounded_affine"}, true);
    if (kind == "scalar") s.num("value", 1e-12, 1e6, true);
    if (kind == "bounded_affine") {
        if (d != 1) s.fail("bounded_affine sigma needs dim = 1");
        const double base = s.num("base", 1e-12, 1e6, true);
        const double slope = s.num("slope", -1e6, 1e6, true);
        if (std::fabs(slope) >= base) s.fail("need |slope| < base for ellipticity");
    }
    s.reject_unknown();
}

inline void check_sde(json& j, const std::string& path, std::vector<std::string>& errs) {
    Scope s(j, path, errs);
    const int d = static_cast<int>(s.integer("dim", 1, 3, false, 1));
    if (json* dr = s.block("drift", true)) check_drift(*dr, path + ".drift", errs, d);
    if (json* sg = s.block("sigma", false)) check_sigma(*sg, path + ".sigma", errs, d);
    if (json* nz = s.block("noise", true)) {
        check_noise(*nz, path + ".noise", errs);
        if (nz->contains("dim") && (*nz)["dim"].get<int>() != d)
            s.fail("noise.dim must match sde.dim");
        else
            (*nz)["dim"] = d;
    }
    s.str("growth", {"bounded", "linear"}, false, "bounded");
    s.reject_unknown();
}

// "x" entries may be numbers (d = 1) or arrays; normalize to arrays in place
inline void normalize_points(json& arr, int d, const std::string& path,
                             std::vector<std::string>& errs) {
    if (!arr.is_array() || arr.empty()) {
        errs.push_back(path + ": expected a non-empty array of points");
        return;
    }
    for (auto& e : arr) {
        if (e.is_number()) {
            if (d == 1)
                e = json::array({e.get<double>()});
            else
                errs.push_back(path + ": scalar point but dim > 1");
        } else if (e.is_array()) {
            if (e.size() != static_cast<std::size_t>(d))
                errs.push_back(path + ": point arity != dim");
            for (const auto& c : e)
                if (!c.is_number()) errs.push_back(path + ": point entries must be numbers");
        } else {
            errs.push_back(path + ": points must be numbers or arrays");
        }
    }
}

inline void check_grid(json& j, const std::string& path, std::vector<std::string>& errs) {
    Scope s(j, path, errs);
    const double lo = s.num("lo", -1e9, 1e9, true);
    const double hi = s.num("hi", -1e9, 1e9, true);
    if (!(lo < hi)) s.fail("need lo < hi");
    s.integer("count", 2, 100000, true);
    s.reject_unknown();
}

}  // namespace detail

// --- per-command schemas ---------------------------------------------------------

inline ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }
    std::vector<std::string> errs;
    if (!doc.is_object()) throw ConfigError({"top level must be a JSON object"});

    detail::Scope top(doc, "config", errs);
    const std::string cmd_name = top.str(
        "command",
        {"moments", "density", "smooth-check", "holder", "spectral", "sde-check",
         "duhamel", "density-criterion"},
        true);
    // shared keys
    top.integer("seed", 0, std::numeric_limits<std::int64_t>::max(), false, 1);
    top.integer("threads", 0, 4096, false, 0);
    top.boolean("allow_divergent", false);
    top.str("out", {}, false, ".");

    ExperimentConfig cfg;
    if (cmd_name == "moments") {
        cfg.command = Command::Moments;
        if (json* sub = top.block("subordinator", true))
            detail::check_subordinator(*sub, "config.subordinator", errs);
        top.num_array("t", 1e-9, 1e9, 1);
        top.num_array("p", 1e-9, 1e3, 1);
        top.integer("n", 1, 1000000000, false, 1000000);
        top.str("method", {"quadrature", "mc", "closed-form", "all"}, false, "all");
    } else if (cmd_name == "density") {
        cfg.command = Command::Density;
        if (json* nz = top.block("noise", true)) {
            detail::check_noise(*nz, "config.noise", errs);
            if (nz->contains("dim") && (*nz)["dim"].is_number_integer() &&
                (*nz)["dim"].get<int>() != 1)
                errs.push_back("config.noise.dim: density command needs dim = 1");
        }
        top.num_array("t", 1e-9, 1e9, 1);
        if (json* g = top.block("y", true)) detail::check_grid(*g, "config.y", errs);
        top.str("method", {"mixture", "fourier", "both"}, false, "mixture");
    } else if (cmd_name == "smooth-check") {
        cfg.command = Command::SmoothCheck;
        int d = 1;
        if (json* nz = top.block("noise", true)) {
            detail::check_noise(*nz, "config.noise", errs);
            if (nz->contains("dim") && (*nz)["dim"].is_number_integer())
                d = (*nz)["dim"].get<int>();
        }
        if (json* f = top.block("f", true)) detail::check_test_function(*f, "config.f", errs, d);
        top.integer("k", 1, 4, false, 1);
        top.num("l", 0.0, 64.0, false, 0.0);
        top.num("p", 1.0, kInf, false, kInf);
        top.num("q", 1.0, kInf, false, kInf);
        top.num_array("t", 1e-9, 1e9, 1);
        if (json* x = top.raw("x", true)) detail::normalize_points(*x, d, "config.x", errs);
    } else if (cmd_name == "holder") {
        cfg.command = Command::Holder;
        int d = 1;
        if (json* nz = top.block("noise", true)) {
            detail::check_noise(*nz, "config.noise", errs);
            if (nz->contains("dim") && (*nz)["dim"].is_number_integer())
                d = (*nz)["dim"].get<int>();
        }
        if (json* f = top.block("f", true)) detail::check_test_function(*f, "config.f", errs, d);
        top.num("beta", 1e-9, 1.0 - 1e-9, true);
        top.num("p", 1.0, kInf, false, kInf);
        top.num_array("t", 1e-9, 1e9, 1);
        if (json* pr = top.raw("pairs", true)) {
            if (!pr->is_array() || pr->empty())
                errs.push_back("config.pairs: expected a non-empty array of [x1, x2]");
            else
                for (auto& e : *pr) {
                    if (!e.is_array() || e.size() != 2) {
                        errs.push_back("config.pairs: each entry must be [x1, x2]");
                        break;
                    }
                    detail::normalize_points(e, d, "config.pairs", errs);
                }
        }
    } else if (cmd_name == "spectral") {
        cfg.command = Command::Spectral;
        const bool has_noise = top.has("noise");
        const bool has_psi = top.has("psi");
        if (has_noise == has_psi)
            errs.push_back("config: spectral needs exactly one of \"noise\" or \"psi\"");
        if (has_noise)
            if (json* nz = top.block("noise", true))
                detail::check_noise(*nz, "config.noise", errs);
        if (has_psi)
            if (json* ps = top.block("psi", true)) {
                detail::Scope s(*ps, "config.psi", errs);
                const std::string kind =
                    s.str("kind", {"variance_gamma", "stable", "gaussian"}, true);
                if (kind == "variance_gamma") {
                    s.num("a", 1e-12, 1e12, true);
                    s.num("b", 1e-12, 1e12, true);
                }
                if (kind == "stable") s.num("alpha", 1e-9, 2.0, true);
                s.reject_unknown();
            }
        top.integer("dim", 1, 3, false, 1);
        top.num("max_radius", 1e6, 1e12, false, 1e9);
        top.integer("per_decade", 1, 64, false, 8);
    } else if (cmd_name == "sde-check") {
        cfg.command = Command::SdeCheck;
        int d = 1;
        if (json* sd = top.block("sde", true)) {
            detail::check_sde(*sd, "config.sde", errs);
            if (sd->contains("dim") && (*sd)["dim"].is_number_integer())
                d = (*sd)["dim"].get<int>();
        }
        const std::string task =
            top.str("task", {"semigroup", "profile", "batch"}, false, "semigroup");
        top.num("t", 1e-9, 1e9, true);
        if (json* x = top.raw("x0", true)) {
            if (x->is_number()) *x = json::array({x->get<double>()});
            json pts = json::array({*x});
            detail::normalize_points(pts, d, "config.x0", errs);
            *x = pts[0];
        }
        top.integer("n", 1, 1000000000, true);
        top.num("h", 1e-9, 1e9, true);
        if (task == "semigroup" || task == "profile") {
            if (json* f = top.block("f", true))
                detail::check_test_function(*f, "config.f", errs, d);
        } else {
            if (json* f = top.block("f", false))
                detail::check_test_function(*f, "config.f", errs, d);
            top.str("format", {"csv", "lsmb", "both"}, false, "csv");
        }
        if (task == "profile") {
            Vec off = top.num_array("offsets", 1e-12, 1e6, 2);
            for (std::size_t i = 1; i < off.size(); ++i)
                if (!(off[i] < off[i - 1])) {
                    errs.push_back("config.offsets: must be strictly decreasing");
                    break;
                }
            top.integer("axis", 0, d - 1, false, 0);
        }
    } else if (cmd_name == "duhamel") {
        cfg.command = Command::Duhamel;
        if (json* sd = top.block("sde", true)) {
            detail::check_sde(*sd, "config.sde", errs);
            if (sd->contains("dim") && (*sd)["dim"].is_number_integer() &&
                (*sd)["dim"].get<int>() != 1)
                errs.push_back("config.sde.dim: duhamel needs dim = 1");
            if (sd->contains("sigma") && (*sd)["sigma"].is_object())
                errs.push_back("config.sde.sigma: duhamel needs an additive SDE");
        }
        if (json* f = top.block("f", true)) {
            detail::check_test_function(*f, "config.f", errs, 1);
            if (f->contains("kind") && (*f)["kind"].is_string()) {
                const std::string k = (*f)["kind"].get<std::string>();
                if (k != "indicator_interval" && k != "indicator_box")
                    errs.push_back("config.f.kind: duhamel needs an indicator f");
            }
        }
        top.num("t", 1e-9, 1e9, true);
        if (json* x = top.raw("x", true)) detail::normalize_points(*x, 1, "config.x", errs);
        if (json* lv = top.raw("levels", true)) {
            if (!lv->is_array() || lv->empty())
                errs.push_back("config.levels: expected a non-empty array");
            else {
                int idx = 0;
                for (auto& e : *lv) {
                    char pbuf[48];
                    std::snprintf(pbuf, sizeof pbuf, "config.levels[%d]", idx++);
                    if (!e.is_object()) {
                        errs.push_back(std::string(pbuf) + ": expected an object");
                        continue;
                    }
                    detail::Scope s(e, pbuf, errs);
                    s.integer("n", 1, 1000000000, true);
                    s.integer("s_nodes", 1, 4096, true);
                    s.num("h", 1e-9, 1e9, true);
                    s.integer("z_nodes", 16, 1000000, false, 1200);
                    s.num("z_span", 1.0, 1e6, false, 12.0);
                    s.num("smoothing", 1e-9, 1e3, true);
                    s.reject_unknown();
                }
            }
        }
    } else {  // density-criterion
        cfg.command = Command::DensityCriterion;
        if (json* sd = top.block("sde", true)) {
            detail::check_sde(*sd, "config.sde", errs);
            if (sd->contains("dim") && (*sd)["dim"].is_number_integer() &&
                (*sd)["dim"].get<int>() != 1)
                errs.push_back("config.sde.dim: density-criterion needs dim = 1");
        }
        top.num("t", 1e-9, 1e9, true);
        if (json* x = top.raw("x0", true)) {
            if (x->is_number()) *x = json::array({x->get<double>()});
            json pts = json::array({*x});
            detail::normalize_points(pts, 1, "config.x0", errs);
            *x = pts[0];
        }
        top.num("gamma", 1e-9, 1e6, true);
        top.num("m", 1e-9, 1e9, true);
        top.num("p", 1.0 + 1e-9, 64.0, true);
        top.integer("n", 10000, 1000000000, true);
        top.num("bandwidth", 1e-9, 1e3, true);
        top.num("h", 1e-9, 1e9, false, 0.004);
        top.integer("y_nodes", 3, 100000, false, 201);
        top.integer("centers", 1, 64, false, 5);
    }

    top.reject_unknown();
    if (!errs.empty()) throw ConfigError(std::move(errs));
    cfg.doc = std::move(doc);
    return cfg;
}

// --- builders (validated doc -> model objects) -----------------------------------

inline SubordinatorSpec build_subordinator(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gamma")
        return SubordinatorSpec::gamma(j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "stable") return SubordinatorSpec::stable(j.at("rho").get<double>());
    return SubordinatorSpec::drift_only(j.at("c").get<double>());
}

inline NoiseSpec build_noise(const json& j) {
    const int d = j.at("dim").get<int>();
    HeatKernelSpec hk;
    if (j.contains("q")) {
        Matrix q(d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) q(r, c) = j.at("q")[r][c].get<double>();
        hk = HeatKernelSpec::with_covariance(q);
    } else {
        hk = HeatKernelSpec::isotropic(d);
    }
    NoiseSpec noise = make_noise(hk, build_subordinator(j.at("subordinator")));
    if (j.contains("perturbation"))
        noise = with_fbm_perturbation(std::move(noise),
                                      j.at("perturbation").at("hurst").get<double>());
    return noise;
}

inline TestFunction build_test_function(const json& j, int d) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "indicator_box")
        return test_functions::indicator_box(d, j.at("radius").get<double>());
    if (kind == "indicator_interval")
        return test_functions::indicator_interval(j.at("lo").get<double>(),
                                                  j.at("hi").get<double>());
    if (kind == "half_space")
        return test_functions::half_space(d, j.at("coord").get<int>(),
                                          j.at("level").get<double>());
    if (kind == "gaussian_bump") return test_functions::gaussian_bump(d);
    if (kind == "constant") return test_functions::constant(d, j.at("value").get<double>());
    if (kind == "coordinate") return test_functions::coordinate(d, j.at("coord").get<int>());
    return test_functions::cosine(d, Vec(d, j.at("freq").get<double>()));
}

inline std::function<Vec(double, const Vec&)> build_drift(const json& j, int d) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero")
        return [d](double, const Vec&) { return Vec(d, 0.0); };
    if (kind == "constant") {
        Vec c(d);
        if (j.at("value").is_number())
            c.assign(d, j.at("value").get<double>());
        else
            for (int i = 0; i < d; ++i) c[i] = j.at("value")[i].get<double>();
        return [c](double, const Vec&) { return c; };
    }
    if (kind == "ou") {
        const double rate = j.at("rate").get<double>();
        return [rate, d](double, const Vec& x) {
            Vec b(d);
            for (int i = 0; i < d; ++i) b[i] = -rate * x[i];
            return b;
        };
    }
    const double amp = j.at("amplitude").get<double>();
    return [amp](double, const Vec& x) { return Vec{amp * std::tanh(x[0])}; };
}

inline std::function<Matrix(double, const Vec&)> build_sigma(const json& j, int d) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "scalar") {
        const double v = j.at("value").get<double>();
        return [v, d](double, const Vec&) {
            Matrix m(d);
            for (int i = 0; i < d; ++i) m(i, i) = v;
            return m;
        };
    }
    const double base = j.at("base").get<double>();
    const double slope = j.at("slope").get<double>();
    return [base, slope](double, const Vec& x) {
        Matrix m(1);
        m(0, 0) = base + slope * x[0] / (1.0 + std::fabs(x[0]));
        return m;
    };
}

inline SdeSpec build_sde(const json& j) {
    SdeSpec spec;
    spec.d = j.at("dim").get<int>();
    spec.drift = build_drift(j.at("drift"), spec.d);
    spec.drift_label = j.at("drift").at("kind").get<std::string>();
    if (j.contains("sigma")) {
        const json& sg = j.at("sigma");
        spec.sigma = build_sigma(sg, spec.d);
        spec.sigma_label = sg.at("kind").get<std::string>();
        // declared floor for sigma^T sigma, implied by the parameter ranges
        if (spec.sigma_label == "scalar")
            spec.ellipticity = sqr(sg.at("value").get<double>());
        else
            spec.ellipticity =
                sqr(sg.at("base").get<double>() - std::fabs(sg.at("slope").get<double>()));
    }
    spec.noise = build_noise(j.at("noise"));
    spec.growth = j.at("growth").get<std::string>() == "linear" ? GrowthClass::Linear
                                                                : GrowthClass::Bounded;
    return spec;
}

inline CharExponent build_psi(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "variance_gamma")
        return CharExponent::variance_gamma(j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "stable") return CharExponent::stable(j.at("alpha").get<double>());
    return CharExponent::gaussian();
}

inline Vec build_points_1d(const json& arr) {
    Vec out;
    for (const auto& e : arr) out.push_back(e[0].get<double>());
    return out;
}

inline std::vector<Vec> build_points(const json& arr) {
    std::vector<Vec> out;
    for (const auto& e : arr) {
        Vec p;
        for (const auto& c : e) p.push_back(c.get<double>());
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace levysmooth::config
