#pragma once

// Experiment driver: a validated config in, report artifacts out. run() keeps
// everything in memory (CSV bodies, binary blobs) so reruns can be compared
// byte for byte; write_report() puts them on disk next to a manifest.

#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "config.hpp"

namespace levysmooth::cli {

using config::Command;
using config::ExperimentConfig;
using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

struct Artifact {
    std::string name;
    std::string body;         // CSV text, or raw bytes when binary
    bool binary = false;
};

struct RunResult {
    std::vector<Artifact> artifacts;
    std::vector<std::string> notes;  // one human line per headline result
    bool any_divergent = false;
    bool any_soft = false;  // inconclusive / unreliable / not_applicable
};

namespace detail {

inline void note_status(RunResult& r, EvalStatus s) {
    if (s == EvalStatus::Divergent)
        r.any_divergent = true;
    else if (s != EvalStatus::Ok)
        r.any_soft = true;
}

inline std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

inline Vec grid_from(const json& g) {
    const double lo = g.at("lo").get<double>(), hi = g.at("hi").get<double>();
    const int n = g.at("count").get<int>();
    Vec out(n);
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    return out;
}

}  // namespace detail

// --- per-command runners ----------------------------------------------------

inline RunResult run_moments(const ExperimentConfig& cfg) {
    RunResult res;
    const SubordinatorSpec sub = config::build_subordinator(cfg.doc.at("subordinator"));
    const Vec ts = cfg.doc.at("t").get<Vec>();
    const Vec ps = cfg.doc.at("p").get<Vec>();
    const auto n = cfg.doc.at("n").get<std::size_t>();
    const std::string method = cfg.doc.at("method").get<std::string>();

    std::vector<std::pair<std::string, MomentMethod>> methods;
    if (method == "all" || method == "quadrature")
        methods.emplace_back("quadrature", MomentMethod::Quadrature);
    if (method == "all" || method == "mc")
        methods.emplace_back("mc", MomentMethod::MonteCarlo);
    if (method == "all" || method == "closed-form")
        methods.emplace_back("closed-form", MomentMethod::ClosedForm);

    std::string csv = "t,p,method,value,stderr,status\n";
    for (double t : ts)
        for (double p : ps)
            for (const auto& [name, m] : methods) {
                MomentEstimate e =
                    negative_moment(sub, {t, p, m}, n, cfg.seed(), cfg.threads());
                detail::note_status(res, e.status);
                csv += detail::fmt("%.17g,%.17g,%s,%.17g,%.17g,%s\n", t, p, name.c_str(),
                                   e.value, e.stderr_, to_string(e.status));
                res.notes.push_back(detail::fmt("E T^-p  t=%g p=%g %s: %.9g [%s]", t, p,
                                                name.c_str(), e.value, to_string(e.status)));
            }
    res.artifacts.push_back({"moments.csv", std::move(csv), false});
    return res;
}

inline RunResult run_density(const ExperimentConfig& cfg) {
    RunResult res;
    const NoiseSpec noise = config::build_noise(cfg.doc.at("noise"));
    const Vec ts = cfg.doc.at("t").get<Vec>();
    const Vec ys = detail::grid_from(cfg.doc.at("y"));
    const std::string method = cfg.doc.at("method").get<std::string>();
    const bool mixture = method != "fourier";
    const bool fourier = method != "mixture";

    CharExponent psi;
    if (fourier) psi = char_exponent_from_noise(noise);

    std::string csv = "t,y,method,value,status\n";
    for (double t : ts) {
        double sup_gap = 0.0;
        for (double y : ys) {
            ScalarResult mx, fr;
            if (mixture) {
                mx = subordinated_density(noise, t, {y});
                detail::note_status(res, mx.status);
                csv += detail::fmt("%.17g,%.17g,mixture,%.17g,%s\n", t, y, mx.value,
                                   to_string(mx.status));
            }
            if (fourier) {
                fr = fourier_density(psi, t, {y}, 1);
                detail::note_status(res, fr.status);
                csv += detail::fmt("%.17g,%.17g,fourier,%.17g,%s\n", t, y, fr.value,
                                   to_string(fr.status));
            }
            if (mixture && fourier && mx.ok() && fr.ok())
                sup_gap = std::max(sup_gap, std::fabs(mx.value - fr.value));
        }
        if (mixture && fourier)
            res.notes.push_back(detail::fmt("t=%g  sup |mixture - fourier| = %.3g", t, sup_gap));
    }
    res.artifacts.push_back({"density.csv", std::move(csv), false});
    return res;
}

inline RunResult run_smooth_check(const ExperimentConfig& cfg) {
    RunResult res;
    const NoiseSpec noise = config::build_noise(cfg.doc.at("noise"));
    const TestFunction f = config::build_test_function(cfg.doc.at("f"), noise.heat.d);
    const Vec ts = cfg.doc.at("t").get<Vec>();
    const auto xs = config::build_points(cfg.doc.at("x"));
    const int k = cfg.doc.at("k").get<int>();
    const double l = cfg.doc.at("l").get<double>();
    const double p = cfg.doc.at("p").get<double>();
    const double q = cfg.doc.at("q").get<double>();

    SmoothingReport rep = verify_smoothing_bound(noise, f, ts, k, l, p, q, xs);
    for (const auto& row : rep.rows) detail::note_status(res, row.status);
    res.artifacts.push_back({"smooth_check.csv", smoothing_report_csv(rep), false});

    std::string sum = "k,l,p,q,fitted_constant,verdict,any_divergent\n";
    sum += detail::fmt("%d,%g,%g,%g,%.17g,%s,%d\n", rep.k, rep.l, rep.p, rep.q,
                       rep.fitted_constant, to_string(rep.verdict),
                       rep.any_divergent ? 1 : 0);
    res.artifacts.push_back({"smooth_check_summary.csv", std::move(sum), false});
    res.notes.push_back(detail::fmt("verdict: %s  fitted constant: %.4g",
                                    to_string(rep.verdict), rep.fitted_constant));
    return res;
}

inline RunResult run_holder(const ExperimentConfig& cfg) {
    RunResult res;
    const NoiseSpec noise = config::build_noise(cfg.doc.at("noise"));
    const TestFunction f = config::build_test_function(cfg.doc.at("f"), noise.heat.d);
    const Vec ts = cfg.doc.at("t").get<Vec>();
    const double beta = cfg.doc.at("beta").get<double>();
    const double p = cfg.doc.at("p").get<double>();

    std::vector<std::pair<Vec, Vec>> pairs;
    for (const auto& e : cfg.doc.at("pairs")) {
        auto pts = config::build_points(e);
        pairs.emplace_back(pts[0], pts[1]);
    }

    std::string csv = "t,beta,p,seminorm,rhs,ratio,status\n";
    for (double t : ts) {
        HolderReport rep = holder_seminorm_estimate(noise, t, f, beta, pairs, p);
        detail::note_status(res, rep.status);
        csv += detail::fmt("%.17g,%g,%g,%.17g,%.17g,%.17g,%s\n", t, beta, p, rep.seminorm,
                           rep.rhs, rep.ratio, to_string(rep.status));
        res.notes.push_back(detail::fmt("t=%g  [f]_beta = %.6g  rhs = %.6g  [%s]", t,
                                        rep.seminorm, rep.rhs, to_string(rep.status)));
    }
    res.artifacts.push_back({"holder.csv", std::move(csv), false});
    return res;
}

inline RunResult run_spectral(const ExperimentConfig& cfg) {
    RunResult res;
    CharExponent psi = cfg.doc.contains("psi")
                           ? config::build_psi(cfg.doc.at("psi"))
                           : char_exponent_from_noise(config::build_noise(cfg.doc.at("noise")));
    const int d = cfg.doc.at("dim").get<int>();
    const double max_r = cfg.doc.at("max_radius").get<double>();
    const int per_decade = cfg.doc.at("per_decade").get<int>();

    Vec radii;
    const int steps = static_cast<int>(std::ceil(per_decade * std::log10(max_r)));
    for (int i = 0; i <= steps; ++i) radii.push_back(std::pow(10.0, double(i) / per_decade));

    HwRatioReport rep = hw_ratio(psi, radii);
    ThresholdTime th = hw_threshold_time(psi, d, radii);
    if (rep.classification == HwClass::Inconclusive) res.any_soft = true;

    res.artifacts.push_back({"hw_ratio.csv", hw_ratio_csv(rep), false});
    std::string sum = "classification,limit,tail_slope,threshold_kind,t0\n";
    sum += detail::fmt("%s,%.17g,%.17g,%s,%.17g\n", to_string(rep.classification),
                       rep.limit, rep.tail_slope, to_string(th.kind), th.t0);
    res.artifacts.push_back({"spectral_summary.csv", std::move(sum), false});
    res.notes.push_back(detail::fmt("psi = %s: %s (limit %.6g), threshold %s t0 = %.6g",
                                    psi.label.c_str(), to_string(rep.classification),
                                    rep.limit, to_string(th.kind), th.t0));
    return res;
}

inline RunResult run_sde_check(const ExperimentConfig& cfg) {
    RunResult res;
    const SdeSpec spec = config::build_sde(cfg.doc.at("sde"));
    const std::string task = cfg.doc.at("task").get<std::string>();
    const double t = cfg.doc.at("t").get<double>();
    const Vec x0 = cfg.doc.at("x0").get<Vec>();
    const auto n = cfg.doc.at("n").get<std::size_t>();
    const double h = cfg.doc.at("h").get<double>();

    if (task == "semigroup") {
        const TestFunction f = config::build_test_function(cfg.doc.at("f"), spec.d);
        McSemigroupResult r = mc_semigroup(spec, t, f, x0, n, h, cfg.seed(), cfg.threads());
        detail::note_status(res, r.est.status);
        std::string csv = "t,h,n,estimate,stderr,diverged,status\n";
        csv += detail::fmt("%.17g,%.17g,%zu,%.17g,%.17g,%zu,%s\n", t, h, r.n_total,
                           r.est.value, r.est.stderr_, r.diverged, to_string(r.est.status));
        res.artifacts.push_back({"sde_semigroup.csv", std::move(csv), false});
        res.notes.push_back(detail::fmt("P_t f = %.6g +- %.2g  (%zu diverged) [%s]",
                                        r.est.value, r.est.stderr_, r.diverged,
                                        to_string(r.est.status)));
    } else if (task == "profile") {
        const TestFunction f = config::build_test_function(cfg.doc.at("f"), spec.d);
        const Vec offsets = cfg.doc.at("offsets").get<Vec>();
        const int axis = cfg.doc.at("axis").get<int>();
        ContinuityProfile prof = strong_feller_profile(spec, t, f, x0, offsets, n, h,
                                                       cfg.seed(), cfg.threads(), axis);
        res.artifacts.push_back({"continuity_profile.csv", continuity_profile_csv(prof), false});
        std::string sum = "t,h,n,spearman\n";
        sum += detail::fmt("%.17g,%.17g,%zu,%.17g\n", prof.t, prof.h, prof.n, prof.spearman);
        res.artifacts.push_back({"profile_summary.csv", std::move(sum), false});
        res.notes.push_back(detail::fmt(
            "offset sweep: diff %.4g -> %.4g, spearman %.2f (consistent with strong Feller "
            "when decreasing; not a proof)",
            prof.diffs.front(), prof.diffs.back(), prof.spearman));
    } else {  // batch
        PathBatch batch = simulate_batch(spec, x0, t, h, n, cfg.seed(), cfg.threads());
        const std::string format = cfg.doc.at("format").get<std::string>();
        if (format != "lsmb") res.artifacts.push_back({"paths.csv", path_batch_csv(batch), false});
        if (format != "csv") {
            auto bytes = path_batch_lsmb(batch);
            res.artifacts.push_back(
                {"paths.lsmb", std::string(bytes.begin(), bytes.end()), true});
        }
        std::string sum = "t,h,n,diverged\n";
        sum += detail::fmt("%.17g,%.17g,%zu,%zu\n", batch.t, batch.h, batch.n,
                           batch.diverged_count);
        res.artifacts.push_back({"batch_summary.csv", std::move(sum), false});
        if (batch.diverged_count * 100 > batch.n) res.any_soft = true;
        res.notes.push_back(
            detail::fmt("%zu paths, %zu diverged", batch.n, batch.diverged_count));
    }
    return res;
}

inline RunResult run_duhamel(const ExperimentConfig& cfg) {
    RunResult res;
    const SdeSpec spec = config::build_sde(cfg.doc.at("sde"));
    const TestFunction f = config::build_test_function(cfg.doc.at("f"), 1);
    const double t = cfg.doc.at("t").get<double>();
    const Vec xs = config::build_points_1d(cfg.doc.at("x"));

    std::string rows = "level,x,lhs,rhs,residual,status\n";
    std::string levels = "level,n,s_nodes,h,z_nodes,z_span,smoothing,sup_residual,status\n";
    int li = 0;
    double prev = kInf;
    bool monotone = true;
    double last = kNaN;
    for (const auto& lv : cfg.doc.at("levels")) {
        DuhamelControls ctl;
        ctl.n = lv.at("n").get<std::size_t>();
        ctl.s_nodes = lv.at("s_nodes").get<int>();
        ctl.h = lv.at("h").get<double>();
        ctl.z_nodes = lv.at("z_nodes").get<int>();
        ctl.z_span = lv.at("z_span").get<double>();
        ctl.smoothing = lv.at("smoothing").get<double>();
        ctl.seed = cfg.seed();
        ctl.threads = cfg.threads();
        DuhamelReport rep = duhamel_residual(spec, t, f, xs, ctl);
        detail::note_status(res, rep.status);
        for (std::size_t i = 0; i < rep.x.size(); ++i)
            rows += detail::fmt("%d,%.17g,%.17g,%.17g,%.17g,%s\n", li, rep.x[i], rep.lhs[i],
                                rep.rhs[i], rep.residual[i], to_string(rep.status));
        levels += detail::fmt("%d,%zu,%d,%.17g,%d,%.17g,%.17g,%.17g,%s\n", li, ctl.n,
                              ctl.s_nodes, ctl.h, ctl.z_nodes, ctl.z_span, ctl.smoothing,
                              rep.sup_residual, to_string(rep.status));
        res.notes.push_back(detail::fmt("level %d: sup residual %.6g [%s]", li,
                                        rep.sup_residual, to_string(rep.status)));
        if (rep.status == EvalStatus::Ok) {
            if (!(rep.sup_residual < prev)) monotone = false;
            prev = rep.sup_residual;
            last = rep.sup_residual;
        }
        ++li;
    }
    if (li > 1)
        res.notes.push_back(detail::fmt("refinement %s, final sup residual %.6g",
                                        monotone ? "monotone" : "NOT monotone", last));
    res.artifacts.push_back({"duhamel.csv", std::move(rows), false});
    res.artifacts.push_back({"duhamel_levels.csv", std::move(levels), false});
    return res;
}

inline RunResult run_density_criterion(const ExperimentConfig& cfg) {
    RunResult res;
    const SdeSpec spec = config::build_sde(cfg.doc.at("sde"));
    const double t = cfg.doc.at("t").get<double>();
    const Vec x0 = cfg.doc.at("x0").get<Vec>();
    const double gamma = cfg.doc.at("gamma").get<double>();
    const double big_m = cfg.doc.at("m").get<double>();
    const double p = cfg.doc.at("p").get<double>();
    const auto n = cfg.doc.at("n").get<std::size_t>();
    const double bw = cfg.doc.at("bandwidth").get<double>();

    LocalLpOptions opt;
    opt.y_nodes = cfg.doc.at("y_nodes").get<int>();
    opt.h = cfg.doc.at("h").get<double>();
    opt.centers = cfg.doc.at("centers").get<int>();
    opt.seed = cfg.seed();
    opt.threads = cfg.threads();

    LocalLpReport rep = local_lp_criterion(spec, t, x0, gamma, big_m, p, n, bw, opt);
    detail::note_status(res, rep.status);

    std::string csv = "t,x0,gamma,m,p,n,bandwidth,sup_integral,sup_doubled,ratio,status\n";
    csv += detail::fmt("%.17g,%.17g,%g,%g,%g,%zu,%g,%.17g,%.17g,%.17g,%s\n", t, x0[0], gamma,
                       big_m, p, n, bw, rep.sup_integral, rep.sup_doubled, rep.ratio,
                       to_string(rep.status));
    res.artifacts.push_back({"density_criterion.csv", std::move(csv), false});

    std::string centers = "center,lp_integral\n";
    for (int i = 0; i < opt.centers; ++i) {
        const double c = opt.centers == 1
                             ? x0[0]
                             : x0[0] + gamma * (2.0 * i / (opt.centers - 1) - 1.0);
        centers += detail::fmt("%.17g,%.17g\n", c, rep.center_values[i]);
    }
    res.artifacts.push_back({"density_criterion_centers.csv", std::move(centers), false});
    res.notes.push_back(detail::fmt("sup int qhat^p = %.6g (doubled: %.6g, ratio %.3f) [%s]",
                                    rep.sup_integral, rep.sup_doubled, rep.ratio,
                                    to_string(rep.status)));
    return res;
}

// --- dispatch / report ---------------------------------------------------------

inline RunResult run(const ExperimentConfig& cfg) {
    switch (cfg.command) {
        case Command::Moments: return run_moments(cfg);
        case Command::Density: return run_density(cfg);
        case Command::SmoothCheck: return run_smooth_check(cfg);
        case Command::Holder: return run_holder(cfg);
        case Command::Spectral: return run_spectral(cfg);
        case Command::SdeCheck: return run_sde_check(cfg);
        case Command::Duhamel: return run_duhamel(cfg);
        case Command::DensityCriterion: return run_density_criterion(cfg);
    }
    throw std::logic_error("run: unknown command");
}

inline int exit_code(const RunResult& r, const ExperimentConfig& cfg) {
    if (r.any_divergent && !cfg.allow_divergent()) return 2;
    if (r.any_soft) return 2;
    return 0;
}

inline json make_manifest(const ExperimentConfig& cfg, double wall_time_s) {
    json m;
    m["command"] = config::to_string(cfg.command);
    m["config_hash"] = config::config_hash(cfg);
    m["seed"] = cfg.seed();
    m["versions"] = {{"levysmooth", kVersion},
                     {"nlohmann_json", detail::fmt("%d.%d.%d", NLOHMANN_JSON_VERSION_MAJOR,
                                                   NLOHMANN_JSON_VERSION_MINOR,
                                                   NLOHMANN_JSON_VERSION_PATCH)}};
    m["wall_time_s"] = wall_time_s;
    return m;
}

// Writes artifacts + manifest.json + effective_config.json. Returns 0, or 1
// on any I/O failure.
inline int write_report(const ExperimentConfig& cfg, const RunResult& res,
                        const std::string& out_dir, double wall_time_s) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::fprintf(stderr, "error: cannot create %s: %s\n", out_dir.c_str(),
                     ec.message().c_str());
        return 1;
    }
    auto put = [&](const std::string& name, const std::string& body) {
        std::ofstream os(fs::path(out_dir) / name, std::ios::binary);
        os.write(body.data(), static_cast<std::streamsize>(body.size()));
        if (!os) {
            std::fprintf(stderr, "error: cannot write %s\n", name.c_str());
            return false;
        }
        return true;
    };
    for (const auto& a : res.artifacts)
        if (!put(a.name, a.body)) return 1;
    if (!put("manifest.json", make_manifest(cfg, wall_time_s).dump(2) + "\n")) return 1;
    if (!put("effective_config.json", config::serialize(cfg))) return 1;
    return 0;
}

}  // namespace levysmooth::cli
