// levysmooth <command> --config cfg.json [--out dir] [--threads N] [--seed S]
//
// Thin shell around cli::run: reads the config, applies flag overrides, runs,
// writes artifacts + manifest, exits 0/2/1 per the status contract. A small
// `kernel` subcommand evaluates heat-kernel values directly for debugging.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"

#include "levysmooth/cli.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;   // -1: keep config value
    int threads = -1;
    bool flag_out = false;
};

void add_common(CLI::App* sc, CommonFlags& fl) {
    sc->add_option("--config", fl.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sc->add_option("--out", fl.out_dir, "output directory (default: config \"out\")");
    sc->add_option("--threads", fl.threads, "worker threads (0 = logical cores)")
        ->envname("LEVYSMOOTH_THREADS");
    sc->add_option("--seed", fl.seed, "override the config seed");
}

int run_experiment(const std::string& cmd_name, const CommonFlags& fl) {
    std::ifstream is(fl.config_path);
    std::stringstream ss;
    ss << is.rdbuf();
    if (!is) {
        std::fprintf(stderr, "error: cannot read %s\n", fl.config_path.c_str());
        return 1;
    }

    levysmooth::config::ExperimentConfig cfg;
    try {
        cfg = levysmooth::config::parse_config(ss.str());
    } catch (const levysmooth::config::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
    if (levysmooth::config::to_string(cfg.command) != cmd_name) {
        std::fprintf(stderr, "error: config declares command \"%s\" but \"%s\" was invoked\n",
                     levysmooth::config::to_string(cfg.command), cmd_name.c_str());
        return 1;
    }
    if (fl.seed >= 0) cfg.doc["seed"] = static_cast<std::uint64_t>(fl.seed);
    if (fl.threads >= 0) cfg.doc["threads"] = fl.threads;
    if (!fl.out_dir.empty()) cfg.doc["out"] = fl.out_dir;

    const auto t0 = std::chrono::steady_clock::now();
    levysmooth::cli::RunResult res;
    try {
        res = levysmooth::cli::run(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (int rc = levysmooth::cli::write_report(cfg, res, cfg.out_dir(), wall)) return rc;
    for (const auto& line : res.notes) std::printf("%s\n", line.c_str());
    std::printf("wrote %zu artifact(s) to %s  [%.2fs]\n", res.artifacts.size() + 2,
                cfg.out_dir().c_str(), wall);
    return levysmooth::cli::exit_code(res, cfg);
}

int run_kernel_eval(double t, const std::vector<double>& y, const std::vector<int>& alpha) {
    using namespace levysmooth;
    const int d = static_cast<int>(y.size());
    try {
        HeatKernelSpec hk = HeatKernelSpec::isotropic(d);
        if (alpha.empty()) {
            std::printf("p_t(y) = %.17g\n", heat_kernel(hk, t, y));
        } else {
            MultiIndex mi{alpha};
            std::printf("d^alpha p_t(y) = %.17g\n", heat_kernel_partial(hk, t, y, mi));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"subordinated-Levy semigroup experiments"};
    app.require_subcommand(1);

    const char* names[] = {"moments",  "density",   "smooth-check", "holder",
                           "spectral", "sde-check", "duhamel",      "density-criterion"};
    const char* descs[] = {"negative moments E T_t^-p of a subordinator",
                           "marginal density of the subordinated process",
                           "derivative norm bounds ||D^k P_t f||",
                           "Hoelder seminorm of P_t f",
                           "Hartman-Wintner ratio and density threshold",
                           "Euler-Maruyama semigroup / continuity profile / path batch",
                           "Duhamel residual of the perturbed semigroup",
                           "local L_p density criterion for the SDE"};
    std::vector<CommonFlags> flags(8);
    std::vector<CLI::App*> subs;
    for (int i = 0; i < 8; ++i) {
        CLI::App* sc = app.add_subcommand(names[i], descs[i]);
        add_common(sc, flags[i]);
        subs.push_back(sc);
    }

    // debug helper: evaluate the Gaussian heat kernel directly
    double k_t = 1.0;
    std::vector<double> k_y;
    std::vector<int> k_alpha;
    CLI::App* kernel = app.add_subcommand("kernel", "evaluate the heat kernel (debug)");
    kernel->add_option("--t", k_t, "time")->required();
    kernel->add_option("--y", k_y, "evaluation point")->required()->expected(1, 3);
    kernel->add_option("--alpha", k_alpha, "derivative multi-index")->expected(0, 3);

    CLI11_PARSE(app, argc, argv);

    if (kernel->parsed()) return run_kernel_eval(k_t, k_y, k_alpha);
    for (int i = 0; i < 8; ++i)
        if (subs[i]->parsed()) return run_experiment(names[i], flags[i]);
    return 1;
}
