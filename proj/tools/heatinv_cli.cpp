#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "heatinv/heatinv.h"

namespace {

int exit_code(hi_status s) {
    switch (s) {
        case HI_OK: return 0;
        case HI_E_ARGUMENT:
        case HI_E_CONFIG: return 2;
        case HI_E_IO: return 4;
        default: return 3;
    }
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int fail(hi_status s) {
    std::fprintf(stderr, "heatinv: %s: %s\n", hi_status_string(s), hi_last_error());
    return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Recover the potential q(x) of u_t = u_xx - q u from boundary flux data"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::string> out, mode, input;
    std::optional<std::size_t> j_max, n_nodes;
    std::optional<double> tol_root, tol_iter;
    bool seed_free = false;
    bool quiet = false;
    std::vector<std::string> overrides;

    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--out", out, "output directory");
    app.add_option("--j-max", j_max, "number of eigenvalue pairs J");
    app.add_option("--n-nodes", n_nodes, "grid nodes on [0,1] (odd, >= 51)");
    app.add_option("--tol-root", tol_root, "eigenvalue root tolerance");
    app.add_option("--tol-iter", tol_iter, "fixed-point update tolerance");
    app.add_flag("--seed-free", seed_free, "seed eigenvalue brackets at the free values");
    app.add_option("--mode", mode, "synthetic or measured")->check(CLI::IsMember({"synthetic", "measured"}));
    app.add_option("--input", input, "spectra.tsv or pulse.tsv for invert");
    app.add_option("--set", overrides, "extra key=value settings (repeatable)");
    app.add_flag("-q,--quiet", quiet, "do not print the report");

    const std::vector<std::pair<std::string, std::string>> commands{
        {"forward", "compute spectra, simulate the pulse and tabulate Laplace samples"},
        {"invert", "reconstruct q from a spectra or time-series file"},
        {"roundtrip", "forward then invert, reporting the error against the true q"},
        {"nonuniqueness", "compare q with q(1-x): equal Dirichlet data, different mu"},
        {"plot-data", "roundtrip plus ratio traces, convergence and kernel oracle tables"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    hi_config* cfg = nullptr;
    hi_status s = hi_config_create(&cfg);
    if (s != HI_OK) return fail(s);
    auto set = [&](const char* key, const std::string& value) {
        if (s == HI_OK) s = hi_config_set(cfg, key, value.c_str());
    };
    if (!config_path.empty()) s = hi_config_load_file(cfg, config_path.c_str());
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "heatinv: --set expects key=value, got '%s'\n", kv.c_str());
            hi_config_destroy(cfg);
            return 2;
        }
        set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
    }
    if (out) set("out", *out);
    if (mode) set("mode", *mode);
    if (input) set("input", *input);
    if (j_max) set("j_max", std::to_string(*j_max));
    if (n_nodes) set("n_nodes", std::to_string(*n_nodes));
    if (tol_root) set("tol_root", num(*tol_root));
    if (tol_iter) set("tol_iter", num(*tol_iter));
    if (seed_free) set("seed_free", "true");
    if (s != HI_OK) {
        const int code = fail(s);
        hi_config_destroy(cfg);
        return code;
    }

    hi_report* report = nullptr;
    s = hi_run(cfg, command.c_str(), &report);
    hi_config_destroy(cfg);
    if (s != HI_OK) return fail(s);
    if (!quiet) std::fputs(hi_report_text(report), stdout);
    hi_report_destroy(report);
    return 0;
}
