#include "heatinv/heatinv.h"

#include <cmath>
#include <new>
#include <string>

#include "heatinv/config.hpp"
#include "heatinv/error.hpp"
#include "heatinv/pipeline.hpp"
#include "heatinv/sturm_liouville.hpp"

struct hi_potential {
    heatinv::Potential q;
};

struct hi_config {
    heatinv::ExperimentConfig cfg;
};

struct hi_report {
    heatinv::RunReport rep;
    std::string text;
};

namespace {

thread_local std::string g_last_error;

hi_status status_of(heatinv::ErrorKind kind) {
    using heatinv::ErrorKind;
    switch (kind) {
        case ErrorKind::Config:
        case ErrorKind::InvalidArgument:
            return HI_E_CONFIG;
        case ErrorKind::Io:
            return HI_E_IO;
        default:
            return HI_E_NUMERICAL;
    }
}

template <class F>
hi_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return HI_OK;
    } catch (const heatinv::Error& e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return HI_E_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return HI_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return HI_E_INTERNAL;
    }
}

hi_status null_arg(const char* what) {
    g_last_error = std::string("null argument: ") + what;
    return HI_E_ARGUMENT;
}

}  // namespace

extern "C" {

const char* hi_last_error(void) { return g_last_error.c_str(); }

const char* hi_status_string(hi_status status) {
    switch (status) {
        case HI_OK: return "ok";
        case HI_E_ARGUMENT: return "invalid argument";
        case HI_E_CONFIG: return "configuration error";
        case HI_E_NUMERICAL: return "numerical failure";
        case HI_E_IO: return "I/O error";
        case HI_E_INTERNAL: return "internal error";
    }
    return "unknown status";
}

hi_status hi_potential_create(const double* values, size_t n_nodes, hi_potential** out) {
    if (!values) return null_arg("values");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new hi_potential{heatinv::Potential(std::vector<double>(values, values + n_nodes))};
    });
}

hi_status hi_potential_from_expression(const char* expression, size_t n_nodes, hi_potential** out) {
    if (!expression) return null_arg("expression");
    if (!out) return null_arg("out");
    return guarded([&] {
        const auto expr = heatinv::PotentialExpression::parse(expression);
        *out = new hi_potential{heatinv::Potential::from_function(n_nodes, expr)};
    });
}

void hi_potential_destroy(hi_potential* q) { delete q; }

size_t hi_potential_size(const hi_potential* q) { return q ? q->q.size() : 0; }

hi_status hi_potential_values(const hi_potential* q, double* out) {
    if (!q) return null_arg("q");
    if (!out) return null_arg("out");
    for (std::size_t i = 0; i < q->q.size(); ++i) out[i] = q->q[i];
    return HI_OK;
}

hi_status hi_solve_phi(const hi_potential* q, double nu, double* phi_end, double* dphi_end) {
    if (!q) return null_arg("q");
    return guarded([&] {
        const auto e = heatinv::solve_phi(q->q, nu);
        if (phi_end) *phi_end = e.phi_end;
        if (dphi_end) *dphi_end = e.dphi_end;
    });
}

hi_status hi_compute_spectra(const hi_potential* q, size_t j_max, double tol_root, double* lambda, double* mu) {
    if (!q) return null_arg("q");
    if (!lambda || !mu) return null_arg("lambda/mu");
    return guarded([&] {
        heatinv::SpectraOptions o;
        o.root_tol = tol_root;
        const auto sp = heatinv::compute_spectra(q->q, j_max, o);
        for (std::size_t j = 0; j < j_max; ++j) {
            lambda[j] = sp.dirichlet[j];
            mu[j] = sp.dirichlet_neumann[j];
        }
    });
}

hi_status hi_recover_potential(const double* lambda, const double* mu, size_t j_count, size_t n_nodes,
                               double tol_iter, double* q_out, size_t* iterations) {
    if (!lambda || !mu) return null_arg("lambda/mu");
    if (!q_out) return null_arg("q_out");
    return guarded([&] {
        heatinv::SpectralPair sp;
        sp.dirichlet.assign(lambda, lambda + j_count);
        sp.dirichlet_neumann.assign(mu, mu + j_count);
        heatinv::ReconstructOptions o;
        o.iteration.tol = tol_iter;
        const auto r = heatinv::reconstruct(sp, n_nodes, o);
        for (std::size_t i = 0; i < n_nodes; ++i) q_out[i] = r.potential.q[i];
        if (iterations) *iterations = r.iteration.iterations;
    });
}

hi_status hi_config_create(hi_config** out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = new hi_config{}; });
}

void hi_config_destroy(hi_config* cfg) { delete cfg; }

hi_status hi_config_set(hi_config* cfg, const char* key, const char* value) {
    if (!cfg) return null_arg("cfg");
    if (!key || !value) return null_arg("key/value");
    return guarded([&] { cfg->cfg.set(key, value); });
}

hi_status hi_config_load_file(hi_config* cfg, const char* path) {
    if (!cfg) return null_arg("cfg");
    if (!path) return null_arg("path");
    return guarded([&] { cfg->cfg.load_file(path); });
}

hi_status hi_config_validate(const hi_config* cfg) {
    if (!cfg) return null_arg("cfg");
    return guarded([&] { cfg->cfg.validate(); });
}

hi_status hi_run(const hi_config* cfg, const char* command, hi_report** report) {
    if (!cfg) return null_arg("cfg");
    if (!command) return null_arg("command");
    return guarded([&] {
        auto rep = heatinv::run_command(cfg->cfg, command);
        if (report) {
            std::string text = rep.text();
            *report = new hi_report{std::move(rep), std::move(text)};
        }
    });
}

void hi_report_destroy(hi_report* report) { delete report; }

const char* hi_report_text(const hi_report* report) { return report ? report->text.c_str() : ""; }

hi_status hi_report_metric(const hi_report* report, const char* name, double* value) {
    if (!report) return null_arg("report");
    if (!name || !value) return null_arg("name/value");
    const double v = report->rep.metric(name);
    if (std::isnan(v)) {
        g_last_error = std::string("no metric named '") + name + "'";
        return HI_E_ARGUMENT;
    }
    *value = v;
    return HI_OK;
}

size_t hi_report_iterations(const hi_report* report) { return report ? report->rep.norm_history.size() : 0; }

}  // extern "C"
