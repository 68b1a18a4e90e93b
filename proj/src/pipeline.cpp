#include "heatinv/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "heatinv/error.hpp"
#include "heatinv/heat_sim.hpp"
#include "heatinv/spectral_extract.hpp"

namespace heatinv {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class F>
auto staged(const std::string& stage, RunReport& rep, F&& f) {
    const auto t0 = Clock::now();
    try {
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            rep.timings.emplace_back(stage, std::chrono::duration<double>(Clock::now() - t0).count());
        } else {
            auto r = f();
            rep.timings.emplace_back(stage, std::chrono::duration<double>(Clock::now() - t0).count());
            return r;
        }
    } catch (const Error& e) {
        rethrow_with_stage(stage, e);
    }
}

class Table {
public:
    Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
    void row(const std::vector<double>& values) { rows_.push_back(values); }

    void write(const fs::path& path, const std::string& title, const std::string& echo) const {
        std::ofstream out(path);
        if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
        out << "# " << title << "\n";
        std::istringstream lines(echo);
        std::string line;
        while (std::getline(lines, line)) out << "# " << line << "\n";
        for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "\t" : "") << columns_[c];
        out << "\n";
        for (const auto& r : rows_) {
            for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "\t" : "") << fmt(r[c]);
            out << "\n";
        }
        if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

struct Output {
    fs::path dir;
    std::string echo;
    RunReport* rep;

    void put(const std::string& name, const Table& t, const std::string& title) const {
        t.write(dir / name, title, echo);
        rep->files.push_back(name);
    }
};

Output open_output(const ExperimentConfig& cfg, RunReport& rep) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw Error(ErrorKind::Io, "[io] cannot create output directory '" + cfg.out + "': " + ec.message());
    return {fs::path(cfg.out), rep.config_echo, &rep};
}

void finish(const Output& o, const RunReport& rep) {
    std::ofstream out(o.dir / "report.txt");
    if (!out) throw Error(ErrorKind::Io, "[io] cannot write report.txt");
    out << rep.text();
}

RunReport start(const ExperimentConfig& cfg, const std::string& command) {
    try {
        cfg.validate();
    } catch (const Error& e) {
        rethrow_with_stage("config", e);
    }
    RunReport rep;
    rep.command = command;
    rep.config_echo = cfg.echo();
    rep.show_timings = cfg.timings;
    return rep;
}

SpectraOptions spectra_options(const ExperimentConfig& cfg) {
    SpectraOptions o;
    o.root_tol = cfg.tol_root;
    o.seed_free = cfg.seed_free;
    return o;
}

double synthetic_nu_hi(const Potential& q, std::size_t j_max) {
    const double w = (static_cast<double>(j_max) + 1.0) * std::numbers::pi;
    return w * w + 2.0 * q.max_abs() + 50.0;
}

double simulation_t_end(const ExperimentConfig& cfg) {
    return cfg.t_end > 0.0 ? cfg.t_end : default_t_end(cfg.pulse_T, cfg.lambdas);
}

PulseRecord run_simulation(const ExperimentConfig& cfg, const Potential& q, RunReport& rep) {
    return staged("simulate", rep, [&] {
        PulseRecord rec = simulate(q, cfg.make_pulse(), simulation_t_end(cfg), cfg.m_steps);
        if (rec.growth_detected) rep.warnings.push_back("late-time flux grows: a negative eigenvalue is present");
        return rec;
    });
}

Table laplace_table(const ExperimentConfig& cfg, const PulseRecord& rec, RunReport& rep) {
    Table t({"lambda", "A", "B", "B0", "B_over_A", "B0_over_A"});
    std::vector<LaplaceSample> samples;
    double amax = 0.0;
    for (double lam : cfg.lambdas) {
        samples.push_back(laplace_transform(rec, lam, cfg.tol_quad));
        amax = std::max(amax, std::abs(samples.back().A));
    }
    for (const LaplaceSample& s : samples) {
        if (std::abs(s.A) < 1e-12 * amax) {
            rep.warnings.push_back("lambda=" + fmt(s.lambda) + " skipped: A(lambda) vanishes");
            continue;
        }
        if (s.truncation_warning) {
            rep.warnings.push_back("lambda=" + fmt(s.lambda) + ": Laplace tail estimate " + fmt(s.tail_estimate));
        }
        t.row({s.lambda, s.A, s.B, s.B0, s.B / s.A, s.B0 / s.A});
    }
    return t;
}

Table spectra_table(const SpectralPair& sp) {
    Table t({"j", "lambda", "mu"});
    for (std::size_t j = 0; j < sp.count(); ++j) t.row({static_cast<double>(j + 1), sp.dirichlet[j], sp.dirichlet_neumann[j]});
    return t;
}

std::vector<std::vector<double>> read_columns(const std::string& path, std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open input '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (header.empty()) {
            std::string name;
            while (ls >> name) header.push_back(name);
            continue;
        }
        std::vector<double> r;
        std::string cell;
        while (ls >> cell) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (*end != '\0') throw Error(ErrorKind::Io, "non-numeric cell '" + cell + "' in '" + path + "'");
            r.push_back(v);
        }
        if (r.size() != header.size()) throw Error(ErrorKind::Io, "ragged row in '" + path + "'");
        rows.push_back(r);
    }
    if (header.empty()) throw Error(ErrorKind::Io, "input '" + path + "' has no header line");
    return rows;
}

void record_reconstruction(const Reconstruction& r, RunReport& rep) {
    rep.set("gram_condition_K1", r.k1.gram.condition_estimate);
    rep.set("gram_condition_K1x", r.k1x.gram.condition_estimate);
    rep.set("mean_estimate", r.k1.mean_estimate);
    rep.set("K11", r.k1.k11);
    double res1 = 0.0, res2 = 0.0;
    for (double v : r.k1.residuals) res1 = std::max(res1, std::abs(v));
    for (double v : r.k1x.residuals) res2 = std::max(res2, std::abs(v));
    rep.set("residual_K1_equations", res1);
    rep.set("residual_K1x_equations", res2);
    rep.set("iterations", static_cast<double>(r.iteration.iterations));
    rep.set("contraction", r.iteration.contraction);
    rep.set("fixed_point_residual", r.iteration.fixed_point_residual);
    rep.set("diagonal_residual", r.potential.diagonal_residual);
    rep.norm_history = r.iteration.norms;
    if (r.k1.gram.ill_conditioned || r.k1x.gram.ill_conditioned) {
        rep.warnings.push_back("Gram condition estimate above the configured ceiling");
    }
}

void write_reconstruction(const Output& o, const ExperimentConfig& cfg, const Reconstruction& r,
                          const Potential* truth, RunReport& rep) {
    Table kb({"y", "K1", "K1x", "K1y"});
    const BoundaryKernel& bk = r.boundary;
    for (std::size_t i = 0; i < bk.n_nodes; ++i) {
        kb.row({static_cast<double>(i) / static_cast<double>(bk.n_nodes - 1), bk.K1[i], bk.K1x[i], bk.K1y[i]});
    }
    o.put("kernel_boundary.tsv", kb, "boundary kernel traces");

    const Potential& qr = r.potential.q;
    Table qt(truth ? std::vector<std::string>{"x", "q_true", "q_rec"} : std::vector<std::string>{"x", "q_rec"});
    double emax = 0.0, esq = 0.0;
    for (std::size_t i = 0; i < qr.size(); ++i) {
        if (truth) {
            const double e = qr[i] - (*truth)[i];
            emax = std::max(emax, std::abs(e));
            esq += e * e;
            qt.row({qr.node(i), (*truth)[i], qr[i]});
        } else {
            qt.row({qr.node(i), qr[i]});
        }
    }
    o.put("q_recovered.tsv", qt, "recovered potential");
    if (truth) {
        rep.set("error_max", emax);
        rep.set("error_rms", std::sqrt(esq / static_cast<double>(qr.size())));
    }
    (void)cfg;
}

SpectralPair spectra_from_trace(const ExperimentConfig& cfg, const Potential& q, RunReport& rep,
                                const PulseRecord* rec) {
    ExtractOptions eo;
    eo.root_tol = cfg.tol_root;
    if (rec == nullptr) {
        return staged("extract", rep, [&] {
            const RatioTrace tr = synthetic_trace(q, RatioKind::FluxFar, synthetic_nu_hi(q, cfg.j_max));
            return extract_two_spectra(tr, cfg.j_max, eo);
        });
    }
    return staged("extract", rep, [&] {
        const RatioTrace tr = measured_trace(*rec, RatioKind::FluxFar, cfg.j_max);
        rep.set("fit_residual", tr.fit_residual);
        return extract_two_spectra(tr, cfg.j_max, eo);
    });
}

}  // namespace

void RunReport::set(const std::string& name, double value) {
    for (auto& [k, v] : metrics) {
        if (k == name) {
            v = value;
            return;
        }
    }
    metrics.emplace_back(name, value);
}

double RunReport::metric(const std::string& name) const {
    for (const auto& [k, v] : metrics)
        if (k == name) return v;
    return std::numeric_limits<double>::quiet_NaN();
}

std::string RunReport::text() const {
    std::ostringstream os;
    os << "command = " << command << "\n\n[config]\n" << config_echo;
    if (spectra.count() > 0) {
        os << "\n[spectra]\nj\tlambda\tmu\n";
        for (std::size_t j = 0; j < spectra.count(); ++j) {
            os << j + 1 << "\t" << fmt(spectra.dirichlet[j]) << "\t" << fmt(spectra.dirichlet_neumann[j]) << "\n";
        }
    }
    if (!metrics.empty()) {
        os << "\n[metrics]\n";
        for (const auto& [k, v] : metrics) os << k << " = " << fmt(v) << "\n";
    }
    if (!norm_history.empty()) {
        os << "\n[iteration]\nk\tupdate_norm\n";
        for (std::size_t k = 0; k < norm_history.size(); ++k) os << k + 1 << "\t" << fmt(norm_history[k]) << "\n";
    }
    if (!warnings.empty()) {
        os << "\n[warnings]\n";
        for (const auto& w : warnings) os << w << "\n";
    }
    if (!files.empty()) {
        os << "\n[files]\n";
        for (const auto& f : files) os << f << "\n";
    }
    if (show_timings) {
        os << "\n[timings]\n";
        for (const auto& [k, v] : timings) os << k << " = " << fmt(v) << " s\n";
    }
    return os.str();
}

ReconstructOptions reconstruct_options(const ExperimentConfig& cfg) {
    ReconstructOptions o;
    o.recovery.tail_factor = cfg.tail_factor;
    o.iteration.tol = cfg.tol_iter;
    o.iteration.max_iter = cfg.max_iter;
    return o;
}

Reconstruction reconstruct(const SpectralPair& spectra, std::size_t n_nodes, const ReconstructOptions& opts) {
    Reconstruction r;
    try {
        r.k1 = recover_K1(spectra.dirichlet, opts.recovery);
        r.k1x = recover_K1x(spectra.dirichlet_neumann, r.k1, opts.recovery);
        r.boundary = sample_boundary(r.k1, r.k1x, n_nodes);
    } catch (const Error& e) {
        rethrow_with_stage("kernel", e);
    }
    try {
        const SourceTerm src = build_source(r.boundary);
        r.iteration = solve_fixed_point(src, opts.iteration);
        r.potential = extract_potential(r.iteration.state);
    } catch (const Error& e) {
        rethrow_with_stage("volterra", e);
    }
    return r;
}

RunReport cmd_forward(const ExperimentConfig& cfg) {
    RunReport rep = start(cfg, "forward");
    const Potential q = staged("potential", rep, [&] { return cfg.make_potential(); });
    const Output o = open_output(cfg, rep);
    rep.spectra = staged("spectra", rep, [&] { return compute_spectra(q, cfg.j_max, spectra_options(cfg)); });
    o.put("spectra.tsv", spectra_table(rep.spectra), "spectra");
    const PulseRecord rec = run_simulation(cfg, q, rep);
    Table pt({"t", "a", "b", "b0"});
    for (std::size_t i = 0; i < rec.t.size(); ++i) pt.row({rec.t[i], rec.a[i], rec.b[i], rec.b0[i]});
    o.put("pulse.tsv", pt, "pulse record");
    o.put("laplace.tsv", staged("laplace", rep, [&] { return laplace_table(cfg, rec, rep); }), "Laplace samples");
    rep.set("integral_q", q.integral());
    finish(o, rep);
    return rep;
}

RunReport cmd_invert(const ExperimentConfig& cfg) {
    RunReport rep = start(cfg, "invert");
    if (cfg.input.empty()) throw Error(ErrorKind::Config, "[config] invert needs an input file (--input)");
    std::vector<std::string> header;
    const auto rows = staged("input", rep, [&] { return read_columns(cfg.input, header); });
    const Output o = open_output(cfg, rep);

    if (header.size() >= 3 && header[0] == "j" && header[1] == "lambda" && header[2] == "mu") {
        for (const auto& r : rows) {
            rep.spectra.dirichlet.push_back(r[1]);
            rep.spectra.dirichlet_neumann.push_back(r[2]);
        }
    } else if (header.size() >= 4 && header[0] == "t" && header[1] == "a" && header[2] == "b" && header[3] == "b0") {
        PulseRecord rec;
        rec.support = cfg.pulse_T;
        for (const auto& r : rows) {
            rec.t.push_back(r[0]);
            rec.a.push_back(r[1]);
            rec.b.push_back(r[2]);
            rec.b0.push_back(r[3]);
        }
        rep.spectra = spectra_from_trace(cfg, Potential::constant(3, 0.0), rep, &rec);
    } else {
        throw Error(ErrorKind::Io, "[input] unrecognised columns in '" + cfg.input +
                                       "' (expected j lambda mu or t a b b0)");
    }
    if (rep.spectra.count() < 1) throw Error(ErrorKind::Io, "[input] no rows in '" + cfg.input + "'");

    const Reconstruction r = staged("reconstruct", rep, [&] {
        return reconstruct(rep.spectra, cfg.n_nodes, reconstruct_options(cfg));
    });
    record_reconstruction(r, rep);
    if (cfg.truth_known) {
        const Potential truth = cfg.make_potential();
        write_reconstruction(o, cfg, r, &truth, rep);
    } else {
        write_reconstruction(o, cfg, r, nullptr, rep);
    }
    finish(o, rep);
    return rep;
}

RunReport cmd_roundtrip(const ExperimentConfig& cfg) {
    RunReport rep = start(cfg, "roundtrip");
    const Potential q = staged("potential", rep, [&] { return cfg.make_potential(); });
    const Output o = open_output(cfg, rep);
    const SpectralPair exact = staged("spectra", rep, [&] { return compute_spectra(q, cfg.j_max, spectra_options(cfg)); });
    if (cfg.mode == "measured") {
        const PulseRecord rec = run_simulation(cfg, q, rep);
        rep.spectra = spectra_from_trace(cfg, q, rep, &rec);
    } else {
        rep.spectra = spectra_from_trace(cfg, q, rep, nullptr);
    }
    double dl = 0.0, dm = 0.0;
    for (std::size_t j = 0; j < exact.count(); ++j) {
        dl = std::max(dl, std::abs(rep.spectra.dirichlet[j] - exact.dirichlet[j]));
        dm = std::max(dm, std::abs(rep.spectra.dirichlet_neumann[j] - exact.dirichlet_neumann[j]));
    }
    rep.set("extraction_error_lambda", dl);
    rep.set("extraction_error_mu", dm);
    o.put("spectra.tsv", spectra_table(rep.spectra), "extracted spectra");

    const Reconstruction r = staged("reconstruct", rep, [&] {
        return reconstruct(rep.spectra, cfg.n_nodes, reconstruct_options(cfg));
    });
    record_reconstruction(r, rep);
    write_reconstruction(o, cfg, r, &q, rep);
    rep.set("integral_q", q.integral());
    finish(o, rep);
    return rep;
}

RunReport cmd_nonuniqueness(const ExperimentConfig& cfg) {
    RunReport rep = start(cfg, "nonuniqueness");
    const Potential q = staged("potential", rep, [&] { return cfg.make_potential(); });
    const double asym = q.asymmetry();
    rep.set("asymmetry", asym);
    if (asym <= 1e-8 * std::max(1.0, q.max_abs())) {
        throw Error(ErrorKind::Config, "[config] potential is symmetric about x = 1/2 (max|q(x) - q(1-x)| = " +
                                           fmt(asym) + "); the experiment needs an asymmetric q");
    }
    const Potential qr = q.reflected();
    const Output o = open_output(cfg, rep);
    const SpectraOptions so = spectra_options(cfg);
    rep.spectra = staged("spectra", rep, [&] { return compute_spectra(q, cfg.j_max, so); });
    const SpectralPair sr = staged("spectra_reflected", rep, [&] { return compute_spectra(qr, cfg.j_max, so); });

    Table st({"j", "lambda", "lambda_reflected", "mu", "mu_reflected"});
    double dl = 0.0, dm = 0.0;
    for (std::size_t j = 0; j < cfg.j_max; ++j) {
        dl = std::max(dl, std::abs(rep.spectra.dirichlet[j] - sr.dirichlet[j]));
        dm = std::max(dm, std::abs(rep.spectra.dirichlet_neumann[j] - sr.dirichlet_neumann[j]));
        st.row({static_cast<double>(j + 1), rep.spectra.dirichlet[j], sr.dirichlet[j], rep.spectra.dirichlet_neumann[j],
                sr.dirichlet_neumann[j]});
    }
    rep.set("dirichlet_max_diff", dl);
    rep.set("dirichlet_neumann_max_diff", dm);
    rep.set("mu1_diff", rep.spectra.dirichlet_neumann[0] - sr.dirichlet_neumann[0]);
    o.put("nonuniqueness.tsv", st, "spectra of q and of q(1-x)");

    const PulseRecord ra = run_simulation(cfg, q, rep);
    const PulseRecord rb = run_simulation(cfg, qr, rep);
    Table rt({"lambda", "B0_over_A", "B0_over_A_reflected", "B_over_A", "B_over_A_reflected"});
    double near = 0.0, far = 0.0;
    for (double lam : cfg.lambdas) {
        const LaplaceSample a = laplace_transform(ra, lam, cfg.tol_quad);
        const LaplaceSample b = laplace_transform(rb, lam, cfg.tol_quad);
        const double na = a.B0 / a.A, nb = b.B0 / b.A, fa = a.B / a.A, fb = b.B / b.A;
        near = std::max(near, std::abs(na - nb) / std::abs(na));
        far = std::max(far, std::abs(fa - fb) / std::abs(fa));
        rt.row({lam, na, nb, fa, fb});
    }
    rep.set("near_ratio_max_rel_diff", near);
    rep.set("far_ratio_max_rel_diff", far);
    o.put("nonuniqueness_ratios.tsv", rt, "flux ratios of q and of q(1-x)");
    finish(o, rep);
    return rep;
}

RunReport cmd_plot_data(const ExperimentConfig& cfg) {
    RunReport rep = cmd_roundtrip(cfg);
    rep.command = "plot-data";
    rep.files.clear();
    const Output o = open_output(cfg, rep);
    const Potential q = cfg.make_potential();

    Table tr({"nu", "B_over_A", "B0_over_A"});
    const double lo = -negative_floor(q.max_abs());
    const double hi = rep.spectra.dirichlet.back() + 0.5 * (rep.spectra.dirichlet.back() - rep.spectra.dirichlet_neumann.back());
    const std::size_t samples = 4000;
    for (std::size_t i = 0; i <= samples; ++i) {
        const double nu = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples);
        const PhiEvaluation e = solve_phi(q, nu);
        tr.row({nu, e.dphi_end / e.phi_end, 1.0 / e.phi_end});
    }
    o.put("ratio_trace.tsv", tr, "ratio traces B/A and B0/A against nu = -lambda");

    Table cv({"iteration", "update_norm"});
    for (std::size_t k = 0; k < rep.norm_history.size(); ++k) cv.row({static_cast<double>(k + 1), rep.norm_history[k]});
    o.put("convergence.tsv", cv, "fixed-point update norms");

    const BoundaryKernel oracle = goursat_boundary(q);
    Table ko({"y", "K1_goursat", "K1x_goursat", "K1y_goursat"});
    for (std::size_t i = 0; i < oracle.n_nodes; ++i) {
        ko.row({q.node(i), oracle.K1[i], oracle.K1x[i], oracle.K1y[i]});
    }
    o.put("kernel_oracle.tsv", ko, "boundary traces of the Goursat kernel");
    rep.files.insert(rep.files.begin(), {"spectra.tsv", "kernel_boundary.tsv", "q_recovered.tsv"});
    finish(o, rep);
    return rep;
}

RunReport run_command(const ExperimentConfig& cfg, const std::string& command) {
    if (command == "forward") return cmd_forward(cfg);
    if (command == "invert") return cmd_invert(cfg);
    if (command == "roundtrip") return cmd_roundtrip(cfg);
    if (command == "nonuniqueness") return cmd_nonuniqueness(cfg);
    if (command == "plot-data") return cmd_plot_data(cfg);
    throw Error(ErrorKind::Config, "[config] unknown command '" + command + "'");
}

}  // namespace heatinv
