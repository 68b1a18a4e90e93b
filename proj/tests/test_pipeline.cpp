#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>
#include <string>

#include "heatinv/error.hpp"
#include "heatinv/pipeline.hpp"

using namespace heatinv;
namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("heatinv_pipeline_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::InternalConsistency;
}

}  // namespace

TEST_CASE("potential expressions", "[config]") {
    const auto e = PotentialExpression::parse("1 + 2*x - 0.5*sin(2*pi*x) + cos(pi*x)");
    const double x = 0.3;
    CHECK_THAT(e(x), WithinAbs(1 + 2 * x - 0.5 * std::sin(2 * M_PI * x) + std::cos(M_PI * x), 1e-14));
    CHECK_THAT(PotentialExpression::parse("x")(0.25), WithinAbs(0.25, 1e-15));
    CHECK_THAT(PotentialExpression::parse("-3")(0.7), WithinAbs(-3.0, 1e-15));
    CHECK(kind_of([] { PotentialExpression::parse("exp(x)"); }) == ErrorKind::Config);
    CHECK(kind_of([] { PotentialExpression::parse("x*x"); }) == ErrorKind::Config);
    CHECK(kind_of([] { PotentialExpression::parse(""); }) == ErrorKind::Config);
}

TEST_CASE("config text round trips through echo", "[config]") {
    ExperimentConfig a;
    a.load_text("# comment\npotential = 1 + x\nn_nodes = 101\nj_max = 8\nlambdas = 1, 2,4\npulse_shape = sine2\n");
    CHECK(a.truth_known);
    CHECK(a.n_nodes == 101);
    CHECK(a.lambdas.size() == 3);
    ExperimentConfig b;
    b.load_text(a.echo());
    CHECK(b.echo() == a.echo());
    CHECK(a.make_pulse().shape == PulseShape::SineSquared);
}

TEST_CASE("config validation", "[config]") {
    ExperimentConfig c;
    CHECK(kind_of([&] { c.set("bogus", "1"); }) == ErrorKind::Config);
    CHECK(kind_of([&] { c.set("n_nodes", "abc"); }) == ErrorKind::Config);
    auto invalid = [](const std::string& key, const std::string& value) {
        ExperimentConfig k;
        k.set(key, value);
        return kind_of([&] { k.validate(); }) == ErrorKind::Config;
    };
    CHECK(invalid("n_nodes", "200"));
    CHECK(invalid("n_nodes", "21"));
    CHECK(invalid("j_max", "2"));
    CHECK(invalid("tol_iter", "0"));
    CHECK(invalid("pulse_shape", "zero"));
    CHECK(invalid("pulse_amplitude", "0"));
    ExperimentConfig ok;
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("potential file input", "[config]") {
    const fs::path dir = scratch("qfile");
    {
        std::ofstream f(dir / "q.tsv");
        f << "x\tq\n";
        for (int i = 0; i <= 50; ++i) f << i / 50.0 << "\t" << 2.0 * i / 50.0 << "\n";
    }
    const Potential p = read_potential_file((dir / "q.tsv").string());
    CHECK(p.size() == 51);
    CHECK_THAT(p.integral(), WithinAbs(1.0, 1e-12));
    {
        std::ofstream f(dir / "bad.tsv");
        f << "0 1\n0.3 1\n1 1\n";
    }
    CHECK_THROWS_AS(read_potential_file((dir / "bad.tsv").string()), Error);
    CHECK(kind_of([&] { read_potential_file((dir / "missing.tsv").string()); }) == ErrorKind::Io);
}

TEST_CASE("synthetic roundtrip reports and files", "[pipeline]") {
    const fs::path dir = scratch("roundtrip");
    ExperimentConfig c;
    c.set("potential", "sin(2*pi*x)");
    c.set("out", dir.string());
    const RunReport r = run_command(c, "roundtrip");
    CHECK(r.metric("error_max") < 0.1);
    CHECK(r.metric("gram_condition_K1") < 1e3);
    CHECK(r.metric("iterations") >= 1);
    CHECK(std::isnan(r.metric("no_such_metric")));
    for (const char* f : {"spectra.tsv", "kernel_boundary.tsv", "q_recovered.tsv", "report.txt"})
        CHECK(fs::exists(dir / f));
    const std::string q = slurp(dir / "q_recovered.tsv");
    CHECK_THAT(q, ContainsSubstring("# potential = sin(2*pi*x)"));
    CHECK_THAT(q, ContainsSubstring("q_true"));
}

TEST_CASE("runs are byte-for-byte deterministic", "[pipeline]") {
    const fs::path dir = scratch("determinism");
    ExperimentConfig c;
    c.set("potential", "1 + x");
    c.set("j_max", "8");
    c.set("out", dir.string());
    run_command(c, "roundtrip");
    const std::string a = slurp(dir / "q_recovered.tsv"), ra = slurp(dir / "report.txt");
    run_command(c, "roundtrip");
    CHECK(slurp(dir / "q_recovered.tsv") == a);
    CHECK(slurp(dir / "report.txt") == ra);
}

TEST_CASE("invert reads a spectra table written by forward", "[pipeline]") {
    const fs::path dir = scratch("invert");
    ExperimentConfig f;
    f.set("potential", "2");
    f.set("out", (dir / "fwd").string());
    f.set("lambdas", "1,2");
    run_command(f, "forward");
    REQUIRE(fs::exists(dir / "fwd" / "spectra.tsv"));
    CHECK(fs::exists(dir / "fwd" / "laplace.tsv"));

    ExperimentConfig inv;
    inv.set("input", (dir / "fwd" / "spectra.tsv").string());
    inv.set("out", (dir / "inv").string());
    const RunReport r = run_command(inv, "invert");
    const std::string q = slurp(dir / "inv" / "q_recovered.tsv");
    CHECK_FALSE(q.find("q_true") != std::string::npos);
    CHECK_THAT(r.metric("K11"), WithinAbs(1.0, 1e-2));

    ExperimentConfig none;
    none.set("out", (dir / "x").string());
    CHECK(kind_of([&] { run_command(none, "invert"); }) == ErrorKind::Config);
    none.set("input", (dir / "missing.tsv").string());
    CHECK(kind_of([&] { run_command(none, "invert"); }) == ErrorKind::Io);
}

TEST_CASE("nonuniqueness needs an asymmetric potential", "[pipeline]") {
    const fs::path dir = scratch("nonuniq");
    ExperimentConfig c;
    c.set("out", dir.string());
    c.set("potential", "1 + cos(2*pi*x)");
    CHECK(kind_of([&] { run_command(c, "nonuniqueness"); }) == ErrorKind::Config);
    c.set("potential", "x");
    c.set("j_max", "10");
    const RunReport r = run_command(c, "nonuniqueness");
    CHECK(r.metric("dirichlet_max_diff") < 1e-8);
    CHECK(r.metric("dirichlet_neumann_max_diff") > 10 * c.tol_root);
    CHECK(fs::exists(dir / "nonuniqueness.tsv"));
}

TEST_CASE("plot-data writes the extra tables", "[pipeline]") {
    const fs::path dir = scratch("plot");
    ExperimentConfig c;
    c.set("potential", "1");
    c.set("j_max", "8");
    c.set("out", dir.string());
    run_command(c, "plot-data");
    for (const char* f : {"ratio_trace.tsv", "convergence.tsv", "kernel_oracle.tsv"}) CHECK(fs::exists(dir / f));
}

TEST_CASE("failures carry the stage that raised them", "[pipeline]") {
    ExperimentConfig c;
    c.set("potential", "1");
    c.set("max_iter", "1");
    c.set("out", scratch("stage").string());
    try {
        run_command(c, "roundtrip");
        FAIL("expected NonConvergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonConvergence);
        CHECK_THAT(std::string(e.what()), ContainsSubstring("[volterra]"));
    }
    CHECK(kind_of([&] { run_command(c, "frobnicate"); }) == ErrorKind::Config);
}
