#include "heatinv/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "heatinv/error.hpp"

namespace heatinv {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// shortest text that reads back to the same double
std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double to_double(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    char* end = nullptr;
    const double d = std::strtod(t.c_str(), &end);
    if (t.empty() || *end != '\0' || !std::isfinite(d)) {
        throw Error(ErrorKind::Config, key + ": expected a number, got '" + v + "'");
    }
    return d;
}

std::size_t to_size(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    char* end = nullptr;
    const long long d = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || *end != '\0' || d < 0) {
        throw Error(ErrorKind::Config, key + ": expected a non-negative integer, got '" + v + "'");
    }
    return static_cast<std::size_t>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
    std::string t = trim(v);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw Error(ErrorKind::Config, key + ": expected true/false, got '" + v + "'");
}

// number at the front of s; returns chars consumed (0 if none)
std::size_t leading_number(const std::string& s, double& value) {
    char* end = nullptr;
    value = std::strtod(s.c_str(), &end);
    const std::size_t used = static_cast<std::size_t>(end - s.c_str());
    if (used > 0 && (s[0] == 'i' || s[0] == 'n' || s[0] == 'I' || s[0] == 'N')) return 0;  // inf / nan
    return used;
}

PotentialExpression::Term parse_term(const std::string& raw, double sign) {
    using Term = PotentialExpression::Term;
    std::string s = raw;
    double coeff = 1.0;
    double num = 0.0;
    const std::size_t used = leading_number(s, num);
    if (used == s.size()) return {Term::Constant, sign * num, 0.0};
    if (used > 0) {
        if (s[used] != '*') throw Error(ErrorKind::Config, "potential: cannot parse term '" + raw + "'");
        coeff = num;
        s = s.substr(used + 1);
    }
    if (s == "x") return {Term::Linear, sign * coeff, 0.0};
    for (const auto& [name, kind] : {std::pair<const char*, Term::Kind>{"sin(", Term::Sine},
                                     std::pair<const char*, Term::Kind>{"cos(", Term::Cosine}}) {
        const std::string prefix = name;
        if (s.rfind(prefix, 0) != 0 || s.back() != ')') continue;
        std::string arg = s.substr(prefix.size(), s.size() - prefix.size() - 1);
        // forms: pi*x, k*pi*x, k*x
        double k = 1.0;
        const std::size_t u = leading_number(arg, k);
        if (u > 0) {
            if (u >= arg.size() || arg[u] != '*') break;
            arg = arg.substr(u + 1);
        } else {
            k = 1.0;
        }
        if (arg == "pi*x") return {kind, sign * coeff, k};
        if (arg == "x" && u > 0) return {kind, sign * coeff, k / std::numbers::pi};
        break;
    }
    throw Error(ErrorKind::Config,
                "potential: term '" + raw + "' is not in the whitelist (c, c*x, c*sin(k*pi*x), c*cos(k*pi*x))");
}

}  // namespace

PotentialExpression PotentialExpression::parse(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s.empty()) throw Error(ErrorKind::Config, "potential: empty expression");
    PotentialExpression expr;
    std::size_t pos = 0;
    while (pos < s.size()) {
        double sign = 1.0;
        while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
            if (s[pos] == '-') sign = -sign;
            ++pos;
        }
        std::size_t end = pos;
        int depth = 0;
        while (end < s.size()) {
            const char c = s[end];
            if (c == '(') ++depth;
            if (c == ')') --depth;
            const bool exponent = end > pos && (s[end - 1] == 'e') && end >= 2 &&
                                  std::isdigit(static_cast<unsigned char>(s[end - 2]));
            if (depth == 0 && (c == '+' || c == '-') && end > pos && !exponent) break;
            ++end;
        }
        if (end == pos) throw Error(ErrorKind::Config, "potential: dangling sign in '" + text + "'");
        expr.terms.push_back(parse_term(s.substr(pos, end - pos), sign));
        pos = end;
    }
    return expr;
}

double PotentialExpression::operator()(double x) const {
    double v = 0.0;
    for (const Term& t : terms) {
        switch (t.kind) {
            case Term::Constant: v += t.coeff; break;
            case Term::Linear: v += t.coeff * x; break;
            case Term::Sine: v += t.coeff * std::sin(t.freq * std::numbers::pi * x); break;
            case Term::Cosine: v += t.coeff * std::cos(t.freq * std::numbers::pi * x); break;
        }
    }
    return v;
}

Potential read_potential_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open potential file '" + path + "'");
    std::vector<double> xs, qs;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || std::isalpha(static_cast<unsigned char>(t[0]))) continue;
        std::istringstream row(t);
        double x, q;
        if (!(row >> x >> q)) throw Error(ErrorKind::Io, "malformed row in '" + path + "': " + t);
        xs.push_back(x);
        qs.push_back(q);
    }
    if (qs.size() < 3) throw Error(ErrorKind::Io, "potential file '" + path + "' has fewer than 3 samples");
    const double h = 1.0 / static_cast<double>(qs.size() - 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (std::abs(xs[i] - static_cast<double>(i) * h) > 1e-9) {
            throw Error(ErrorKind::Io, "potential file '" + path + "' is not on a uniform grid over [0,1]");
        }
    }
    return Potential(qs);
}

void ExperimentConfig::set(const std::string& key_in, const std::string& value_in) {
    const std::string key = trim(key_in);
    const std::string value = trim(value_in);
    if (key == "potential") {
        PotentialExpression::parse(value);
        potential = value;
        truth_known = true;
    } else if (key == "potential_file") {
        potential_file = value;
        truth_known = !value.empty();
    } else if (key == "n_nodes") {
        n_nodes = to_size(key, value);
    } else if (key == "j_max") {
        j_max = to_size(key, value);
    } else if (key == "tol_root") {
        tol_root = to_double(key, value);
    } else if (key == "tol_iter") {
        tol_iter = to_double(key, value);
    } else if (key == "tol_quad") {
        tol_quad = to_double(key, value);
    } else if (key == "max_iter") {
        max_iter = to_size(key, value);
    } else if (key == "pulse_T") {
        pulse_T = to_double(key, value);
    } else if (key == "pulse_shape") {
        if (value != "polynomial" && value != "sine2" && value != "zero") {
            throw Error(ErrorKind::Config, "pulse_shape: expected polynomial, sine2 or zero, got '" + value + "'");
        }
        pulse_shape = value;
    } else if (key == "pulse_amplitude") {
        pulse_amplitude = to_double(key, value);
    } else if (key == "lambdas") {
        std::vector<double> ls;
        std::string item;
        std::istringstream in(value);
        while (std::getline(in, item, ',')) ls.push_back(to_double(key, item));
        lambdas = ls;
    } else if (key == "m_steps") {
        m_steps = to_size(key, value);
    } else if (key == "t_end") {
        t_end = to_double(key, value);
    } else if (key == "mode") {
        if (value != "synthetic" && value != "measured") {
            throw Error(ErrorKind::Config, "mode: expected synthetic or measured, got '" + value + "'");
        }
        mode = value;
    } else if (key == "out") {
        out = value;
    } else if (key == "input") {
        input = value;
    } else if (key == "tail_factor") {
        tail_factor = to_size(key, value);
    } else if (key == "seed_free") {
        seed_free = to_bool(key, value);
    } else if (key == "timings") {
        timings = to_bool(key, value);
    } else {
        throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
    }
}

void ExperimentConfig::load_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::Config, "line " + std::to_string(lineno) + ": expected key = value");
        }
        set(line.substr(0, eq), line.substr(eq + 1));
    }
}

void ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    load_text(ss.str());
}

void ExperimentConfig::validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
    if (n_nodes < 51 || n_nodes % 2 == 0) bad("n_nodes must be odd and at least 51");
    if (j_max < 4) bad("j_max must be at least 4");
    if (!(tol_root > 0.0) || !(tol_iter > 0.0) || !(tol_quad > 0.0)) bad("tolerances must be positive");
    if (max_iter < 1) bad("max_iter must be positive");
    if (!(pulse_T > 0.0)) bad("pulse_T must be positive");
    if (pulse_shape == "zero" || pulse_amplitude == 0.0) bad("pulse a(t) must not vanish identically");
    if (lambdas.empty()) bad("lambdas must not be empty");
    for (double l : lambdas)
        if (!(l > 0.0)) bad("lambdas must be positive");
    if (m_steps < 10) bad("m_steps must be at least 10");
    if (t_end != 0.0 && !(t_end > pulse_T)) bad("t_end must exceed pulse_T");
    if (tail_factor < 1) bad("tail_factor must be at least 1");
    if (out.empty()) bad("out must not be empty");
}

std::string ExperimentConfig::echo() const {
    std::ostringstream os;
    if (potential_file.empty()) os << "potential = " << potential << "\n";
    else os << "potential_file = " << potential_file << "\n";
    os << "n_nodes = " << n_nodes << "\n";
    os << "j_max = " << j_max << "\n";
    os << "tol_root = " << fmt(tol_root) << "\n";
    os << "tol_iter = " << fmt(tol_iter) << "\n";
    os << "tol_quad = " << fmt(tol_quad) << "\n";
    os << "max_iter = " << max_iter << "\n";
    os << "pulse_T = " << fmt(pulse_T) << "\n";
    os << "pulse_shape = " << pulse_shape << "\n";
    os << "pulse_amplitude = " << fmt(pulse_amplitude) << "\n";
    os << "lambdas = ";
    for (std::size_t i = 0; i < lambdas.size(); ++i) os << (i ? "," : "") << fmt(lambdas[i]);
    os << "\n";
    os << "m_steps = " << m_steps << "\n";
    os << "t_end = " << fmt(t_end) << "\n";
    os << "mode = " << mode << "\n";
    os << "out = " << out << "\n";
    if (!input.empty()) os << "input = " << input << "\n";
    os << "tail_factor = " << tail_factor << "\n";
    os << "seed_free = " << (seed_free ? "true" : "false") << "\n";
    os << "timings = " << (timings ? "true" : "false") << "\n";
    return os.str();
}

Potential ExperimentConfig::make_potential() const {
    if (!potential_file.empty()) {
        Potential p = read_potential_file(potential_file);
        if (p.size() != n_nodes) {
            throw Error(ErrorKind::Config, "potential file has " + std::to_string(p.size()) +
                                               " samples but n_nodes = " + std::to_string(n_nodes));
        }
        return p;
    }
    const PotentialExpression expr = PotentialExpression::parse(potential);
    return Potential::from_function(n_nodes, expr);
}

PulseSpec ExperimentConfig::make_pulse() const {
    PulseSpec p;
    p.support = pulse_T;
    p.amplitude = pulse_amplitude;
    p.shape = pulse_shape == "sine2" ? PulseShape::SineSquared
              : pulse_shape == "zero" ? PulseShape::Zero
                                      : PulseShape::Polynomial;
    return p;
}

}  // namespace heatinv
