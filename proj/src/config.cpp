#include "sg/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sg/energy.hpp"

namespace sg {

double ExperimentConfig::eight_pi_value() { return eight_pi; }

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, int line, const std::string& key) {
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (trim(v.substr(used)).empty()) return x;
    } catch (const std::exception&) {
    }
    throw validation_error("line " + std::to_string(line) + ": key '" + key +
                           "' expects a number, got '" + v + "'");
}

long parse_long(const std::string& v, int line, const std::string& key) {
    const double x = parse_double(v, line, key);
    if (x != std::floor(x))
        throw validation_error("line " + std::to_string(line) + ": key '" + key +
                               "' expects an integer, got '" + v + "'");
    return long(x);
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw validation_error("line " + std::to_string(line) + ": key '" + key +
                           "' expects true/false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& v, int line,
                               const std::string& key) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(item, line, key));
    }
    if (out.empty())
        throw validation_error("line " + std::to_string(line) + ": key '" + key +
                               "' expects a comma-separated list");
    return out;
}

void assign(ExperimentConfig& cfg, const std::string& key,
            const std::string& value, int line) {
    if (key == "n")
        cfg.n = int(parse_long(value, line, key));
    else if (key == "rho1")
        cfg.rho1 = parse_double(value, line, key);
    else if (key == "rho2")
        cfg.rho2 = parse_double(value, line, key);
    else if (key == "h1")
        cfg.h1 = parse_function_spec(value);
    else if (key == "h2")
        cfg.h2 = parse_function_spec(value);
    else if (key == "u0")
        cfg.u0 = parse_function_spec(value);
    else if (key == "dt_init")
        cfg.dt_init = parse_double(value, line, key);
    else if (key == "dt_max")
        cfg.dt_max = parse_double(value, line, key);
    else if (key == "t_end")
        cfg.t_end = parse_double(value, line, key);
    else if (key == "tol_mass")
        cfg.tol_mass = parse_double(value, line, key);
    else if (key == "tol_energy")
        cfg.tol_energy = parse_double(value, line, key);
    else if (key == "tol_mfe")
        cfg.tol_mfe = parse_double(value, line, key);
    else if (key == "tol_residual")
        cfg.tol_residual = parse_double(value, line, key);
    else if (key == "tol_dissipation")
        cfg.tol_dissipation = parse_double(value, line, key);
    else if (key == "tol_final_change")
        cfg.tol_final_change = parse_double(value, line, key);
    else if (key == "blowup_margin")
        cfg.blowup_margin = parse_double(value, line, key);
    else if (key == "eps_list")
        cfg.eps_list = parse_list(value, line, key);
    else if (key == "delta_list")
        cfg.delta_list = parse_list(value, line, key);
    else if (key == "p_resolution")
        cfg.p_resolution = int(parse_long(value, line, key));
    else if (key == "out_dir")
        cfg.out_dir = value;
    else if (key == "seed")
        cfg.seed = (unsigned long)parse_long(value, line, key);
    else if (key == "max_steps")
        cfg.max_steps = parse_long(value, line, key);
    else if (key == "sample_every")
        cfg.sample_every = int(parse_long(value, line, key));
    else if (key == "mfe_multistart")
        cfg.mfe_multistart = parse_bool(value, line, key);
    else
        throw validation_error("line " + std::to_string(line) +
                               ": unknown key '" + key + "'");
}

void validate(const ExperimentConfig& cfg, int line_rho2, int line_rho1,
              int line_n) {
    auto fail = [](int line, const std::string& msg) {
        throw validation_error(
            (line > 0 ? "line " + std::to_string(line) + ": " : "") + msg);
    };
    if (cfg.n < 16 || cfg.n % 2 != 0)
        fail(line_n, "n must be even and >= 16, got " + std::to_string(cfg.n));
    if (!(cfg.rho2 > 0 && cfg.rho2 < eight_pi))
        fail(line_rho2, "rho2 must lie in (0, 8*pi = " +
                            std::to_string(eight_pi) + "), got " +
                            std::to_string(cfg.rho2));
    if (!(cfg.rho1 > 0 && cfg.rho1 <= eight_pi))
        fail(line_rho1, "rho1 must lie in (0, 8*pi], got " +
                            std::to_string(cfg.rho1));
    if (!(cfg.dt_init > 0 && cfg.dt_max >= cfg.dt_init))
        fail(0, "require 0 < dt_init <= dt_max");
    if (cfg.sample_every < 1) fail(0, "sample_every must be >= 1");
    for (double d : cfg.delta_list)
        if (!(d > 0 && d < 0.5)) fail(0, "delta_list entries must lie in (0, 1/2)");
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0, line_rho1 = 0, line_rho2 = 0, line_n = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("line " + std::to_string(lineno) +
                                   ": expected 'key = value', got '" + raw + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw validation_error("line " + std::to_string(lineno) +
                                   ": empty key or value");
        assign(cfg, key, value, lineno);
        if (key == "rho1") line_rho1 = lineno;
        if (key == "rho2") line_rho2 = lineno;
        if (key == "n") line_n = lineno;
    }
    validate(cfg, line_rho2, line_rho1, line_n);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw validation_error("override must look like key=value, got '" +
                               assignment + "'");
    std::string key = trim(assignment.substr(0, eq));
    std::string value = trim(assignment.substr(eq + 1));
    assign(cfg, key, value, 0);
    validate(cfg, 0, 0, 0);
}

std::string canonical_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "n = " << cfg.n << "\n";
    out << "rho1 = " << cfg.rho1 << "\n";
    out << "rho2 = " << cfg.rho2 << "\n";
    out << "h1 = " << format_function_spec(cfg.h1) << "\n";
    out << "h2 = " << format_function_spec(cfg.h2) << "\n";
    out << "u0 = " << format_function_spec(cfg.u0) << "\n";
    out << "dt_init = " << cfg.dt_init << "\n";
    out << "dt_max = " << cfg.dt_max << "\n";
    out << "t_end = " << cfg.t_end << "\n";
    out << "tol_mass = " << cfg.tol_mass << "\n";
    out << "tol_energy = " << cfg.tol_energy << "\n";
    out << "tol_mfe = " << cfg.tol_mfe << "\n";
    out << "tol_residual = " << cfg.tol_residual << "\n";
    out << "tol_dissipation = " << cfg.tol_dissipation << "\n";
    out << "tol_final_change = " << cfg.tol_final_change << "\n";
    out << "blowup_margin = " << cfg.blowup_margin << "\n";
    auto list = [&](const char* key, const std::vector<double>& v) {
        if (v.empty()) return;
        out << key << " = ";
        for (size_t i = 0; i < v.size(); ++i)
            out << (i ? "," : "") << v[i];
        out << "\n";
    };
    list("eps_list", cfg.eps_list);
    list("delta_list", cfg.delta_list);
    out << "p_resolution = " << cfg.p_resolution << "\n";
    out << "out_dir = " << cfg.out_dir << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "max_steps = " << cfg.max_steps << "\n";
    out << "sample_every = " << cfg.sample_every << "\n";
    out << "mfe_multistart = " << (cfg.mfe_multistart ? "true" : "false") << "\n";
    return out.str();
}

uint64_t config_hash(const ExperimentConfig& cfg) {
    // FNV-1a over the canonical serialization.
    const std::string text = canonical_config(cfg);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace sg
