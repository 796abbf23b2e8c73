#include "sg/weights.hpp"

#include <random>
#include <sstream>

namespace sg {

FunctionSpec parse_function_spec(const std::string& text) {
    std::istringstream in(text);
    FunctionSpec spec;
    if (!(in >> spec.kind))
        throw validation_error("empty function descriptor");
    std::string tok;
    while (in >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0)
            throw validation_error("function parameter must look like key=value, got '" +
                                   tok + "'");
        const std::string key = tok.substr(0, eq);
        try {
            size_t used = 0;
            const double v = std::stod(tok.substr(eq + 1), &used);
            if (used != tok.size() - eq - 1) throw std::invalid_argument("");
            spec.params[key] = v;
        } catch (const std::exception&) {
            throw validation_error("bad numeric value in '" + tok + "'");
        }
    }
    return spec;
}

std::string format_function_spec(const FunctionSpec& spec) {
    std::ostringstream out;
    out << spec.kind;
    for (const auto& [k, v] : spec.params) {
        out.precision(17);
        out << " " << k << "=" << v;
    }
    return out.str();
}

namespace {

ScalarField constant_field(Grid grid, double v) {
    return ScalarField(grid, v);
}

ScalarField gaussian_bump(Grid grid, double cx, double cy, double sigma,
                          double floor) {
    if (sigma <= 0) throw validation_error("gaussian_bump: sigma must be > 0");
    ScalarField f(grid, floor);
    for (int ix = 0; ix < grid.n; ++ix) {
        for (int iy = 0; iy < grid.n; ++iy) {
            const double x = grid.coord(ix), y = grid.coord(iy);
            // 3x3 image charges keep the bump smooth across the seam.
            double s = 0;
            for (int ox = -1; ox <= 1; ++ox) {
                for (int oy = -1; oy <= 1; ++oy) {
                    const double dx = x - cx + ox, dy = y - cy + oy;
                    s += std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
                }
            }
            f.at(ix, iy) += s;
        }
    }
    return f;
}

ScalarField cosine_family(Grid grid, double a, double b) {
    ScalarField f(grid);
    for (int ix = 0; ix < grid.n; ++ix)
        for (int iy = 0; iy < grid.n; ++iy)
            f.at(ix, iy) = std::exp(a * std::cos(two_pi * grid.coord(ix)) +
                                    b * std::cos(two_pi * grid.coord(iy)));
    return f;
}

ScalarField clipped_cosine(Grid grid, double a, double kx, double ky) {
    if (a <= 0) throw validation_error("clipped_cosine: a must be > 0");
    ScalarField f(grid);
    for (int ix = 0; ix < grid.n; ++ix)
        for (int iy = 0; iy < grid.n; ++iy)
            f.at(ix, iy) = a * std::max(0.0, std::cos(two_pi * (kx * grid.coord(ix) +
                                                                ky * grid.coord(iy))));
    return f;
}

} // namespace

ScalarField sample_weight(const FunctionSpec& spec, Grid grid) {
    ScalarField f = [&] {
        if (spec.kind == "constant")
            return constant_field(grid, spec.param("v", 1.0));
        if (spec.kind == "gaussian_bump")
            return gaussian_bump(grid, spec.param("cx", 0.5), spec.param("cy", 0.5),
                                 spec.param("sigma", 0.1), spec.param("floor", 0.0));
        if (spec.kind == "cosine_family")
            return cosine_family(grid, spec.param("a", 1.0), spec.param("b", 0.0));
        if (spec.kind == "clipped_cosine")
            return clipped_cosine(grid, spec.param("a", 1.0), spec.param("kx", 1.0),
                                  spec.param("ky", 0.0));
        throw validation_error("unknown weight kind '" + spec.kind + "'");
    }();
    for (double v : f.values)
        if (v < 0)
            throw validation_error("weight '" + spec.kind + "' is negative somewhere");
    return f;
}

ScalarField sample_initial_data(const FunctionSpec& spec, Grid grid,
                                unsigned long seed) {
    if (spec.kind == "zero") return ScalarField(grid, 0.0);
    if (spec.kind == "cosine") {
        const double ax = spec.param("ax", 1.0), ay = spec.param("ay", 0.0);
        ScalarField f(grid);
        for (int ix = 0; ix < grid.n; ++ix)
            for (int iy = 0; iy < grid.n; ++iy)
                f.at(ix, iy) = ax * std::cos(two_pi * grid.coord(ix)) +
                               ay * std::cos(two_pi * grid.coord(iy));
        return f;
    }
    if (spec.kind == "bubble") {
        const double cx = spec.param("cx", 0.5), cy = spec.param("cy", 0.5);
        const double eps = spec.param("eps", 1e-3);
        const double offset = spec.param("offset", 0.0);
        if (eps <= 0) throw validation_error("bubble: eps must be > 0");
        const double pi = two_pi / 2;
        ScalarField f(grid);
        for (int ix = 0; ix < grid.n; ++ix) {
            for (int iy = 0; iy < grid.n; ++iy) {
                const double r =
                    periodic_dist({grid.coord(ix), grid.coord(iy)}, {cx, cy});
                const double q = r * r + eps;
                f.at(ix, iy) = std::log(eps / (pi * q * q)) + offset;
            }
        }
        return f;
    }
    if (spec.kind == "random") {
        const double amp = spec.param("amp", 0.1);
        const int kmax = int(spec.param("kmax", 4.0));
        if (kmax < 1 || kmax >= grid.n / 2)
            throw validation_error("random: kmax must be in [1, n/2)");
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        ScalarField f(grid);
        // Fixed iteration order over the low modes keeps output seeded-deterministic.
        for (int kx = -kmax; kx <= kmax; ++kx) {
            for (int ky = -kmax; ky <= kmax; ++ky) {
                if (kx == 0 && ky == 0) continue;
                const double a = gauss(rng), b = gauss(rng);
                for (int ix = 0; ix < grid.n; ++ix) {
                    for (int iy = 0; iy < grid.n; ++iy) {
                        const double ph =
                            two_pi * (kx * grid.coord(ix) + ky * grid.coord(iy));
                        f.at(ix, iy) += a * std::cos(ph) + b * std::sin(ph);
                    }
                }
            }
        }
        const double sup = std::max(std::abs(field_max(f)), std::abs(field_min(f)));
        if (sup > 0)
            for (double& v : f.values) v *= amp / sup;
        return f;
    }
    throw validation_error("unknown initial-data kind '" + spec.kind + "'");
}

} // namespace sg
