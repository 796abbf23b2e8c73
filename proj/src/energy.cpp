#include "sg/energy.hpp"

#include <string>

namespace sg {

Model make_model(double rho1, double rho2, ScalarField h1, ScalarField h2) {
    if (!(rho2 > 0 && rho2 < eight_pi))
        throw validation_error("rho2 must lie in (0, 8*pi), got " +
                               std::to_string(rho2));
    if (!(rho1 > 0 && rho1 <= eight_pi))
        throw validation_error("rho1 must lie in (0, 8*pi], got " +
                               std::to_string(rho1));
    require_finite(h1, "h1");
    require_finite(h2, "h2");
    if (field_min(h1) < 0) throw validation_error("h1 must be non-negative");
    if (field_min(h2) < 0) throw validation_error("h2 must be non-negative");
    double prod = 0;
    for (size_t i = 0; i < h1.size(); ++i) prod = std::max(prod, h1[i] * h2[i]);
    if (prod == 0)
        throw validation_error("h1*h2 must not vanish identically");
    return Model{rho1, rho2, std::move(h1), std::move(h2)};
}

double log_weighted_mass(const ScalarField& h, const ScalarField& u, double s,
                         const char* what) {
    double shift = s * u[0];
    for (double v : u.values) shift = std::max(shift, s * v);
    double sum = 0.0, c = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        const double term = h[i] * std::exp(s * u[i] - shift) - c;
        const double t = sum + term;
        c = (t - sum) - term;
        sum = t;
    }
    const double mass = sum * u.grid.area_element();
    if (!(mass > 0))
        throw validation_error(std::string(what) + " degenerated to zero");
    return shift + std::log(mass);
}

double energy_j(SpectralWorkspace& ws, const ScalarField& u, const Model& m) {
    require_finite(u, "energy_j");
    const double log_m1 = log_weighted_mass(m.h1, u, +1, "int h1 e^u");
    const double log_m2 = log_weighted_mass(m.h2, u, -1, "int h2 e^-u");
    const double mean_u = integrate(u);
    return ws.dirichlet_energy(u) - m.rho1 * log_m1 - m.rho2 * log_m2 +
           (m.rho1 - m.rho2) * mean_u;
}

double mt_gap(SpectralWorkspace& ws, const ScalarField& u) {
    require_finite(u, "mt_gap");
    const double mean_u = integrate(u);
    ScalarField v = u;
    for (double& x : v.values) x -= mean_u;
    const ScalarField one(u.grid, 1.0);
    const double lp = log_weighted_mass(one, v, +1, "int e^{u-mean}");
    const double lm = log_weighted_mass(one, v, -1, "int e^{-u+mean}");
    // dirichlet_energy already carries the 1/2, so this is (1/16pi) |grad u|^2.
    return ws.dirichlet_energy(u) / eight_pi - lp - lm;
}

ScalarField reaction_term(const ScalarField& u, const Model& m) {
    const double log_m1 = log_weighted_mass(m.h1, u, +1, "int h1 e^u");
    const double log_m2 = log_weighted_mass(m.h2, u, -1, "int h2 e^-u");
    ScalarField out(u.grid);
    for (size_t i = 0; i < u.size(); ++i)
        out[i] = m.rho1 * (m.h1[i] * std::exp(u[i] - log_m1) - 1.0) -
                 m.rho2 * (m.h2[i] * std::exp(-u[i] - log_m2) - 1.0);
    return out;
}

ScalarField energy_gradient(SpectralWorkspace& ws, const ScalarField& u,
                            const Model& m) {
    require_finite(u, "energy_gradient");
    ScalarField grad = ws.laplacian(u);
    const ScalarField f = reaction_term(u, m);
    for (size_t i = 0; i < grad.size(); ++i) grad[i] = -grad[i] - f[i];
    return grad;
}

double elliptic_residual(SpectralWorkspace& ws, const ScalarField& u,
                         const Model& m) {
    return l2_norm(energy_gradient(ws, u, m));
}

} // namespace sg
