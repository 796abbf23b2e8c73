#include "sg/field.hpp"

#include <string>

namespace sg {

void require_finite(const ScalarField& f, const char* what) {
    for (double v : f.values)
        if (!std::isfinite(v))
            throw validation_error(std::string(what) +
                                   ": field contains non-finite values");
}

namespace {
// Kahan-compensated sum; the integrals feed tolerance checks at 1e-12.
double kahan_sum(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}
} // namespace

double integrate(const ScalarField& f) {
    require_finite(f, "integrate");
    return kahan_sum(f.values) * f.grid.area_element();
}

double field_max(const ScalarField& f) {
    double m = f.values[0];
    for (double v : f.values) m = std::max(m, v);
    return m;
}

double field_min(const ScalarField& f) {
    double m = f.values[0];
    for (double v : f.values) m = std::min(m, v);
    return m;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0;
    for (size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double l2_norm(const ScalarField& f) {
    double s = 0.0, c = 0.0;
    for (double v : f.values) {
        double y = v * v - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return std::sqrt(s * f.grid.area_element());
}

double inner(const ScalarField& a, const ScalarField& b) {
    double s = 0.0, c = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double y = a[i] * b[i] - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s * a.grid.area_element();
}

} // namespace sg
