#include "twinrecover/metrics.hpp"

#include <cmath>
#include <numeric>

namespace twinrec {

namespace {

void same_grid(const GriddedDensity& a, const GriddedDensity& b) {
    if (!(a.grid == b.grid) || a.values.size() != b.values.size() || a.values.size() != a.grid.points)
        throw GridMismatch("densities are defined on different grids");
}

std::vector<double> cell_masses(const GriddedDensity& d) {
    std::vector<double> m(d.values.size());
    double total = 0;
    for (std::size_t i = 0; i < m.size(); ++i) total += (m[i] = std::max(d.values[i], 0.0) * d.grid.step());
    if (!(total > 0)) throw std::invalid_argument("density has no mass");
    for (auto& v : m) v /= total;
    return m;
}

std::vector<double> cdf(const GriddedDensity& d) {
    std::vector<double> c(d.values.size(), 0.0);
    const double h = d.grid.step();
    for (std::size_t i = 1; i < c.size(); ++i) c[i] = c[i - 1] + 0.5 * h * (d.values[i - 1] + d.values[i]);
    const double total = c.back();
    if (!(total > 0)) throw std::invalid_argument("density has no mass");
    for (auto& v : c) v /= total;
    return c;
}

}  // namespace

double l1_distance(const GriddedDensity& a, const GriddedDensity& b) {
    same_grid(a, b);
    std::vector<double> d(a.values.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(a.values[i] - b.values[i]);
    return trapezoid(d, a.grid.step());
}

double l2_distance(const GriddedDensity& a, const GriddedDensity& b) {
    same_grid(a, b);
    std::vector<double> d(a.values.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (a.values[i] - b.values[i]) * (a.values[i] - b.values[i]);
    return std::sqrt(trapezoid(d, a.grid.step()));
}

double js_divergence(const GriddedDensity& a, const GriddedDensity& b, LogBase base) {
    same_grid(a, b);
    const auto p = cell_masses(a);
    const auto q = cell_masses(b);
    double js = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0) js += 0.5 * p[i] * std::log(p[i] / m);
        if (q[i] > 0) js += 0.5 * q[i] * std::log(q[i] / m);
    }
    js = std::max(js, 0.0);
    return base == LogBase::Two ? js / std::log(2.0) : js;
}

double wasserstein_1d(const GriddedDensity& a, const GriddedDensity& b) {
    same_grid(a, b);
    const auto ca = cdf(a);
    const auto cb = cdf(b);
    std::vector<double> d(ca.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(ca[i] - cb[i]);
    return trapezoid(d, a.grid.step());
}

ErrorReport compare(const GriddedDensity& estimate, const GriddedDensity& truth, LogBase base) {
    ErrorReport r;
    r.l1 = l1_distance(estimate, truth);
    r.l2 = l2_distance(estimate, truth);
    r.js = js_divergence(estimate, truth, base);
    r.wasserstein = wasserstein_1d(estimate, truth);
    r.grid = truth.grid;
    return r;
}

}  // namespace twinrec
