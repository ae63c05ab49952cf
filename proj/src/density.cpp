#include "twinrecover/density.hpp"

#include "twinrecover/io.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace twinrec {

void Grid::validate() const {
    if (points < 2) throw std::invalid_argument("grid needs at least two points");
    if (!(max > min) || !std::isfinite(min) || !std::isfinite(max))
        throw std::invalid_argument("grid bounds must be finite with max > min");
}

double trapezoid(const std::vector<double>& f, double h) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * h;
}

double GriddedDensity::mass() const { return trapezoid(values, grid.step()); }

GriddedDensity GriddedDensity::normalized() const {
    const double m = mass();
    if (!(m > 0)) throw std::invalid_argument("density has no mass to normalize");
    GriddedDensity out{grid, values};
    for (auto& v : out.values) v /= m;
    return out;
}

double GriddedDensity::mean() const {
    std::vector<double> yf(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) yf[i] = grid.at(i) * values[i];
    return trapezoid(yf, grid.step()) / mass();
}

GaussianSpec::GaussianSpec(double m, double v) : mean(m), variance(v) {
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument("Gaussian variance must be positive");
}

double GaussianSpec::sd() const { return std::sqrt(variance); }

double GaussianSpec::pdf(double y) const {
    const double d = y - mean;
    return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

GaussianSpec theoretical_gaussian(double alpha, double beta, double gamma, double sigma_w, double sigma_z,
                                  double sigma_y, double x) {
    if (!(sigma_w > 0) || !(sigma_z > 0) || !(sigma_y > 0))
        throw std::invalid_argument("standard deviations must be positive");
    return {alpha * x, beta * beta * sigma_z * sigma_z + gamma * gamma * sigma_w * sigma_w + sigma_y * sigma_y};
}

Grid default_grid(const GaussianSpec& spec, double half_width_sd, std::size_t points) {
    return {spec.mean - half_width_sd * spec.sd(), spec.mean + half_width_sd * spec.sd(), points};
}

GriddedDensity density_of_gaussian(const GaussianSpec& spec, const Grid& grid) {
    grid.validate();
    const double reach = 3.0 * spec.sd();
    if (grid.min > spec.mean - reach || grid.max < spec.mean + reach)
        throw std::invalid_argument("grid must cover at least mean +- 3 sd");
    GriddedDensity d{grid, std::vector<double>(grid.points)};
    for (std::size_t i = 0; i < grid.points; ++i) d.values[i] = spec.pdf(grid.at(i));
    return d;
}

GriddedDensity average(const std::vector<GriddedDensity>& ds) {
    if (ds.empty()) throw std::invalid_argument("nothing to average");
    GriddedDensity out{ds.front().grid, std::vector<double>(ds.front().values.size(), 0.0)};
    for (const auto& d : ds) {
        if (!(d.grid == out.grid)) throw GridMismatch("cannot average densities on different grids");
        for (std::size_t i = 0; i < d.values.size(); ++i) out.values[i] += d.values[i];
    }
    for (auto& v : out.values) v /= static_cast<double>(ds.size());
    return out;
}

std::string density_csv(const GriddedDensity& d) {
    std::ostringstream out;
    out << "grid,value\n";
    for (std::size_t i = 0; i < d.values.size(); ++i)
        out << format_double(d.grid.at(i)) << ',' << format_double(d.values[i]) << '\n';
    return out.str();
}

GriddedDensity read_density_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    const CsvTable csv = read_csv(in, source);
    const auto gi = csv.column("grid");
    const auto vi = csv.column("value");
    if (csv.rows.size() < 2) throw std::invalid_argument(source + ": a density needs at least two grid points");
    std::vector<double> xs, vs;
    for (const auto& r : csv.rows) {
        xs.push_back(std::stod(r[gi]));
        vs.push_back(std::stod(r[vi]));
    }
    Grid g{xs.front(), xs.back(), xs.size()};
    g.validate();
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - g.at(i)) > 1e-9 * std::max(1.0, std::abs(g.max - g.min)))
            throw std::invalid_argument(source + ": grid is not uniform");
    return {g, vs};
}

}  // namespace twinrec
