#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace twinrec {

/// Uniform 1-D grid of `points` nodes from `min` to `max` inclusive.
struct Grid {
    double min = 0;
    double max = 1;
    std::size_t points = 512;

    double step() const { return (max - min) / static_cast<double>(points - 1); }
    double at(std::size_t i) const { return min + step() * static_cast<double>(i); }
    void validate() const;
    friend bool operator==(const Grid&, const Grid&) = default;
};

class GridMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct GriddedDensity {
    Grid grid;
    std::vector<double> values;

    /// Trapezoid integral of the values.
    double mass() const;
    /// Copy scaled to unit trapezoid mass; throws on zero mass.
    GriddedDensity normalized() const;
    double mean() const;
};

/// Trapezoid rule with spacing h.
double trapezoid(const std::vector<double>& f, double h);

struct GaussianSpec {
    double mean = 0;
    double variance = 1;

    GaussianSpec() = default;
    GaussianSpec(double mean, double variance);
    double sd() const;
    double pdf(double y) const;
};

/// Law of Y*_{X*=x} in the linear-Gaussian trial: mean alpha*x, variance
/// beta^2 sigma_z^2 + gamma^2 sigma_w^2 + sigma_y^2 (beta scales Z, gamma scales W).
GaussianSpec theoretical_gaussian(double alpha, double beta, double gamma, double sigma_w, double sigma_z,
                                  double sigma_y, double x);

/// mean +- half_width_sd standard deviations, 512 points by default.
Grid default_grid(const GaussianSpec& spec, double half_width_sd = 6.0, std::size_t points = 512);

/// Throws std::invalid_argument unless the grid spans mean +- 3 sd.
GriddedDensity density_of_gaussian(const GaussianSpec& spec, const Grid& grid);

/// Pointwise average of densities sharing one grid.
GriddedDensity average(const std::vector<GriddedDensity>& ds);

std::string density_csv(const GriddedDensity& d);
/// Reads `grid,value` rows; the grid must be uniform.
GriddedDensity read_density_csv(const std::string& text, const std::string& source = "<input>");

}  // namespace twinrec
