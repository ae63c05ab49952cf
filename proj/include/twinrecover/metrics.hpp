#pragma once

#include "twinrecover/density.hpp"

#include <cstddef>

namespace twinrec {

enum class LogBase { Natural, Two };

/// All four require identical grids and throw GridMismatch otherwise.
double l1_distance(const GriddedDensity& a, const GriddedDensity& b);
double l2_distance(const GriddedDensity& a, const GriddedDensity& b);
/// On cell masses value*step, each renormalized to sum to one.
double js_divergence(const GriddedDensity& a, const GriddedDensity& b, LogBase base = LogBase::Natural);
/// Trapezoid integral of |CDF_a - CDF_b|, each CDF scaled to end at one.
double wasserstein_1d(const GriddedDensity& a, const GriddedDensity& b);

struct ErrorReport {
    double l1 = 0;
    double l2 = 0;
    double js = 0;
    double wasserstein = 0;
    Grid grid;
    std::size_t n = 0;
    std::size_t seeds = 0;
};

ErrorReport compare(const GriddedDensity& estimate, const GriddedDensity& truth, LogBase base = LogBase::Natural);

}  // namespace twinrec
