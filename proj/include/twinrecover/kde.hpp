#pragma once

#include "twinrecover/density.hpp"
#include "twinrecover/parallel.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace twinrec {

using Column = std::vector<double>;

/// Linear-interpolation sample quantile (the common "type 7" definition), p in [0,1].
double quantile(Column sorted_or_not, double p);

/// 0.9 * min(sd, IQR/1.34) * n^(-1/5); returns 0 when the sample has no spread.
double silverman_bandwidth(const Column& y);

/// Weighted form: weighted sd and quantiles, n replaced by the effective size 1 / sum(w^2) of normalized weights.
double weighted_silverman_bandwidth(const Column& y, const Column& w);

/// Gaussian kernel density of `samples` at bandwidth h, optionally weighted.
/// The serial version loops samples outermost; the parallel one splits grid points across threads.
GriddedDensity gaussian_kde_serial(const Column& samples, double h, const Grid& grid, const Column* weights = nullptr);
GriddedDensity gaussian_kde_parallel(const Column& samples, double h, const Grid& grid,
                                     const Column* weights = nullptr);
GriddedDensity gaussian_kde(const Column& samples, double h, const Grid& grid, Exec exec,
                            const Column* weights = nullptr);

/// Biased experimental rows (all drawn under S=1). covariates[j] is the j-th adjustment column.
struct BiasedRows {
    Column x;
    std::vector<Column> covariates;
    Column y;
    std::size_t size() const { return y.size(); }
};

/// Unbiased samples of the same adjustment covariates, column per covariate.
struct ExternalSample {
    std::vector<Column> covariates;
};

/// PerCell: Silverman's rule inside each covariate cell.
/// Pooled: one weighted Silverman bandwidth for the whole reweighted arm.
enum class BandwidthRule { PerCell, Pooled };

struct KdeSettings {
    std::size_t bins = 10;
    std::size_t min_cell = 2;
    BandwidthRule bandwidth = BandwidthRule::Pooled;
    Exec exec = Exec::Parallel;
};

struct RecoveryDiagnostics {
    std::string bandwidth_rule = "silverman-0.9 per cell";
    std::size_t arm_size = 0;
    std::vector<std::size_t> bins_per_axis;
    std::vector<std::size_t> cell_counts;     // biased rows of the arm per cell
    std::vector<double> cell_weights;         // external probability per cell
    std::vector<double> effective_weights;    // after moving under-populated mass to donors
    std::vector<double> bandwidths;           // 0 for cells that carry no weight
    std::vector<std::pair<std::size_t, std::size_t>> fallbacks;  // (cell, donor)
    double mass_before_normalization = 0;
};

struct ContinuousRecovery {
    GriddedDensity density;
    RecoveryDiagnostics diagnostics;
};

/// sum over covariate cells of KDE_cell(y) * P_external(cell), cells cut at the
/// external sample's quantiles. With k covariates the cells form a product grid
/// whose per-axis count shrinks from `bins` until the arm averages min_cell rows per cell.
ContinuousRecovery recover_continuous(const BiasedRows& rows, const ExternalSample& external, double x,
                                      const Grid& grid, const KdeSettings& settings = {});

/// Plain KDE of Y over the biased rows with treatment x.
GriddedDensity biased_continuous(const BiasedRows& rows, double x, const Grid& grid, Exec exec = Exec::Parallel);

}  // namespace twinrec
