#pragma once

#include "twinrecover/kde.hpp"
#include "twinrecover/metrics.hpp"
#include "twinrecover/scm.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace twinrec {

struct SweepSettings {
    std::vector<std::size_t> sizes{100, 200, 500, 1000, 2000, 4000};
    std::vector<std::uint64_t> seeds;  // empty means 0..49
    KdeSettings kde;
    std::size_t grid_points = 512;
    double grid_half_width_sd = 6.0;
    LogBase log_base = LogBase::Natural;
    std::vector<double> arms{0.0, 1.0};
    /// Overrides the adjustment set chosen by the recoverability decision.
    std::optional<std::vector<std::string>> adjustment;
    Exec exec = Exec::Parallel;
};

/// One (n, seed, arm) evaluation.
struct SweepCell {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double arm = 0;
    bool ok = false;
    std::string error;
    ErrorReport recovered, biased;
    std::size_t fallbacks = 0;
    double mass_before_normalization = 0;
};

/// Per sample size. `recovered`/`biased` average the per-seed scores; the
/// `_of_mean` pair scores the seed-averaged densities. Both average over arms.
struct SweepRow {
    std::size_t n = 0;
    ErrorReport recovered, biased;
    ErrorReport recovered_of_mean, biased_of_mean;
    std::size_t cells_ok = 0;
    std::size_t cells_failed = 0;
};

struct SweepResult {
    std::vector<std::string> adjustment;
    std::string config_hash;
    std::vector<SweepRow> rows;
    std::vector<SweepCell> cells;
    std::vector<double> arms;
    /// Indexed [size][arm]: truth per arm, and seed-averaged densities per size and arm.
    std::vector<GriddedDensity> truths;
    std::vector<std::vector<GriddedDensity>> mean_recovered, mean_biased;
};

/// Adjustment covariates for the model's graph: the smallest admissible set
/// when W and Z are both measured and externally known; empty when natural.
std::vector<std::string> model_adjustment(const ContinuousScmConfig& cfg);

SweepResult sweep(const ContinuousScmConfig& cfg, const SweepSettings& settings);

/// n, then l1/l2/js/wasserstein for recovered and biased.
std::string sweep_table_csv(const SweepResult& r, bool of_mean = false);
std::string sweep_cells_csv(const SweepResult& r);

}  // namespace twinrec
