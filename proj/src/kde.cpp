#include "twinrecover/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace twinrec {

double quantile(Column v, double p) {
    if (v.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(v.begin(), v.end());
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double silverman_bandwidth(const Column& y) {
    const std::size_t n = y.size();
    if (n < 2) return 0.0;
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double ss = 0;
    for (double v : y) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double iqr = quantile(y, 0.75) - quantile(y, 0.25);
    const double spread = iqr > 0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

double weighted_silverman_bandwidth(const Column& y, const Column& w) {
    if (y.size() != w.size()) throw std::invalid_argument("weight count mismatch");
    if (y.size() < 2) return 0.0;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(total > 0)) throw std::invalid_argument("weights sum to zero");
    double mean = 0, sumsq = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        mean += w[i] / total * y[i];
        sumsq += (w[i] / total) * (w[i] / total);
    }
    double var = 0;
    for (std::size_t i = 0; i < y.size(); ++i) var += w[i] / total * (y[i] - mean) * (y[i] - mean);
    const double n_eff = 1.0 / sumsq;
    if (n_eff > 1) var *= n_eff / (n_eff - 1);
    const double sd = std::sqrt(var);

    std::vector<std::size_t> order(y.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return y[a] < y[b]; });
    auto wq = [&](double p) {
        double cum = 0;
        for (auto i : order) {
            cum += w[i] / total;
            if (cum >= p) return y[i];
        }
        return y[order.back()];
    };
    const double iqr = wq(0.75) - wq(0.25);
    const double spread = iqr > 0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(n_eff, -0.2);
}

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

void check_kde_inputs(const Column& samples, double h, const Grid& grid, const Column* weights) {
    grid.validate();
    if (samples.empty()) throw std::invalid_argument("KDE needs at least one sample");
    if (!(h > 0)) throw std::invalid_argument("KDE bandwidth must be positive");
    if (weights && weights->size() != samples.size()) throw std::invalid_argument("KDE weight count mismatch");
}

double weight_total(const Column& samples, const Column* weights) {
    if (!weights) return static_cast<double>(samples.size());
    const double t = std::accumulate(weights->begin(), weights->end(), 0.0);
    if (!(t > 0)) throw std::invalid_argument("KDE weights sum to zero");
    return t;
}

}  // namespace

GriddedDensity gaussian_kde_serial(const Column& samples, double h, const Grid& grid, const Column* weights) {
    check_kde_inputs(samples, h, grid, weights);
    const double norm = 1.0 / (weight_total(samples, weights) * h) * kInvSqrt2Pi;
    GriddedDensity d{grid, std::vector<double>(grid.points, 0.0)};
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const double w = weights ? (*weights)[s] : 1.0;
        for (std::size_t i = 0; i < grid.points; ++i) {
            const double u = (grid.at(i) - samples[s]) / h;
            d.values[i] += w * std::exp(-0.5 * u * u);
        }
    }
    for (auto& v : d.values) v *= norm;
    return d;
}

GriddedDensity gaussian_kde_parallel(const Column& samples, double h, const Grid& grid, const Column* weights) {
    check_kde_inputs(samples, h, grid, weights);
    const double norm = 1.0 / (weight_total(samples, weights) * h) * kInvSqrt2Pi;
    GriddedDensity d{grid, std::vector<double>(grid.points, 0.0)};
    const long points = static_cast<long>(grid.points);
    const double* ys = samples.data();
    const double* ws = weights ? weights->data() : nullptr;
    const std::size_t n = samples.size();
#pragma omp parallel for schedule(static) num_threads(thread_budget())
    for (long i = 0; i < points; ++i) {
        const double g = grid.at(static_cast<std::size_t>(i));
        double acc = 0;
        for (std::size_t s = 0; s < n; ++s) {
            const double u = (g - ys[s]) / h;
            acc += (ws ? ws[s] : 1.0) * std::exp(-0.5 * u * u);
        }
        d.values[static_cast<std::size_t>(i)] = acc * norm;
    }
    return d;
}

GriddedDensity gaussian_kde(const Column& samples, double h, const Grid& grid, Exec exec, const Column* weights) {
    return exec == Exec::Parallel ? gaussian_kde_parallel(samples, h, grid, weights)
                                  : gaussian_kde_serial(samples, h, grid, weights);
}

namespace {

std::vector<std::size_t> arm_rows(const BiasedRows& rows, double x) {
    if (rows.x.size() != rows.y.size()) throw std::invalid_argument("x and y columns differ in length");
    for (const auto& c : rows.covariates)
        if (c.size() != rows.y.size()) throw std::invalid_argument("covariate column length differs from y");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (std::abs(rows.x[i] - x) < 1e-9) idx.push_back(i);
    return idx;
}

/// Number of cut points strictly below v.
std::size_t cell_of(const std::vector<double>& cuts, double v) {
    return static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
}

double ipow(std::size_t b, std::size_t k) {
    double r = 1;
    for (std::size_t i = 0; i < k; ++i) r *= static_cast<double>(b);
    return r;
}

}  // namespace

ContinuousRecovery recover_continuous(const BiasedRows& rows, const ExternalSample& external, double x,
                                      const Grid& grid, const KdeSettings& settings) {
    grid.validate();
    const std::size_t k = rows.covariates.size();
    if (k == 0) throw std::invalid_argument("recovery needs at least one adjustment covariate");
    if (external.covariates.size() != k)
        throw std::invalid_argument("external sample has " + std::to_string(external.covariates.size()) +
                                    " covariates, biased rows have " + std::to_string(k));
    const std::size_t n_ext = external.covariates.front().size();
    if (n_ext == 0) throw std::invalid_argument("external sample is empty");
    for (const auto& c : external.covariates)
        if (c.size() != n_ext) throw std::invalid_argument("external covariate columns differ in length");
    if (settings.bins == 0 || settings.min_cell == 0) throw std::invalid_argument("bins and min_cell must be positive");

    const auto arm = arm_rows(rows, x);
    if (arm.size() < 2) throw std::invalid_argument("treatment arm x=" + std::to_string(x) + " has fewer than 2 rows");

    ContinuousRecovery out;
    auto& diag = out.diagnostics;
    diag.arm_size = arm.size();

    std::size_t b = settings.bins;
    while (b > 1 && static_cast<double>(arm.size()) / ipow(b, k) < static_cast<double>(settings.min_cell)) --b;
    diag.bins_per_axis.assign(k, b);
    std::size_t ncell = 1;
    for (std::size_t j = 0; j < k; ++j) ncell *= b;

    std::vector<std::vector<double>> cuts(k);
    for (std::size_t j = 0; j < k; ++j) {
        Column sorted = external.covariates[j];
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t q = 1; q < b; ++q)
            cuts[j].push_back(quantile(sorted, static_cast<double>(q) / static_cast<double>(b)));
    }
    auto flat_cell = [&](auto&& value_of) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < k; ++j) c = c * b + cell_of(cuts[j], value_of(j));
        return c;
    };

    diag.cell_weights.assign(ncell, 0.0);
    for (std::size_t i = 0; i < n_ext; ++i)
        diag.cell_weights[flat_cell([&](std::size_t j) { return external.covariates[j][i]; })] += 1.0;
    for (auto& w : diag.cell_weights) w /= static_cast<double>(n_ext);

    std::vector<Column> cell_y(ncell);
    for (auto i : arm) cell_y[flat_cell([&](std::size_t j) { return rows.covariates[j][i]; })].push_back(rows.y[i]);
    diag.cell_counts.resize(ncell);
    for (std::size_t c = 0; c < ncell; ++c) diag.cell_counts[c] = cell_y[c].size();

    std::vector<std::size_t> populated;
    for (std::size_t c = 0; c < ncell; ++c)
        if (cell_y[c].size() >= settings.min_cell) populated.push_back(c);
    if (populated.empty())
        throw std::invalid_argument("every covariate cell has fewer than " + std::to_string(settings.min_cell) +
                                    " rows in arm x=" + std::to_string(x));

    auto axis_index = [&](std::size_t c) {
        std::vector<std::size_t> idx(k);
        for (std::size_t j = k; j-- > 0;) {
            idx[j] = c % b;
            c /= b;
        }
        return idx;
    };
    diag.effective_weights.assign(ncell, 0.0);
    for (std::size_t c = 0; c < ncell; ++c) {
        if (diag.cell_weights[c] == 0) continue;
        if (cell_y[c].size() >= settings.min_cell) {
            diag.effective_weights[c] += diag.cell_weights[c];
            continue;
        }
        const auto here = axis_index(c);
        std::size_t donor = populated.front();
        double best = std::numeric_limits<double>::infinity();
        for (auto p : populated) {
            const auto there = axis_index(p);
            double d = 0;
            for (std::size_t j = 0; j < k; ++j) {
                const double diff = static_cast<double>(here[j]) - static_cast<double>(there[j]);
                d += diff * diff;
            }
            if (d < best) {
                best = d;
                donor = p;
            }
        }
        diag.effective_weights[donor] += diag.cell_weights[c];
        diag.fallbacks.emplace_back(c, donor);
    }

    Column arm_y;
    for (auto i : arm) arm_y.push_back(rows.y[i]);
    const double arm_h = silverman_bandwidth(arm_y);

    diag.bandwidths.assign(ncell, 0.0);
    if (settings.bandwidth == BandwidthRule::Pooled) {
        diag.bandwidth_rule = "weighted silverman-0.9 pooled";
        Column ys, ws;
        for (std::size_t c = 0; c < ncell; ++c) {
            if (diag.effective_weights[c] == 0) continue;
            for (double v : cell_y[c]) {
                ys.push_back(v);
                ws.push_back(diag.effective_weights[c] / static_cast<double>(cell_y[c].size()));
            }
        }
        double h = weighted_silverman_bandwidth(ys, ws);
        if (!(h > 0)) h = arm_h;
        if (!(h > 0)) throw std::invalid_argument("outcome has no spread in arm x=" + std::to_string(x));
        for (std::size_t c = 0; c < ncell; ++c)
            if (diag.effective_weights[c] > 0) diag.bandwidths[c] = h;
        out.density = gaussian_kde(ys, h, grid, settings.exec, &ws);
        diag.mass_before_normalization = out.density.mass();
        out.density = out.density.normalized();
        return out;
    }
    out.density = GriddedDensity{grid, std::vector<double>(grid.points, 0.0)};
    for (std::size_t c = 0; c < ncell; ++c) {
        if (diag.effective_weights[c] == 0) continue;
        double h = silverman_bandwidth(cell_y[c]);
        if (!(h > 0)) h = arm_h;
        if (!(h > 0)) throw std::invalid_argument("outcome has no spread in arm x=" + std::to_string(x));
        diag.bandwidths[c] = h;
        const auto kde = gaussian_kde(cell_y[c], h, grid, settings.exec);
        for (std::size_t i = 0; i < grid.points; ++i) out.density.values[i] += diag.effective_weights[c] * kde.values[i];
    }
    diag.mass_before_normalization = out.density.mass();
    out.density = out.density.normalized();
    return out;
}

GriddedDensity biased_continuous(const BiasedRows& rows, double x, const Grid& grid, Exec exec) {
    const auto arm = arm_rows(rows, x);
    if (arm.size() < 2) throw std::invalid_argument("treatment arm x=" + std::to_string(x) + " has fewer than 2 rows");
    Column y;
    for (auto i : arm) y.push_back(rows.y[i]);
    const double h = silverman_bandwidth(y);
    if (!(h > 0)) throw std::invalid_argument("outcome has no spread in arm x=" + std::to_string(x));
    return gaussian_kde(y, h, grid, exec).normalized();
}

}  // namespace twinrec
