#include "twinrecover/sweep.hpp"

#include "twinrecover/io.hpp"
#include "twinrecover/recoverability.hpp"

#include <sstream>
#include <variant>

namespace twinrec {

std::vector<std::string> model_adjustment(const ContinuousScmConfig& cfg) {
    const CausalGraph g = cfg.causal_graph();
    const DataRegime regime{NodeSet{"W", "Z"}, NodeSet{"W", "Z"}};
    const auto verdict = decide(g, "X", "Y", regime);
    if (is_natural(verdict)) return {};
    if (const auto* f = std::get_if<Failure>(&verdict))
        throw std::runtime_error("model is not recoverable: " + f->reason);
    return std::get<RecoverableWith>(verdict).plans.front().adjustment_set.names();
}

namespace {

struct ArmDensities {
    bool ok = false;
    std::string error;
    GriddedDensity recovered, biased;
    std::size_t fallbacks = 0;
    double mass = 0;
};

void accumulate(ErrorReport& into, const ErrorReport& r) {
    into.l1 += r.l1;
    into.l2 += r.l2;
    into.js += r.js;
    into.wasserstein += r.wasserstein;
}

void scale(ErrorReport& r, double k) {
    r.l1 *= k;
    r.l2 *= k;
    r.js *= k;
    r.wasserstein *= k;
}

}  // namespace

SweepResult sweep(const ContinuousScmConfig& cfg, const SweepSettings& settings) {
    cfg.validate();
    if (settings.sizes.empty()) throw std::invalid_argument("sweep needs at least one sample size");
    std::vector<std::uint64_t> seeds = settings.seeds;
    if (seeds.empty())
        for (std::uint64_t s = 0; s < 50; ++s) seeds.push_back(s);
    if (settings.arms.empty()) throw std::invalid_argument("sweep needs at least one treatment arm");

    SweepResult result;
    result.adjustment = settings.adjustment ? *settings.adjustment : model_adjustment(cfg);
    result.config_hash = hex64(fnv1a64(cfg.canonical()));

    std::vector<Grid> grids;
    std::vector<GriddedDensity> truths;
    for (double x : settings.arms) {
        const auto spec = cfg.theoretical(x);
        grids.push_back(default_grid(spec, settings.grid_half_width_sd, settings.grid_points));
        truths.push_back(density_of_gaussian(spec, grids.back()));
    }

    const std::size_t na = settings.arms.size();
    const std::size_t jobs = settings.sizes.size() * seeds.size();
    std::vector<ArmDensities> out(jobs * na);
    KdeSettings kde = settings.kde;
    kde.exec = Exec::Serial;  // parallelism lives at the job level

    const long njobs = static_cast<long>(jobs);
    const int threads = settings.exec == Exec::Parallel ? thread_budget() : 1;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (settings.exec == Exec::Parallel)
    for (long j = 0; j < njobs; ++j) {
        const std::size_t n = settings.sizes[static_cast<std::size_t>(j) / seeds.size()];
        const std::uint64_t seed = seeds[static_cast<std::size_t>(j) % seeds.size()];
        try {
            const auto data = simulate_continuous(cfg, n, seed);
            const auto rows = data.biased(result.adjustment);
            const auto ext = data.external(result.adjustment);
            for (std::size_t a = 0; a < na; ++a) {
                auto& slot = out[static_cast<std::size_t>(j) * na + a];
                try {
                    slot.biased = biased_continuous(rows, settings.arms[a], grids[a], Exec::Serial);
                    if (result.adjustment.empty()) {
                        slot.recovered = slot.biased;
                        slot.mass = 1.0;
                    } else {
                        auto rec = recover_continuous(rows, ext, settings.arms[a], grids[a], kde);
                        slot.recovered = std::move(rec.density);
                        slot.fallbacks = rec.diagnostics.fallbacks.size();
                        slot.mass = rec.diagnostics.mass_before_normalization;
                    }
                    slot.ok = true;
                } catch (const std::exception& e) {
                    slot.error = e.what();
                }
            }
        } catch (const std::exception& e) {
            for (std::size_t a = 0; a < na; ++a) out[static_cast<std::size_t>(j) * na + a].error = e.what();
        }
    }

    result.arms = settings.arms;
    result.truths = truths;
    result.mean_recovered.assign(settings.sizes.size(), std::vector<GriddedDensity>(na));
    result.mean_biased.assign(settings.sizes.size(), std::vector<GriddedDensity>(na));
    for (std::size_t si = 0; si < settings.sizes.size(); ++si) {
        SweepRow row;
        row.n = settings.sizes[si];
        std::size_t arms_scored = 0;
        for (std::size_t a = 0; a < na; ++a) {
            std::vector<GriddedDensity> rec, bias;
            ErrorReport rec_sum, bias_sum;
            for (std::size_t k = 0; k < seeds.size(); ++k) {
                const auto& slot = out[(si * seeds.size() + k) * na + a];
                SweepCell cell;
                cell.n = row.n;
                cell.seed = seeds[k];
                cell.arm = settings.arms[a];
                cell.ok = slot.ok;
                cell.error = slot.error;
                if (slot.ok) {
                    cell.recovered = compare(slot.recovered, truths[a], settings.log_base);
                    cell.biased = compare(slot.biased, truths[a], settings.log_base);
                    cell.fallbacks = slot.fallbacks;
                    cell.mass_before_normalization = slot.mass;
                    accumulate(rec_sum, cell.recovered);
                    accumulate(bias_sum, cell.biased);
                    rec.push_back(slot.recovered);
                    bias.push_back(slot.biased);
                    ++row.cells_ok;
                } else {
                    ++row.cells_failed;
                }
                result.cells.push_back(std::move(cell));
            }
            if (rec.empty()) continue;
            ++arms_scored;
            scale(rec_sum, 1.0 / static_cast<double>(rec.size()));
            scale(bias_sum, 1.0 / static_cast<double>(bias.size()));
            accumulate(row.recovered, rec_sum);
            accumulate(row.biased, bias_sum);
            result.mean_recovered[si][a] = average(rec);
            result.mean_biased[si][a] = average(bias);
            accumulate(row.recovered_of_mean, compare(result.mean_recovered[si][a], truths[a], settings.log_base));
            accumulate(row.biased_of_mean, compare(result.mean_biased[si][a], truths[a], settings.log_base));
        }
        if (arms_scored > 0) {
            const double k = 1.0 / static_cast<double>(arms_scored);
            for (auto* r : {&row.recovered, &row.biased, &row.recovered_of_mean, &row.biased_of_mean}) {
                scale(*r, k);
                r->n = row.n;
                r->seeds = seeds.size();
                r->grid = grids.front();
            }
        }
        result.rows.push_back(row);
    }
    return result;
}

std::string sweep_table_csv(const SweepResult& r, bool of_mean) {
    std::ostringstream out;
    out << "n,l1_rec,l1_bias,l2_rec,l2_bias,js_rec,js_bias,w_rec,w_bias\n";
    for (const auto& row : r.rows) {
        const auto& a = of_mean ? row.recovered_of_mean : row.recovered;
        const auto& b = of_mean ? row.biased_of_mean : row.biased;
        out << row.n << ',' << format_double(a.l1) << ',' << format_double(b.l1) << ',' << format_double(a.l2) << ','
            << format_double(b.l2) << ',' << format_double(a.js) << ',' << format_double(b.js) << ','
            << format_double(a.wasserstein) << ',' << format_double(b.wasserstein) << '\n';
    }
    return out.str();
}

std::string sweep_cells_csv(const SweepResult& r) {
    std::ostringstream out;
    out << "n,seed,x,ok,l1_rec,l1_bias,l2_rec,l2_bias,js_rec,js_bias,w_rec,w_bias,fallbacks,mass_before_norm,error\n";
    for (const auto& c : r.cells) {
        out << c.n << ',' << c.seed << ',' << format_double(c.arm) << ',' << (c.ok ? 1 : 0) << ','
            << format_double(c.recovered.l1) << ',' << format_double(c.biased.l1) << ','
            << format_double(c.recovered.l2) << ',' << format_double(c.biased.l2) << ','
            << format_double(c.recovered.js) << ',' << format_double(c.biased.js) << ','
            << format_double(c.recovered.wasserstein) << ',' << format_double(c.biased.wasserstein) << ','
            << c.fallbacks << ',' << format_double(c.mass_before_normalization) << ',';
        std::string err = c.error;
        for (auto& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        out << err << '\n';
    }
    return out.str();
}

}  // namespace twinrec
