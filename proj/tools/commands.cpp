#include "commands.hpp"

#include "svg.hpp"

#include "twinrecover/discrete.hpp"
#include "twinrecover/dsep.hpp"
#include "twinrecover/graph.hpp"
#include "twinrecover/io.hpp"
#include "twinrecover/kde.hpp"
#include "twinrecover/metrics.hpp"
#include "twinrecover/recoverability.hpp"
#include "twinrecover/reproduce.hpp"
#include "twinrecover/scm.hpp"
#include "twinrecover/sweep.hpp"
#include "twinrecover/twin.hpp"
#include "twinrecover/verdict_json.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

namespace twinrec::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNegative = 2;

struct Globals {
    std::uint64_t seed = 0;
    bool json = false;
    std::string out;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Collects the files a command writes under --out and records them in a
// manifest.json sidecar. Without --out nothing is written.
class OutputDir {
public:
    OutputDir(const Globals& g, std::string command, std::vector<std::string> args)
        : dir_(g.out), command_(std::move(command)), args_(std::move(args)) {
        if (active()) fs::create_directories(dir_);
    }

    bool active() const { return !dir_.empty(); }

    void input(const fs::path& p) { inputs_.push_back({p.string(), file_digest(p)}); }
    void seeds(std::vector<std::uint64_t> s) { seeds_ = std::move(s); }
    void config_hash(std::string h) { config_hash_ = std::move(h); }

    void write(const std::string& name, const std::string& content) {
        if (!active()) return;
        atomic_write(fs::path(dir_) / name, content);
        outputs_.push_back({name, hex64(fnv1a64(content))});
    }

    void finish() {
        if (!active()) return;
        json files_in = json::array(), files_out = json::array();
        for (const auto& [p, d] : inputs_) files_in.push_back({{"path", p}, {"fnv1a64", d}});
        for (const auto& [p, d] : outputs_) files_out.push_back({{"path", p}, {"fnv1a64", d}});
        const json m{{"command", command_},
                     {"args", args_},
                     {"config_hash", config_hash_ ? json(*config_hash_) : json(nullptr)},
                     {"inputs", files_in},
                     {"version", kVersion},
                     {"seeds", seeds_},
                     {"timestamp", utc_timestamp()},
                     {"outputs", files_out}};
        atomic_write(fs::path(dir_) / "manifest.json", m.dump(2) + "\n");
    }

private:
    std::string dir_;
    std::string command_;
    std::vector<std::string> args_;
    std::optional<std::string> config_hash_;
    std::vector<std::pair<std::string, std::string>> inputs_, outputs_;
    std::vector<std::uint64_t> seeds_;
};

json graph_json(const CausalGraph& g) {
    json nodes = json::array(), edges = json::array();
    for (NodeId v = 0; v < g.size(); ++v) nodes.push_back({{"name", g.name(v)}, {"kind", to_string(g.kind(v))}});
    for (const auto& [p, c] : g.edges()) edges.push_back({g.name(p), g.name(c)});
    json target = nullptr;
    if (g.target()) target = {{"treatment", g.target()->treatment}, {"outcome", g.target()->outcome}};
    return {{"nodes", nodes}, {"edges", edges}, {"target", target}, {"node_count", g.size()},
            {"edge_count", g.edge_count()}};
}

std::pair<std::string, std::string> resolve_target(const CausalGraph& g, const std::string& x, const std::string& y) {
    std::string tx = x, ty = y;
    if (g.target()) {
        if (tx.empty()) tx = g.target()->treatment;
        if (ty.empty()) ty = g.target()->outcome;
    }
    if (tx.empty() || ty.empty())
        throw std::invalid_argument("no treatment/outcome: pass --x and --y or add a `target X -> Y` line");
    return {tx, ty};
}

// ------------------------------------------------------------------ graphs

CausalGraph read_graph(const std::string& file) {
    try {
        return load_graph(file);
    } catch (const ParseError& e) {
        throw GraphError(file + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " +
                         std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
    }
}

int cmd_parse(const Globals& gl, const std::string& file, std::ostream& out) {
    const CausalGraph g = read_graph(file);
    if (gl.json)
        out << graph_json(g).dump(2) << '\n';
    else
        out << render(g);
    return kOk;
}

int cmd_twin(const Globals& gl, const std::string& file, const std::string& x, const std::string& y,
             std::ostream& out) {
    const CausalGraph g = read_graph(file);
    const auto [tx, ty] = resolve_target(g, x, y);
    const TwinNetwork twin = build_twin(g, tx, ty);
    if (gl.json)
        out << graph_json(twin.graph).dump(2) << '\n';
    else
        out << render_twin(twin);
    return kOk;
}

int cmd_dsep(const Globals& gl, const std::string& file, const std::string& xs, const std::string& ys,
             const std::string& given, bool on_twin, bool explain, std::ostream& out) {
    const CausalGraph factual = read_graph(file);
    std::optional<TwinNetwork> twin;
    if (on_twin) twin = build_twin(factual);
    const CausalGraph& g = twin ? twin->graph : factual;

    const DsepQuery q{NodeSet(split_list(xs)), NodeSet(split_list(ys)), NodeSet(split_list(given))};
    if (q.x.empty() || q.y.empty()) throw std::invalid_argument("--x and --y need at least one node each");
    const DsepEngine engine(g);
    const bool sep = engine.separated(q);
    std::optional<std::string> path;
    if (!sep && explain)
        if (auto p = engine.active_path(q)) path = format_path(g, *p);

    if (gl.json) {
        out << json{{"x", to_json(q.x)},
                    {"y", to_json(q.y)},
                    {"given", to_json(q.z)},
                    {"graph", on_twin ? "twin" : "factual"},
                    {"separated", sep},
                    {"path", path ? json(*path) : json(nullptr)}}
                   .dump()
            << '\n';
    } else {
        out << (sep ? "separated" : "connected") << '\n';
        if (path) out << *path << '\n';
    }
    return kOk;
}

void print_steps(std::ostream& out, const std::vector<DerivationStep>& steps, const std::string& indent) {
    for (const auto& s : steps) out << indent << s.text << '\n';
}

int cmd_decide(const Globals& gl, const std::string& file, const std::string& x, const std::string& y,
               const std::optional<std::string>& measured, const std::string& external, std::size_t max_size,
               std::size_t depth, const std::vector<std::string>& args, std::ostream& out) {
    OutputDir dir(gl, "decide", args);
    dir.input(file);
    const CausalGraph g = read_graph(file);
    const auto [tx, ty] = resolve_target(g, x, y);

    DataRegime regime;
    regime.biased_measured =
        measured ? NodeSet(split_list(*measured)) : g.nodes_of_kind(NodeKind::Endogenous);
    regime.external_unbiased = NodeSet(split_list(external));
    DecideOptions opts;
    opts.max_size = max_size;
    opts.depth_budget = depth;

    const RecoverabilityVerdict v = decide(g, tx, ty, regime, opts);
    const json j = verdict_json(v, tx, ty, regime, opts);
    dir.write("verdict.json", j.dump(2) + "\n");
    dir.finish();

    if (gl.json) {
        out << j.dump(2) << '\n';
    } else {
        out << "verdict: " << verdict_kind(v) << '\n';
        if (const auto* f = std::get_if<Failure>(&v)) {
            out << "reason: " << f->reason << '\n';
            print_steps(out, f->trace, "  ");
        } else {
            const auto plans = is_natural(v) ? std::vector<FormulaPlan>{std::get<Natural>(v).plan}
                                             : std::get<RecoverableWith>(v).plans;
            for (const auto& p : plans) {
                out << "plan " << p.adjustment_set.str() << ": " << p.formula << '\n';
                print_steps(out, p.derivation, "  ");
            }
        }
    }
    return is_failure(v) ? kNegative : kOk;
}

// -------------------------------------------------------------- estimators

int cmd_recover_discrete(const Globals& gl, const std::string& biased_file, const std::string& external_file,
                         const std::string& x_var, const std::string& y_var, std::optional<int> x,
                         const std::vector<std::string>& args, std::ostream& out) {
    OutputDir dir(gl, "recover-discrete", args);
    dir.input(biased_file);
    dir.input(external_file);
    const DiscreteTable biased = load_discrete_table(biased_file);
    const DiscreteTable external = load_discrete_table(external_file);

    const std::vector<int> arms = x ? std::vector<int>{*x} : biased.support(x_var);
    std::ostringstream csv;
    csv << x_var << ',' << y_var << ",recovered,recovered_fraction,biased,biased_fraction\n";
    json rows = json::array();
    for (int arm : arms) {
        const DiscreteTable rec = recover_discrete(biased, external, x_var, y_var, arm);
        const DiscreteTable naive = biased_discrete(biased, x_var, y_var, arm);
        std::set<int> ys;
        for (const auto& [a, w] : rec.cells()) ys.insert(a[0]);
        for (const auto& [a, w] : naive.cells()) ys.insert(a[0]);
        for (int yv : ys) {
            const Rational r = rec.at({yv}), b = naive.at({yv});
            csv << arm << ',' << yv << ',' << format_double(to_double(r)) << ',' << to_fraction_string(r) << ','
                << format_double(to_double(b)) << ',' << to_fraction_string(b) << '\n';
            rows.push_back({{"x", arm},
                            {"y", yv},
                            {"recovered", to_double(r)},
                            {"recovered_fraction", to_fraction_string(r)},
                            {"biased", to_double(b)},
                            {"biased_fraction", to_fraction_string(b)}});
        }
    }
    const json j{{"x_var", x_var}, {"y_var", y_var}, {"strata", external.variables()}, {"rows", rows}};
    dir.write("recovered.csv", csv.str());
    dir.write("recovered.json", j.dump(2) + "\n");
    dir.finish();
    out << (gl.json ? j.dump(2) + "\n" : csv.str());
    return kOk;
}

Column numeric_column(const CsvTable& t, const std::string& name, const std::string& source) {
    const std::size_t idx = t.column(name);
    Column col;
    col.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string& cell = t.rows[r][idx];
        try {
            std::size_t used = 0;
            col.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw std::invalid_argument(source + ": row " + std::to_string(r + 2) + ", column " + name +
                                        ": not a number: '" + cell + "'");
        }
    }
    return col;
}

json diagnostics_json(const RecoveryDiagnostics& d) {
    json fallbacks = json::array();
    for (const auto& [c, donor] : d.fallbacks) fallbacks.push_back({{"cell", c}, {"donor", donor}});
    return {{"bandwidth_rule", d.bandwidth_rule},
            {"arm_size", d.arm_size},
            {"bins_per_axis", d.bins_per_axis},
            {"cell_counts", d.cell_counts},
            {"cell_weights", d.cell_weights},
            {"effective_weights", d.effective_weights},
            {"bandwidths", d.bandwidths},
            {"fallbacks", fallbacks},
            {"mass_before_normalization", d.mass_before_normalization}};
}

BandwidthRule parse_bandwidth(const std::string& s) {
    if (s == "pooled") return BandwidthRule::Pooled;
    if (s == "per-cell") return BandwidthRule::PerCell;
    throw std::invalid_argument("--bandwidth must be pooled or per-cell, got '" + s + "'");
}

struct ContinuousArgs {
    std::string biased, external, x_var = "x", y_var = "y";
    std::optional<double> x;
    KdeSettings kde;
    std::string bandwidth = "pooled";
    std::optional<double> grid_min, grid_max;
    std::size_t grid_points = 512;
};

int cmd_recover_continuous(const Globals& gl, ContinuousArgs a, const std::vector<std::string>& args,
                           std::ostream& out) {
    OutputDir dir(gl, "recover-continuous", args);
    dir.input(a.biased);
    dir.input(a.external);
    a.kde.bandwidth = parse_bandwidth(a.bandwidth);

    const CsvTable bt = read_csv_file(a.biased);
    const CsvTable et = read_csv_file(a.external);
    BiasedRows rows;
    rows.x = numeric_column(bt, a.x_var, a.biased);
    rows.y = numeric_column(bt, a.y_var, a.biased);
    std::vector<std::string> covs;
    for (const auto& h : bt.header)
        if (h != a.x_var && h != a.y_var) covs.push_back(h);
    ExternalSample ext;
    for (const auto& c : covs) {
        if (!et.has_column(c)) throw std::invalid_argument(a.external + ": missing covariate column '" + c + "'");
        rows.covariates.push_back(numeric_column(bt, c, a.biased));
        ext.covariates.push_back(numeric_column(et, c, a.external));
    }

    std::vector<double> arms;
    if (a.x) {
        arms.push_back(*a.x);
    } else {
        std::set<double> distinct(rows.x.begin(), rows.x.end());
        arms.assign(distinct.begin(), distinct.end());
    }
    if (rows.y.empty()) throw std::invalid_argument(a.biased + ": no rows");

    // One grid for every arm: the data range padded by three bandwidths.
    const auto [lo, hi] = std::minmax_element(rows.y.begin(), rows.y.end());
    const double pad = 3.0 * std::max(silverman_bandwidth(rows.y), 1e-3);
    const Grid grid{a.grid_min.value_or(*lo - pad), a.grid_max.value_or(*hi + pad), a.grid_points};
    grid.validate();

    std::vector<std::pair<std::string, GriddedDensity>> columns;
    json diags = json::array();
    for (double arm : arms) {
        const std::string tag = "x" + format_double(arm);
        const ContinuousRecovery rec = recover_continuous(rows, ext, arm, grid, a.kde);
        const GriddedDensity naive = biased_continuous(rows, arm, grid, a.kde.exec);
        json d = diagnostics_json(rec.diagnostics);
        d["x"] = arm;
        d["covariates"] = covs;
        d["grid"] = {{"min", grid.min}, {"max", grid.max}, {"points", grid.points}};
        dir.write("recovered_" + tag + ".csv", density_csv(rec.density));
        dir.write("biased_" + tag + ".csv", density_csv(naive));
        dir.write("diagnostics_" + tag + ".json", d.dump(2) + "\n");
        diags.push_back(d);
        columns.push_back({"recovered_" + tag, rec.density});
        columns.push_back({"biased_" + tag, naive});
    }
    dir.finish();

    if (gl.json) {
        out << diags.dump(2) << '\n';
    } else if (arms.size() == 1) {
        out << density_csv(columns.front().second);
    } else {
        out << "grid";
        for (const auto& [name, d] : columns) out << ',' << name;
        out << '\n';
        for (std::size_t i = 0; i < grid.points; ++i) {
            out << format_double(grid.at(i));
            for (const auto& [name, d] : columns) out << ',' << format_double(d.values[i]);
            out << '\n';
        }
    }
    return kOk;
}

// ----------------------------------------------------------------- metrics

LogBase parse_log_base(const std::string& s) {
    if (s == "e" || s == "natural") return LogBase::Natural;
    if (s == "2") return LogBase::Two;
    throw std::invalid_argument("--js-base must be e or 2, got '" + s + "'");
}

int cmd_metrics(const std::string& a, const std::string& b, const std::string& base, std::ostream& out) {
    const LogBase lb = parse_log_base(base);
    const GriddedDensity da = read_density_csv(read_text_file(a), a);
    const GriddedDensity db = read_density_csv(read_text_file(b), b);
    json j = to_json(compare(da, db, lb));
    j["js_base"] = lb == LogBase::Two ? "2" : "e";
    out << j.dump() << '\n';
    return kOk;
}

// ---------------------------------------------------------------- simulation

ScmConfigFile resolve_config(const std::string& config, const std::string& model) {
    if (!config.empty() && !model.empty()) throw std::invalid_argument("pass either --config or --model, not both");
    if (!config.empty()) return load_scm_config(config);
    const std::string preset = model.empty() ? "basic" : model;
    return parse_scm_config("preset = " + preset + "\n", "--model");
}

int cmd_simulate(const Globals& gl, const std::string& config, const std::string& model, std::size_t n,
                 const std::vector<std::string>& args, std::ostream& out) {
    OutputDir dir(gl, "simulate", args);
    if (!config.empty()) dir.input(config);
    const ScmConfigFile cfg = resolve_config(config, model);
    dir.config_hash(cfg.hash());
    dir.seeds({gl.seed});

    std::string dataset;
    Provenance prov;
    if (cfg.model == "discrete") {
        const DiscreteDataset d = simulate_discrete(cfg.discrete, n, gl.seed);
        dataset = d.csv();
        prov = d.provenance;
        dir.write("biased_counts.csv", write_discrete_table(d.biased_counts()));
        DiscreteTable pz({"z"}, DiscreteTable::Weights::Probabilities);
        pz.add({0}, 1 - cfg.discrete.p_z);
        pz.add({1}, cfg.discrete.p_z);
        dir.write("external.csv", write_discrete_table(pz));
    } else {
        const ContinuousDataset d = simulate_continuous(cfg.continuous, n, gl.seed);
        dataset = d.csv();
        prov = d.provenance;
        const BiasedRows rows = d.biased({"W", "Z"});
        std::ostringstream b, e;
        b << "x,w,z,y\n";
        for (std::size_t i = 0; i < rows.size(); ++i)
            b << format_double(rows.x[i]) << ',' << format_double(rows.covariates[0][i]) << ','
              << format_double(rows.covariates[1][i]) << ',' << format_double(rows.y[i]) << '\n';
        e << "w,z\n";
        for (std::size_t i = 0; i < d.external_w.size(); ++i)
            e << format_double(d.external_w[i]) << ',' << format_double(d.external_z[i]) << '\n';
        dir.write("biased.csv", b.str());
        dir.write("external.csv", e.str());
    }
    dir.write("dataset.csv", dataset);
    dir.finish();

    const json pj{{"model", cfg.model},   {"config_hash", prov.config_hash}, {"seed", prov.seed},
                  {"n_requested", prov.n_requested}, {"n_selected", prov.n_selected}, {"pool_size", prov.pool_size}};
    out << (gl.json ? pj.dump() + "\n" : dataset);
    return kOk;
}

struct SweepArgs {
    std::string config, model;
    std::size_t seeds = 50;
    std::string sizes;
    std::size_t bins = 10, min_cell = 2;
    std::string bandwidth = "pooled";
    std::string js_base = "e";
    std::string adjust;
    bool serial = false;
};

SweepSettings sweep_settings(const Globals& gl, const SweepArgs& a) {
    SweepSettings s;
    if (!a.sizes.empty()) {
        s.sizes.clear();
        for (const auto& t : split_list(a.sizes)) s.sizes.push_back(std::stoul(t));
    }
    if (a.seeds == 0) throw std::invalid_argument("--seeds must be positive");
    for (std::size_t i = 0; i < a.seeds; ++i) s.seeds.push_back(gl.seed + i);
    s.kde.bins = a.bins;
    s.kde.min_cell = a.min_cell;
    s.kde.bandwidth = parse_bandwidth(a.bandwidth);
    s.kde.exec = Exec::Serial;
    s.log_base = parse_log_base(a.js_base);
    if (!a.adjust.empty()) s.adjustment = split_list(a.adjust);
    s.exec = a.serial ? Exec::Serial : Exec::Parallel;
    return s;
}

json sweep_json(const SweepResult& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"n", row.n},
                        {"recovered", to_json(row.recovered)},
                        {"biased", to_json(row.biased)},
                        {"recovered_of_mean", to_json(row.recovered_of_mean)},
                        {"biased_of_mean", to_json(row.biased_of_mean)},
                        {"cells_ok", row.cells_ok},
                        {"cells_failed", row.cells_failed}});
    return {{"adjustment", r.adjustment}, {"config_hash", r.config_hash}, {"arms", r.arms}, {"rows", rows}};
}

void write_sweep_files(OutputDir& dir, const SweepResult& r, const std::string& title) {
    dir.write("table.csv", sweep_table_csv(r));
    dir.write("table_of_mean.csv", sweep_table_csv(r, true));
    dir.write("cells.csv", sweep_cells_csv(r));
    dir.write("sweep.json", sweep_json(r).dump(2) + "\n");

    svg::Chart l1{title + ": L1 error", "sample size n", "mean L1", true, {}};
    svg::Series rec{"recovered", {}, {}, "", false}, bias{"biased", {}, {}, "", true};
    for (const auto& row : r.rows) {
        rec.x.push_back(static_cast<double>(row.n));
        rec.y.push_back(row.recovered.l1);
        bias.x.push_back(static_cast<double>(row.n));
        bias.y.push_back(row.biased.l1);
    }
    l1.series = {rec, bias};
    dir.write("l1.svg", svg::render(l1));

    if (r.rows.empty()) return;
    const std::size_t last = r.rows.size() - 1;
    for (std::size_t a = 0; a < r.arms.size(); ++a) {
        const std::string tag = "x" + format_double(r.arms[a]);
        svg::Chart dens{title + ": densities at n=" + std::to_string(r.rows[last].n) + ", " + tag, "y", "density",
                        false, {}};
        auto series = [](const std::string& label, const GriddedDensity& d, bool dashed) {
            svg::Series s{label, {}, d.values, "", dashed};
            for (std::size_t i = 0; i < d.grid.points; ++i) s.x.push_back(d.grid.at(i));
            return s;
        };
        dens.series = {series("truth", r.truths[a], false), series("recovered (seed mean)", r.mean_recovered[last][a], false),
                       series("biased (seed mean)", r.mean_biased[last][a], true)};
        dens.series[0].color = "#000000";
        dir.write("densities_" + tag + ".svg", svg::render(dens));
    }
}

int cmd_sweep(const Globals& gl, const SweepArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    OutputDir dir(gl, "sweep", args);
    if (!a.config.empty()) dir.input(a.config);
    const ScmConfigFile cfg = resolve_config(a.config, a.model);
    if (cfg.model != "continuous") throw std::invalid_argument("sweep runs the continuous model only");
    const SweepSettings s = sweep_settings(gl, a);
    dir.config_hash(cfg.hash());
    dir.seeds(s.seeds);

    const SweepResult r = sweep(cfg.continuous, s);
    write_sweep_files(dir, r, "sweep");
    dir.finish();
    out << (gl.json ? sweep_json(r).dump(2) + "\n" : sweep_table_csv(r));
    return kOk;
}

// --------------------------------------------------------------- reproduce

int cmd_reproduce(const Globals& gl, const std::string& id, const SweepArgs& a, const std::vector<std::string>& args,
                  std::ostream& out) {
    OutputDir dir(gl, "reproduce " + id, args);
    std::vector<Check> checks;
    std::string report;
    json doc;

    if (id == "discrete") {
        const DiscreteScmConfig truth = DiscreteScmConfig::pneumonia();
        dir.config_hash(hex64(fnv1a64(truth.canonical())));
        const DiscreteReport r = reproduce_discrete(pneumonia_trial_counts(), severity_external(), truth);
        checks = r.checks;
        report = r.text();
        doc = r.json();
        dir.write("report.csv", report);
    } else if (id == "continuous" || id == "advanced") {
        const ContinuousScmConfig cfg =
            id == "continuous" ? ContinuousScmConfig::basic() : ContinuousScmConfig::advanced();
        const ContinuousTargets targets = id == "continuous" ? basic_targets() : advanced_targets();
        SweepArgs sa = a;
        const SweepSettings s = sweep_settings(gl, sa);
        dir.config_hash(hex64(fnv1a64(cfg.canonical())));
        dir.seeds(s.seeds);
        const SweepResult r = sweep(cfg, s);
        checks = continuous_checks(r, targets);
        report = continuous_report(r, targets);
        doc = sweep_json(r);
        json cj = json::array();
        for (const auto& c : checks) cj.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        doc["checks"] = cj;
        write_sweep_files(dir, r, targets.label);
        dir.write("comparison.txt", report);
    } else {
        throw std::invalid_argument("unknown experiment '" + id + "' (expected discrete, continuous or advanced)");
    }

    const std::string summary = format_checks(checks);
    dir.write("summary.txt", summary);
    dir.write("report.json", doc.dump(2) + "\n");
    dir.finish();

    if (gl.json)
        out << doc.dump(2) << '\n';
    else
        out << report << '\n' << summary;
    return all_pass(checks) ? kOk : kNegative;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Decide and execute recovery of experimental distributions from selection-biased data",
                 "twinrecover"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    Globals gl;
    app.add_option("--seed", gl.seed, "Seed for every random draw")->capture_default_str();
    app.add_flag("--json", gl.json, "Machine-readable JSON on stdout");
    app.add_option("--out", gl.out, "Directory for output files and manifest.json");

    std::string file, x, y;

    auto* parse = app.add_subcommand("parse", "Validate a graph file and print its canonical form");
    parse->add_option("graph", file, "Graph file")->required();

    auto* twin = app.add_subcommand("twin", "Print the twin network of a graph");
    twin->add_option("graph", file, "Graph file")->required();
    twin->add_option("--x", x, "Treatment (default: the graph's target)");
    twin->add_option("--y", y, "Outcome (default: the graph's target)");

    std::string given;
    bool on_twin = false, explain = false;
    auto* dsep = app.add_subcommand("dsep", "Test a d-separation statement");
    dsep->add_option("graph", file, "Graph file")->required();
    dsep->add_option("--x", x, "Comma-separated node list")->required();
    dsep->add_option("--y", y, "Comma-separated node list")->required();
    dsep->add_option("--given", given, "Comma-separated conditioning set");
    dsep->add_flag("--twin", on_twin, "Query the twin network built from the graph's target");
    dsep->add_flag("--explain", explain, "Print one active path when connected");

    std::optional<std::string> measured;
    std::string external;
    std::size_t max_size = 4, depth = 8;
    auto* decide_cmd = app.add_subcommand("decide", "Decide recoverability and list recovery formulas");
    decide_cmd->alias("analyze");
    decide_cmd->add_option("graph", file, "Graph file")->required();
    decide_cmd->add_option("--x", x, "Treatment (default: the graph's target)");
    decide_cmd->add_option("--y", y, "Outcome (default: the graph's target)");
    decide_cmd->add_option("--measured", measured, "Variables measured in the biased experiment (default: all endogenous)");
    decide_cmd->add_option("--external", external, "Variables with known unbiased distribution (default: none)");
    decide_cmd->add_option("--max-size", max_size, "Largest adjustment set searched")->capture_default_str();
    decide_cmd->add_option("--depth", depth, "RC recursion depth budget")->capture_default_str();

    std::string biased_file, external_file, x_var = "x", y_var = "y";
    std::optional<int> x_int;
    auto* rd = app.add_subcommand("recover-discrete", "Exact recovery from biased counts and external strata");
    rd->add_option("--biased", biased_file, "Biased counts CSV")->required()->check(CLI::ExistingFile);
    rd->add_option("--external", external_file, "External stratum probabilities CSV")->required()->check(CLI::ExistingFile);
    rd->add_option("--x-var", x_var, "Treatment column")->capture_default_str();
    rd->add_option("--y-var", y_var, "Outcome column")->capture_default_str();
    rd->add_option("--x", x_int, "Treatment value (default: every value present)");

    ContinuousArgs ca;
    auto* rc_cmd = app.add_subcommand("recover-continuous", "Binned kernel-density recovery of a continuous outcome");
    rc_cmd->add_option("--biased", ca.biased, "Biased rows CSV (treatment, covariates, outcome)")->required()->check(CLI::ExistingFile);
    rc_cmd->add_option("--external", ca.external, "External covariate sample CSV")->required()->check(CLI::ExistingFile);
    rc_cmd->add_option("--x-var", ca.x_var, "Treatment column")->capture_default_str();
    rc_cmd->add_option("--y-var", ca.y_var, "Outcome column")->capture_default_str();
    rc_cmd->add_option("--x", ca.x, "Treatment value (default: every value present)");
    rc_cmd->add_option("--bins", ca.kde.bins, "Quantile bins per covariate axis")->capture_default_str();
    rc_cmd->add_option("--min-cell", ca.kde.min_cell, "Smallest populated cell")->capture_default_str();
    rc_cmd->add_option("--bandwidth", ca.bandwidth, "pooled or per-cell")->capture_default_str();
    rc_cmd->add_option("--grid-min", ca.grid_min, "Grid start (default: data minimum minus three bandwidths)");
    rc_cmd->add_option("--grid-max", ca.grid_max, "Grid end (default: data maximum plus three bandwidths)");
    rc_cmd->add_option("--grid-points", ca.grid_points, "Grid size")->capture_default_str();

    std::string density_a, density_b, js_base = "e";
    auto* metrics = app.add_subcommand("metrics", "Compare two gridded densities");
    metrics->add_option("a", density_a, "Density CSV (grid,value)")->required()->check(CLI::ExistingFile);
    metrics->add_option("b", density_b, "Density CSV (grid,value)")->required()->check(CLI::ExistingFile);
    metrics->add_option("--js-base", js_base, "Logarithm base for JS: e or 2")->capture_default_str();

    std::string config, model;
    std::size_t n = 1000;
    auto* simulate = app.add_subcommand("simulate", "Draw a dataset from a structural model");
    simulate->add_option("--config", config, "key = value model file")->check(CLI::ExistingFile);
    simulate->add_option("--model", model, "Preset: basic, advanced or pneumonia");
    simulate->add_option("--n", n, "Selected units to draw")->capture_default_str();

    SweepArgs sa;
    auto add_sweep_options = [&](CLI::App* sub) {
        sub->add_option("--seeds", sa.seeds, "Number of seeds, starting at --seed")->capture_default_str();
        sub->add_option("--sizes", sa.sizes, "Comma-separated sample sizes (default 100,200,500,1000,2000,4000)");
        sub->add_option("--bins", sa.bins, "Quantile bins per covariate axis")->capture_default_str();
        sub->add_option("--min-cell", sa.min_cell, "Smallest populated cell")->capture_default_str();
        sub->add_option("--bandwidth", sa.bandwidth, "pooled or per-cell")->capture_default_str();
        sub->add_option("--js-base", sa.js_base, "Logarithm base for JS: e or 2")->capture_default_str();
        sub->add_flag("--serial", sa.serial, "Run sweep jobs on one thread");
    };
    auto* sweep_cmd = app.add_subcommand("sweep", "Error metrics over sample sizes and seeds");
    sweep_cmd->add_option("--config", sa.config, "key = value model file")->check(CLI::ExistingFile);
    sweep_cmd->add_option("--model", sa.model, "Preset: basic or advanced");
    sweep_cmd->add_option("--adjust", sa.adjust, "Override the adjustment covariates, e.g. W,Z");
    add_sweep_options(sweep_cmd);

    std::string experiment;
    auto* reproduce = app.add_subcommand("reproduce", "Reproduce a published experiment and check it");
    reproduce->add_option("experiment", experiment, "discrete, continuous or advanced")->required();
    add_sweep_options(reproduce);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        if (parse->parsed()) return cmd_parse(gl, file, out);
        if (twin->parsed()) return cmd_twin(gl, file, x, y, out);
        if (dsep->parsed()) return cmd_dsep(gl, file, x, y, given, on_twin, explain, out);
        if (decide_cmd->parsed()) return cmd_decide(gl, file, x, y, measured, external, max_size, depth, args, out);
        if (rd->parsed()) return cmd_recover_discrete(gl, biased_file, external_file, x_var, y_var, x_int, args, out);
        if (rc_cmd->parsed()) return cmd_recover_continuous(gl, ca, args, out);
        if (metrics->parsed()) return cmd_metrics(density_a, density_b, js_base, out);
        if (simulate->parsed()) return cmd_simulate(gl, config, model, n, args, out);
        if (sweep_cmd->parsed()) return cmd_sweep(gl, sa, args, out);
        if (reproduce->parsed()) return cmd_reproduce(gl, experiment, sa, args, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

}  // namespace twinrec::cli
