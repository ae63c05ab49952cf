#include "twinrecover/scm.hpp"

#include "twinrecover/io.hpp"
#include "twinrecover/philox.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace twinrec {

namespace {

void check_probability(const Rational& p, const std::string& name) {
    if (p < 0 || p > 1) throw std::invalid_argument(name + " must lie in [0,1]");
}

}  // namespace

DiscreteScmConfig DiscreteScmConfig::pneumonia() {
    DiscreteScmConfig c;
    auto r = [](const char* s) { return parse_rational(s); };
    // index 4x + 2w + z
    c.outcome = {r("0.90"), r("0.50"), r("0.70"), r("0.30"), r("0.95"), r("0.80"), r("0.90"), r("0.60")};
    c.selection = {r("0.3"), r("0.7")};
    return c;
}

void DiscreteScmConfig::validate() const {
    check_probability(p_w, "p_w");
    check_probability(p_z, "p_z");
    check_probability(p_x, "p_x");
    for (std::size_t i = 0; i < outcome.size(); ++i) check_probability(outcome[i], "outcome table entry");
    for (const auto& s : selection) check_probability(s, "selection probability");
}

Rational DiscreteScmConfig::interventional(int x) const {
    Rational total = 0;
    for (int w = 0; w < 2; ++w)
        for (int z = 0; z < 2; ++z)
            total += outcome_prob(x, w, z) * (w ? p_w : 1 - p_w) * (z ? p_z : 1 - p_z);
    return total;
}

std::string DiscreteScmConfig::canonical() const {
    std::ostringstream out;
    out << "model=discrete\np_w=" << to_fraction_string(p_w) << "\np_x=" << to_fraction_string(p_x)
        << "\np_z=" << to_fraction_string(p_z) << '\n';
    for (int z = 0; z < 2; ++z) out << "sel_z" << z << '=' << to_fraction_string(selection[z]) << '\n';
    for (int x = 0; x < 2; ++x)
        for (int w = 0; w < 2; ++w)
            for (int z = 0; z < 2; ++z)
                out << "y_x" << x << "_w" << w << "_z" << z << '=' << to_fraction_string(outcome_prob(x, w, z))
                    << '\n';
    return out.str();
}

DiscreteTable DiscreteDataset::biased_counts() const {
    DiscreteTable t({"x", "w", "z", "y"}, DiscreteTable::Weights::Counts);
    for (const auto& u : units)
        if (u.s) t.add({u.x, u.w, u.z, u.y}, 1);
    return t;
}

std::string DiscreteDataset::csv() const {
    std::ostringstream out;
    out << "x,w,z,y,s\n";
    for (const auto& u : units) out << u.x << ',' << u.w << ',' << u.z << ',' << u.y << ',' << u.s << '\n';
    return out.str();
}

DiscreteDataset simulate_discrete(const DiscreteScmConfig& cfg, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample size must be positive");
    cfg.validate();
    const double pw = to_double(cfg.p_w), pz = to_double(cfg.p_z), px = to_double(cfg.p_x);
    const double sel[2] = {to_double(cfg.selection[0]), to_double(cfg.selection[1])};
    double py[8];
    for (int i = 0; i < 8; ++i) py[i] = to_double(cfg.outcome[i]);

    Philox4x32 rng(seed);
    DiscreteDataset d;
    d.units.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        DiscreteUnit u{};
        u.w = rng.bernoulli(pw);
        u.z = rng.bernoulli(pz);
        u.s = rng.bernoulli(sel[u.z]);
        u.x = rng.bernoulli(px);
        u.y = rng.bernoulli(py[4 * u.x + 2 * u.w + u.z]);
        d.units.push_back(u);
        d.provenance.n_selected += static_cast<std::size_t>(u.s);
    }
    d.provenance.config_hash = hex64(fnv1a64(cfg.canonical()));
    d.provenance.seed = seed;
    d.provenance.n_requested = n;
    d.provenance.pool_size = n;
    return d;
}

ContinuousScmConfig ContinuousScmConfig::basic() { return {}; }

ContinuousScmConfig ContinuousScmConfig::advanced() {
    ContinuousScmConfig c;
    c.gamma_w = 0.5;
    return c;
}

void ContinuousScmConfig::validate() const {
    if (!(sigma_y > 0) || !(sigma_s > 0) || !(sigma_w > 0) || !(sigma_z > 0))
        throw std::invalid_argument("noise scales must be positive");
    if (!(p_x > 0 && p_x < 1)) throw std::invalid_argument("p_x must lie in (0,1)");
    if (population == 0) throw std::invalid_argument("population must be positive");
}

GaussianSpec ContinuousScmConfig::theoretical(double x) const {
    return theoretical_gaussian(alpha, beta, gamma_wy, sigma_w, sigma_z, sigma_y, x);
}

CausalGraph ContinuousScmConfig::causal_graph() const {
    CausalGraph::Builder b;
    b.node("X", NodeKind::Endogenous)
        .node("Y", NodeKind::Endogenous)
        .node("W", NodeKind::Endogenous)
        .node("Z", NodeKind::Endogenous)
        .node("S", NodeKind::Selection)
        .edge("X", "Y")
        .edge("W", "X")
        .edge("W", "Y")
        .edge("Z", "Y")
        .target("X", "Y");
    if (gamma_z != 0) b.edge("Z", "S");
    if (gamma_w != 0) b.edge("W", "S");
    return b.build();
}

std::string ContinuousScmConfig::canonical() const {
    std::ostringstream out;
    out << "model=continuous\n"
        << "alpha=" << format_double(alpha) << "\nbeta=" << format_double(beta) << "\nc=" << format_double(c)
        << "\ngamma_w=" << format_double(gamma_w) << "\ngamma_wx=" << format_double(gamma_wx)
        << "\ngamma_wy=" << format_double(gamma_wy) << "\ngamma_z=" << format_double(gamma_z)
        << "\np_x=" << format_double(p_x) << "\npopulation=" << population
        << "\nsigma_s=" << format_double(sigma_s) << "\nsigma_w=" << format_double(sigma_w)
        << "\nsigma_y=" << format_double(sigma_y) << "\nsigma_z=" << format_double(sigma_z) << '\n';
    return out.str();
}

BiasedRows ContinuousDataset::biased(const std::vector<std::string>& covariates) const {
    BiasedRows r;
    r.covariates.resize(covariates.size());
    for (const auto& u : units) {
        if (!u.s) continue;
        r.x.push_back(u.x);
        r.y.push_back(u.y);
        for (std::size_t j = 0; j < covariates.size(); ++j) {
            if (covariates[j] == "W")
                r.covariates[j].push_back(u.w);
            else if (covariates[j] == "Z")
                r.covariates[j].push_back(u.z);
            else
                throw std::invalid_argument("unknown covariate '" + covariates[j] + "'");
        }
    }
    return r;
}

ExternalSample ContinuousDataset::external(const std::vector<std::string>& covariates) const {
    ExternalSample e;
    for (const auto& c : covariates) {
        if (c == "W")
            e.covariates.push_back(external_w);
        else if (c == "Z")
            e.covariates.push_back(external_z);
        else
            throw std::invalid_argument("unknown covariate '" + c + "'");
    }
    return e;
}

std::string ContinuousDataset::csv() const {
    std::ostringstream out;
    out << "x,w,z,y,s\n";
    for (const auto& u : units)
        out << format_double(u.x) << ',' << format_double(u.w) << ',' << format_double(u.z) << ','
            << format_double(u.y) << ',' << u.s << '\n';
    return out.str();
}

ContinuousDataset simulate_continuous(const ContinuousScmConfig& cfg, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample size must be positive");
    cfg.validate();
    ContinuousDataset d;
    Philox4x32 pool(seed, 0);
    const std::size_t cap = 10000 * n + 1000000;
    std::size_t selected = 0;
    while (selected < n) {
        if (d.units.size() >= cap)
            throw std::runtime_error("selection probability too small: " + std::to_string(selected) +
                                     " units selected after " + std::to_string(cap) + " draws");
        ContinuousUnit u{};
        u.w = cfg.sigma_w * pool.normal();
        u.z = cfg.sigma_z * pool.normal();
        const double ux = pool.uniform();
        u.x = cfg.gamma_wx * u.w + ux > 1.0 - cfg.p_x ? 1.0 : 0.0;
        u.y = cfg.alpha * u.x + cfg.beta * u.z + cfg.gamma_wy * u.w + cfg.sigma_y * pool.normal();
        u.s = cfg.gamma_w * u.w + cfg.gamma_z * u.z + cfg.sigma_s * pool.normal() > cfg.c ? 1 : 0;
        selected += static_cast<std::size_t>(u.s);
        d.units.push_back(u);
    }
    Philox4x32 ext(seed, 1);
    d.external_w.resize(cfg.population);
    d.external_z.resize(cfg.population);
    for (std::size_t i = 0; i < cfg.population; ++i) {
        d.external_w[i] = cfg.sigma_w * ext.normal();
        d.external_z[i] = cfg.sigma_z * ext.normal();
    }
    d.provenance = {hex64(fnv1a64(cfg.canonical())), seed, n, selected, d.units.size()};
    return d;
}

Column sample_interventional(const ContinuousScmConfig& cfg, double x, std::size_t n, std::uint64_t seed) {
    cfg.validate();
    Philox4x32 rng(seed, 2);
    Column y(n);
    for (auto& v : y) {
        const double w = cfg.sigma_w * rng.normal();
        const double z = cfg.sigma_z * rng.normal();
        v = cfg.alpha * x + cfg.beta * z + cfg.gamma_wy * w + cfg.sigma_y * rng.normal();
    }
    return y;
}

std::string ScmConfigFile::canonical() const {
    return model == "discrete" ? discrete.canonical() : continuous.canonical();
}

std::string ScmConfigFile::hash() const { return hex64(fnv1a64(canonical())); }

namespace {

std::string trim(std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

ScmConfigFile parse_scm_config(const std::string& text, const std::string& source) {
    std::vector<std::tuple<std::size_t, std::string, std::string>> entries;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(source + ":" + std::to_string(lineno) + ": expected key = value");
        entries.emplace_back(lineno, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    ScmConfigFile cfg;
    auto where = [&](std::size_t l) { return source + ":" + std::to_string(l) + ": "; };
    for (const auto& [l, key, value] : entries) {
        if (key == "model") {
            if (value != "continuous" && value != "discrete")
                throw std::invalid_argument(where(l) + "model must be continuous or discrete");
            cfg.model = value;
        } else if (key == "preset") {
            if (value == "basic")
                cfg.continuous = ContinuousScmConfig::basic();
            else if (value == "advanced")
                cfg.continuous = ContinuousScmConfig::advanced();
            else if (value == "pneumonia")
                cfg.model = "discrete", cfg.discrete = DiscreteScmConfig::pneumonia();
            else
                throw std::invalid_argument(where(l) + "unknown preset '" + value + "'");
        }
    }

    std::map<std::string, double*> reals{
        {"alpha", &cfg.continuous.alpha},     {"beta", &cfg.continuous.beta},
        {"gamma_wy", &cfg.continuous.gamma_wy}, {"sigma_y", &cfg.continuous.sigma_y},
        {"gamma_z", &cfg.continuous.gamma_z}, {"gamma_w", &cfg.continuous.gamma_w},
        {"sigma_s", &cfg.continuous.sigma_s}, {"c", &cfg.continuous.c},
        {"p_x", &cfg.continuous.p_x},         {"gamma_wx", &cfg.continuous.gamma_wx},
        {"sigma_w", &cfg.continuous.sigma_w}, {"sigma_z", &cfg.continuous.sigma_z},
    };
    std::map<std::string, Rational*> rationals{
        {"p_w", &cfg.discrete.p_w}, {"p_z", &cfg.discrete.p_z}, {"p_x", &cfg.discrete.p_x},
        {"sel_z0", &cfg.discrete.selection[0]}, {"sel_z1", &cfg.discrete.selection[1]},
    };
    for (int x = 0; x < 2; ++x)
        for (int w = 0; w < 2; ++w)
            for (int z = 0; z < 2; ++z)
                rationals["y_x" + std::to_string(x) + "_w" + std::to_string(w) + "_z" + std::to_string(z)] =
                    &cfg.discrete.outcome[4 * x + 2 * w + z];

    for (const auto& [l, key, value] : entries) {
        if (key == "model" || key == "preset") continue;
        try {
            if (cfg.model == "discrete") {
                auto it = rationals.find(key);
                if (it == rationals.end()) throw std::invalid_argument("unknown discrete key '" + key + "'");
                *it->second = parse_rational(value);
            } else if (key == "population") {
                std::size_t used = 0;
                const long long v = std::stoll(value, &used);
                if (used != value.size() || v <= 0) throw std::invalid_argument("population must be a positive integer");
                cfg.continuous.population = static_cast<std::size_t>(v);
            } else {
                auto it = reals.find(key);
                if (it == reals.end()) throw std::invalid_argument("unknown continuous key '" + key + "'");
                std::size_t used = 0;
                *it->second = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument("'" + value + "' is not a number");
            }
        } catch (const std::logic_error& e) {
            throw std::invalid_argument(where(l) + e.what());
        }
    }
    if (cfg.model == "discrete")
        cfg.discrete.validate();
    else
        cfg.continuous.validate();
    return cfg;
}

ScmConfigFile load_scm_config(const std::filesystem::path& path) {
    return parse_scm_config(read_text_file(path), path.string());
}

}  // namespace twinrec
