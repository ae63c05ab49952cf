#pragma once

#include "twinrecover/density.hpp"
#include "twinrecover/discrete.hpp"
#include "twinrecover/graph.hpp"
#include "twinrecover/kde.hpp"
#include "twinrecover/rational.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace twinrec {

struct Provenance {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::size_t n_requested = 0;
    std::size_t n_selected = 0;
    std::size_t pool_size = 0;
};

// ---------------------------------------------------------------- discrete

struct DiscreteScmConfig {
    Rational p_w{1, 2};
    Rational p_z{1, 2};
    Rational p_x{1, 2};
    /// P(Y=1 | x, w, z) at index 4x + 2w + z.
    std::array<Rational, 8> outcome{};
    /// P(S=1 | z) at index z.
    std::array<Rational, 2> selection{};

    /// The pneumonia trial: outcome table by comorbidity and severity, 30%/70% recruitment.
    static DiscreteScmConfig pneumonia();

    const Rational& outcome_prob(int x, int w, int z) const { return outcome.at(4 * x + 2 * w + z); }
    void validate() const;
    /// P(Y*_{X*=x} = 1) = sum_{w,z} P(Y=1 | x,w,z) P(w) P(z).
    Rational interventional(int x) const;
    /// Canonical key=value text, used for hashing.
    std::string canonical() const;
};

struct DiscreteUnit {
    int x, w, z, y, s;
};

struct DiscreteDataset {
    std::vector<DiscreteUnit> units;
    Provenance provenance;

    /// Counts over (x, w, z, y) among units with s == 1.
    DiscreteTable biased_counts() const;
    std::string csv() const;
};

/// n units; W, Z, S, X, Y drawn for every unit in that order from one Philox stream.
DiscreteDataset simulate_discrete(const DiscreteScmConfig& cfg, std::size_t n, std::uint64_t seed);

// -------------------------------------------------------------- continuous

struct ContinuousScmConfig {
    double alpha = 2.0;
    double beta = 1.0;      // Z -> Y
    double gamma_wy = 1.0;  // W -> Y
    double sigma_y = 1.0;
    double gamma_z = 0.5;   // Z -> S
    double gamma_w = 0.0;   // W -> S
    double sigma_s = 1.0;
    double c = 0.2;
    double p_x = 0.5;
    double gamma_wx = 0.0;  // W -> X
    double sigma_w = 1.0;
    double sigma_z = 1.0;
    std::size_t population = 20000;  // size of the external unbiased covariate sample

    static ContinuousScmConfig basic();
    /// Recruitment also favours high W.
    static ContinuousScmConfig advanced();

    void validate() const;
    GaussianSpec theoretical(double x) const;
    /// X -> Y, W -> X, W -> Y, Z -> Y, plus Z -> S and W -> S for nonzero selection weights.
    CausalGraph causal_graph() const;
    std::string canonical() const;
};

struct ContinuousUnit {
    double x, w, z, y;
    int s;
};

struct ContinuousDataset {
    /// The recruitment pool, up to and including the n-th selected unit.
    std::vector<ContinuousUnit> units;
    /// Unbiased population draws of (W, Z), independent of the pool.
    Column external_w, external_z;
    Provenance provenance;

    /// Selected rows with the named adjustment covariates ("W", "Z") as columns.
    BiasedRows biased(const std::vector<std::string>& covariates) const;
    ExternalSample external(const std::vector<std::string>& covariates) const;
    std::string csv() const;
};

/// Draws units until n are selected. X = 1{gamma_wx W + U_X > 1 - p_x} with U_X ~ U(0,1).
ContinuousDataset simulate_continuous(const ContinuousScmConfig& cfg, std::size_t n, std::uint64_t seed);

/// Unbiased interventional draws of Y under do(X=x): alpha x + beta Z + gamma_wy W + U_Y.
Column sample_interventional(const ContinuousScmConfig& cfg, double x, std::size_t n, std::uint64_t seed);

// ------------------------------------------------------------ config files

/// Flat `key = value` text with `#` comments. A `model` key selects
/// `continuous` (default) or `discrete`; `preset` picks the starting values.
struct ScmConfigFile {
    std::string model = "continuous";
    ContinuousScmConfig continuous = ContinuousScmConfig::basic();
    DiscreteScmConfig discrete = DiscreteScmConfig::pneumonia();

    std::string canonical() const;
    std::string hash() const;
};

ScmConfigFile parse_scm_config(const std::string& text, const std::string& source = "<config>");
ScmConfigFile load_scm_config(const std::filesystem::path& path);

}  // namespace twinrec
