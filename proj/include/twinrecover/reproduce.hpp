#pragma once

#include "twinrecover/discrete.hpp"
#include "twinrecover/scm.hpp"
#include "twinrecover/sweep.hpp"

#include <array>
#include <json.hpp>
#include <string>
#include <vector>

namespace twinrec {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

bool all_pass(const std::vector<Check>& checks);
std::string format_checks(const std::vector<Check>& checks);

/// The biased pneumonia cohort: counts over (x, w, z, y).
DiscreteTable pneumonia_trial_counts();
/// P(z) = Bernoulli(1/2) over column z.
DiscreteTable severity_external();

struct DiscreteReport {
    Rational recovered[2], biased[2], truth[2];
    /// Relative errors of the estimates rounded to three decimals, as published, and exact.
    double re_biased_rounded[2], re_recovered_rounded[2];
    double re_biased_exact[2], re_recovered_exact[2];
    std::vector<Check> checks;

    std::string text() const;
    nlohmann::json json() const;
};

DiscreteReport reproduce_discrete(const DiscreteTable& biased, const DiscreteTable& external,
                                  const DiscreteScmConfig& truth);

/// One published row: n then L1/L2/JS/W for recovered and biased.
using PublishedRow = std::array<double, 9>;

struct ContinuousTargets {
    std::string label;
    double l1_rec_lo, l1_rec_hi;
    double l1_bias_lo, l1_bias_hi;
    std::vector<PublishedRow> published;
};

ContinuousTargets basic_targets();
ContinuousTargets advanced_targets();

/// Monotone recovered L1, the two n=max bands, and recovered < biased on every metric at every n.
std::vector<Check> continuous_checks(const SweepResult& r, const ContinuousTargets& t);
/// Side-by-side text table of measured and published values.
std::string continuous_report(const SweepResult& r, const ContinuousTargets& t);

double round_to(double v, int decimals);

}  // namespace twinrec
