#include "twinrecover/reproduce.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace twinrec {

bool all_pass(const std::vector<Check>& checks) {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string format_checks(const std::vector<Check>& checks) {
    std::ostringstream out;
    for (const auto& c : checks) out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    return out.str();
}

double round_to(double v, int decimals) {
    const double k = std::pow(10.0, decimals);
    return std::round(v * k) / k;
}

DiscreteTable pneumonia_trial_counts() {
    DiscreteTable t({"x", "w", "z", "y"}, DiscreteTable::Weights::Counts);
    // {x, w, z, not recovered, recovered}
    const int rows[8][5] = {{0, 0, 0, 12, 141}, {0, 0, 1, 174, 180}, {0, 1, 0, 42, 100}, {0, 1, 1, 245, 110},
                            {1, 0, 0, 8, 158},   {1, 0, 1, 73, 266},   {1, 1, 0, 10, 146}, {1, 1, 1, 146, 218}};
    for (const auto& r : rows) {
        t.add({r[0], r[1], r[2], 0}, r[3]);
        t.add({r[0], r[1], r[2], 1}, r[4]);
    }
    return t;
}

DiscreteTable severity_external() {
    DiscreteTable t({"z"}, DiscreteTable::Weights::Probabilities);
    t.add({0}, Rational(1, 2));
    t.add({1}, Rational(1, 2));
    return t;
}

namespace {

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.1f%%", 100.0 * v);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

DiscreteReport reproduce_discrete(const DiscreteTable& biased, const DiscreteTable& external,
                                  const DiscreteScmConfig& truth) {
    DiscreteReport r;
    for (int x = 0; x < 2; ++x) {
        r.recovered[x] = recover_discrete(biased, external, "x", "y", x).at({1});
        r.biased[x] = biased_discrete(biased, "x", "y", x).at({1});
        r.truth[x] = truth.interventional(x);
        const double t = to_double(r.truth[x]);
        r.re_biased_rounded[x] = relative_error(round_to(to_double(r.biased[x]), 3), t);
        r.re_recovered_rounded[x] = relative_error(round_to(to_double(r.recovered[x]), 3), t);
        r.re_biased_exact[x] = to_double(relative_error(r.biased[x], r.truth[x]));
        r.re_recovered_exact[x] = to_double(relative_error(r.recovered[x], r.truth[x]));
    }
    auto close3 = [](const Rational& v, double target) { return std::abs(round_to(to_double(v), 3) - target) < 1e-9; };
    auto pct1 = [](double v, double target) { return std::abs(round_to(100.0 * v, 1) - target) < 1e-9; };
    r.checks = {
        {"recovered x=1", close3(r.recovered[1], 0.816), to_fraction_string(r.recovered[1]) + " = " +
                                                             fixed(to_double(r.recovered[1]), 6)},
        {"recovered x=0", close3(r.recovered[0], 0.613), to_fraction_string(r.recovered[0]) + " = " +
                                                             fixed(to_double(r.recovered[0]), 6)},
        {"biased x=1", r.biased[1] == Rational(788, 1025), to_fraction_string(r.biased[1])},
        {"biased x=0", r.biased[0] == Rational(531, 1004), to_fraction_string(r.biased[0])},
        {"truth x=1", r.truth[1] == parse_rational("0.8125"), to_fraction_string(r.truth[1])},
        {"truth x=0", r.truth[0] == parse_rational("0.6"), to_fraction_string(r.truth[0])},
        {"relative error biased x=0", pct1(r.re_biased_rounded[0], -11.8), pct(r.re_biased_rounded[0]) + " vs -11.8%"},
        {"relative error recovered x=0", pct1(r.re_recovered_rounded[0], 2.2), pct(r.re_recovered_rounded[0]) + " vs 2.2%"},
        {"relative error biased x=1", pct1(r.re_biased_rounded[1], -5.5), pct(r.re_biased_rounded[1]) + " vs -5.5%"},
        {"relative error recovered x=1", pct1(r.re_recovered_rounded[1], 0.4), pct(r.re_recovered_rounded[1]) + " vs 0.4%"},
    };
    return r;
}

std::string DiscreteReport::text() const {
    std::ostringstream out;
    out << "x,truth,biased,biased_fraction,recovered,recovered_fraction,re_biased,re_recovered,re_biased_exact,"
           "re_recovered_exact\n";
    for (int x = 1; x >= 0; --x)
        out << x << ',' << fixed(to_double(truth[x]), 4) << ',' << fixed(to_double(biased[x]), 3) << ','
            << to_fraction_string(biased[x]) << ',' << fixed(to_double(recovered[x]), 3) << ','
            << to_fraction_string(recovered[x]) << ',' << pct(re_biased_rounded[x]) << ','
            << pct(re_recovered_rounded[x]) << ',' << pct(re_biased_exact[x]) << ',' << pct(re_recovered_exact[x])
            << '\n';
    return out.str();
}

nlohmann::json DiscreteReport::json() const {
    nlohmann::json j = nlohmann::json::array();
    for (int x = 1; x >= 0; --x)
        j.push_back({{"x", x},
                     {"truth", to_fraction_string(truth[x])},
                     {"biased", to_fraction_string(biased[x])},
                     {"recovered", to_fraction_string(recovered[x])},
                     {"biased_value", to_double(biased[x])},
                     {"recovered_value", to_double(recovered[x])},
                     {"re_biased", re_biased_rounded[x]},
                     {"re_recovered", re_recovered_rounded[x]},
                     {"re_biased_exact", re_biased_exact[x]},
                     {"re_recovered_exact", re_recovered_exact[x]}});
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : this->checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return {{"rows", j}, {"checks", checks}};
}

ContinuousTargets basic_targets() {
    return {"linear-Gaussian trial",
            0.015,
            0.06,
            0.10,
            0.25,
            {{100, 0.0826, 0.1590, 0.0295, 0.0573, 0.0019, 0.0056, 0.1302, 0.3446},
             {200, 0.0707, 0.1608, 0.0252, 0.0590, 0.0012, 0.0051, 0.1065, 0.3364},
             {500, 0.0479, 0.1542, 0.0167, 0.0562, 0.0006, 0.0047, 0.0715, 0.3315},
             {1000, 0.0388, 0.1578, 0.0139, 0.0576, 0.0004, 0.0047, 0.0593, 0.3316},
             {2000, 0.0341, 0.1596, 0.0129, 0.0582, 0.0003, 0.0048, 0.0510, 0.3337},
             {4000, 0.0309, 0.1628, 0.0115, 0.0591, 0.0003, 0.0050, 0.0428, 0.3384}}};
}

ContinuousTargets advanced_targets() {
    return {"two-covariate selection",
            0.015,
            0.07,
            0.20,
            0.50,
            {{100, 0.0880, 0.3346, 0.0306, 0.1191, 0.0019, 0.0224, 0.1961, 0.7357},
             {200, 0.0771, 0.3428, 0.0265, 0.1221, 0.0015, 0.0233, 0.1735, 0.7458},
             {500, 0.0605, 0.3439, 0.0207, 0.1234, 0.0010, 0.0237, 0.1383, 0.7400},
             {1000, 0.0499, 0.3442, 0.0174, 0.1238, 0.0007, 0.0238, 0.1099, 0.7345},
             {2000, 0.0398, 0.3399, 0.0141, 0.1229, 0.0005, 0.0232, 0.0873, 0.7237},
             {4000, 0.0318, 0.3404, 0.0116, 0.1237, 0.0004, 0.0234, 0.0703, 0.7224}}};
}

std::vector<Check> continuous_checks(const SweepResult& r, const ContinuousTargets& t) {
    std::vector<Check> checks;
    if (r.rows.empty()) return {{"sweep produced rows", false, "no rows"}};

    bool monotone = true;
    std::string seq;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        seq += (i ? " > " : "") + fixed(r.rows[i].recovered.l1, 4);
        if (i > 0 && !(r.rows[i].recovered.l1 < r.rows[i - 1].recovered.l1)) monotone = false;
    }
    checks.push_back({"L1_rec strictly decreasing in n", monotone, seq});

    const auto& last = r.rows.back();
    checks.push_back({"L1_rec at n=" + std::to_string(last.n) + " in [" + fixed(t.l1_rec_lo, 3) + ", " +
                          fixed(t.l1_rec_hi, 3) + "]",
                      last.recovered.l1 >= t.l1_rec_lo && last.recovered.l1 <= t.l1_rec_hi,
                      fixed(last.recovered.l1, 4)});
    checks.push_back({"L1_bias at n=" + std::to_string(last.n) + " in [" + fixed(t.l1_bias_lo, 3) + ", " +
                          fixed(t.l1_bias_hi, 3) + "]",
                      last.biased.l1 >= t.l1_bias_lo && last.biased.l1 <= t.l1_bias_hi, fixed(last.biased.l1, 4)});

    bool beats = true;
    std::string losses;
    for (const auto& row : r.rows) {
        const std::pair<const char*, std::pair<double, double>> m[] = {
            {"L1", {row.recovered.l1, row.biased.l1}},
            {"L2", {row.recovered.l2, row.biased.l2}},
            {"JS", {row.recovered.js, row.biased.js}},
            {"W1", {row.recovered.wasserstein, row.biased.wasserstein}}};
        for (const auto& [name, v] : m)
            if (!(v.first < v.second)) {
                beats = false;
                losses += std::string(losses.empty() ? "" : "; ") + name + " at n=" + std::to_string(row.n);
            }
    }
    checks.push_back({"recovered beats biased on L1, L2, JS, W1 at every n", beats,
                      beats ? std::to_string(r.rows.size() * 4) + " comparisons" : losses});
    bool failures = false;
    for (const auto& row : r.rows) failures = failures || row.cells_failed > 0;
    checks.push_back({"no failed sweep cells", !failures, failures ? "see cells.csv" : "all cells ok"});
    return checks;
}

std::string continuous_report(const SweepResult& r, const ContinuousTargets& t) {
    std::ostringstream out;
    out << t.label << ": mean of per-seed metrics over arms x=0,1 (published value in brackets)\n";
    out << "n,l1_rec,l1_bias,l2_rec,l2_bias,js_rec,js_bias,w_rec,w_bias\n";
    for (const auto& row : r.rows) {
        const PublishedRow* pub = nullptr;
        for (const auto& p : t.published)
            if (static_cast<std::size_t>(p[0]) == row.n) pub = &p;
        const double vals[8] = {row.recovered.l1, row.biased.l1, row.recovered.l2, row.biased.l2,
                                row.recovered.js, row.biased.js, row.recovered.wasserstein, row.biased.wasserstein};
        out << row.n;
        for (int k = 0; k < 8; ++k) {
            out << ',' << fixed(vals[k], 4);
            if (pub) out << " [" << fixed((*pub)[k + 1], 4) << ']';
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace twinrec
