#include "twinrecover/discrete.hpp"

#include "twinrecover/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace twinrec {

DiscreteTable::DiscreteTable(std::vector<std::string> variables, Weights weights)
    : vars_(std::move(variables)), weights_(weights) {
    std::set<std::string> seen;
    for (const auto& v : vars_)
        if (!seen.insert(v).second) throw std::invalid_argument("duplicate variable '" + v + "'");
}

std::size_t DiscreteTable::index_of(std::string_view var) const {
    auto it = std::find(vars_.begin(), vars_.end(), var);
    if (it == vars_.end()) throw std::invalid_argument("table has no variable '" + std::string(var) + "'");
    return static_cast<std::size_t>(it - vars_.begin());
}

bool DiscreteTable::has_variable(std::string_view var) const {
    return std::find(vars_.begin(), vars_.end(), var) != vars_.end();
}

void DiscreteTable::add(const Assignment& a, const Rational& w) {
    if (a.size() != vars_.size()) throw std::invalid_argument("assignment arity does not match table");
    if (w < 0) throw std::invalid_argument("negative table weight");
    if (weights_ == Weights::Counts && boost::multiprecision::denominator(w) != 1)
        throw std::invalid_argument("counts must be integers");
    cells_[a] += w;
}

Rational DiscreteTable::at(const Assignment& a) const {
    auto it = cells_.find(a);
    return it == cells_.end() ? Rational(0) : it->second;
}

Rational DiscreteTable::total() const {
    Rational t = 0;
    for (const auto& [a, w] : cells_) t += w;
    return t;
}

bool DiscreteTable::is_normalized() const { return weights_ == Weights::Probabilities && total() == 1; }

DiscreteTable DiscreteTable::marginal(const std::vector<std::string>& keep) const {
    std::vector<std::size_t> idx;
    for (const auto& k : keep) idx.push_back(index_of(k));
    DiscreteTable out(keep, weights_);
    for (const auto& [a, w] : cells_) {
        Assignment b;
        b.reserve(idx.size());
        for (auto i : idx) b.push_back(a[i]);
        out.cells_[b] += w;
    }
    return out;
}

DiscreteTable DiscreteTable::slice(std::string_view var, int value) const {
    const auto i = index_of(var);
    std::vector<std::string> rest;
    for (std::size_t k = 0; k < vars_.size(); ++k)
        if (k != i) rest.push_back(vars_[k]);
    DiscreteTable out(rest, weights_);
    for (const auto& [a, w] : cells_) {
        if (a[i] != value) continue;
        Assignment b;
        for (std::size_t k = 0; k < a.size(); ++k)
            if (k != i) b.push_back(a[k]);
        out.cells_[b] += w;
    }
    return out;
}

DiscreteTable DiscreteTable::normalized() const {
    const Rational t = total();
    if (t == 0) throw std::invalid_argument("cannot normalize a table with zero total");
    DiscreteTable out(vars_, Weights::Probabilities);
    for (const auto& [a, w] : cells_) out.cells_[a] = w / t;
    return out;
}

std::vector<int> DiscreteTable::support(std::string_view var) const {
    const auto i = index_of(var);
    std::set<int> vals;
    for (const auto& [a, w] : cells_)
        if (w > 0) vals.insert(a[i]);
    return {vals.begin(), vals.end()};
}

DiscreteTable read_discrete_table(std::istream& in, const std::string& source) {
    const CsvTable csv = read_csv(in, source);
    if (csv.header.size() < 2) throw std::invalid_argument(source + ": need at least one variable and a weight column");
    const std::string& last = csv.header.back();
    DiscreteTable::Weights kind;
    if (last == "count")
        kind = DiscreteTable::Weights::Counts;
    else if (last == "p" || last == "prob")
        kind = DiscreteTable::Weights::Probabilities;
    else
        throw std::invalid_argument(source + ": last column must be 'count', 'p' or 'prob', found '" + last + "'");
    DiscreteTable t({csv.header.begin(), csv.header.end() - 1}, kind);
    for (const auto& row : csv.rows) {
        DiscreteTable::Assignment a;
        for (std::size_t i = 0; i + 1 < row.size(); ++i) {
            std::size_t used = 0;
            int v = 0;
            try {
                v = std::stoi(row[i], &used);
            } catch (const std::logic_error&) {
                used = 0;
            }
            if (used == 0 || used != row[i].size())
                throw std::invalid_argument(source + ": value '" + row[i] + "' is not an integer");
            a.push_back(v);
        }
        t.add(a, parse_rational(row.back()));
    }
    return t;
}

DiscreteTable load_discrete_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    return read_discrete_table(in, path.string());
}

std::string write_discrete_table(const DiscreteTable& t) {
    std::ostringstream out;
    for (const auto& v : t.variables()) out << v << ',';
    out << (t.weights() == DiscreteTable::Weights::Counts ? "count" : "p") << '\n';
    for (const auto& [a, w] : t.cells()) {
        for (int v : a) out << v << ',';
        out << to_fraction_string(w) << '\n';
    }
    return out.str();
}

namespace {

std::string describe_cell(const std::vector<std::string>& vars, const DiscreteTable::Assignment& a) {
    std::string s;
    for (std::size_t i = 0; i < vars.size(); ++i) s += (i ? ", " : "") + vars[i] + "=" + std::to_string(a[i]);
    return s;
}

}  // namespace

DiscreteTable recover_discrete(const DiscreteTable& biased, const DiscreteTable& external, std::string_view x_var,
                               std::string_view y_var, int x) {
    const std::vector<std::string>& strata = external.variables();
    for (const auto& z : strata) {
        if (z == x_var || z == y_var)
            throw std::invalid_argument("external table may not contain the treatment or outcome");
        if (!biased.has_variable(z)) throw std::invalid_argument("biased table has no stratum variable '" + z + "'");
    }
    const DiscreteTable pz = external.normalized();

    std::vector<std::string> keep{std::string(x_var)};
    keep.insert(keep.end(), strata.begin(), strata.end());
    keep.push_back(std::string(y_var));
    const DiscreteTable at_x = biased.marginal(keep).slice(x_var, x);  // strata..., y
    const std::vector<int> ys = at_x.support(y_var);
    if (ys.empty()) throw UnsupportedStratum("no biased data at " + std::string(x_var) + "=" + std::to_string(x));

    DiscreteTable out({std::string(y_var)}, DiscreteTable::Weights::Probabilities);
    for (const auto& [z, weight] : pz.cells()) {
        if (weight == 0) continue;
        Rational n = 0;
        for (int y : ys) {
            auto cell = z;
            cell.push_back(y);
            n += at_x.at(cell);
        }
        if (n == 0) {
            auto label = std::vector<std::string>{std::string(x_var)};
            label.insert(label.end(), strata.begin(), strata.end());
            auto a = z;
            a.insert(a.begin(), x);
            throw UnsupportedStratum("unsupported stratum: no biased data at " + describe_cell(label, a));
        }
        for (int y : ys) {
            auto cell = z;
            cell.push_back(y);
            out.add({y}, at_x.at(cell) / n * weight);
        }
    }
    return out;
}

DiscreteTable biased_discrete(const DiscreteTable& biased, std::string_view x_var, std::string_view y_var, int x) {
    DiscreteTable at_x = biased.marginal({std::string(x_var), std::string(y_var)}).slice(x_var, x);
    if (at_x.total() == 0)
        throw std::invalid_argument("no biased data at " + std::string(x_var) + "=" + std::to_string(x));
    return at_x.normalized();
}

double relative_error(double estimate, double truth) {
    if (truth == 0) throw std::domain_error("relative error undefined for a zero truth value");
    return (estimate - truth) / truth;
}

Rational relative_error(const Rational& estimate, const Rational& truth) {
    if (truth == 0) throw std::domain_error("relative error undefined for a zero truth value");
    return (estimate - truth) / truth;
}

}  // namespace twinrec
