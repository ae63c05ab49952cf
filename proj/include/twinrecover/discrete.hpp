#pragma once

#include "twinrecover/rational.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace twinrec {

/// Joint table over named integer-valued variables, holding either counts or
/// probabilities in exact rational arithmetic.
class DiscreteTable {
public:
    enum class Weights { Counts, Probabilities };
    using Assignment = std::vector<int>;

    DiscreteTable(std::vector<std::string> variables, Weights weights);

    const std::vector<std::string>& variables() const noexcept { return vars_; }
    Weights weights() const noexcept { return weights_; }
    std::size_t index_of(std::string_view var) const;
    bool has_variable(std::string_view var) const;

    /// Adds `w` to the cell. Counts must be nonnegative integers, probabilities nonnegative.
    void add(const Assignment& a, const Rational& w);
    Rational at(const Assignment& a) const;
    const std::map<Assignment, Rational>& cells() const noexcept { return cells_; }

    Rational total() const;
    /// Probabilities summing to exactly one.
    bool is_normalized() const;

    /// Sum out every variable not in `keep`; result columns follow `keep` order.
    DiscreteTable marginal(const std::vector<std::string>& keep) const;
    /// Rows with var == value, the variable removed.
    DiscreteTable slice(std::string_view var, int value) const;
    /// Probabilities proportional to this table. Throws on zero total.
    DiscreteTable normalized() const;

    /// Values of one variable that occur with positive weight, ascending.
    std::vector<int> support(std::string_view var) const;

private:
    std::vector<std::string> vars_;
    Weights weights_;
    std::map<Assignment, Rational> cells_;
};

class UnsupportedStratum : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// CSV layout: one column per variable, then a weight column named
/// `count` (counts) or `p` / `prob` (probabilities).
DiscreteTable read_discrete_table(std::istream& in, const std::string& source = "<input>");
DiscreteTable load_discrete_table(const std::filesystem::path& path);
std::string write_discrete_table(const DiscreteTable& t);

/// sum_z P(y | x, z, S=1) P(z) with z ranging over the external table's
/// variables; any remaining biased variables are summed out.
DiscreteTable recover_discrete(const DiscreteTable& biased, const DiscreteTable& external, std::string_view x_var,
                               std::string_view y_var, int x);

/// P(y | x, S=1), ignoring strata.
DiscreteTable biased_discrete(const DiscreteTable& biased, std::string_view x_var, std::string_view y_var, int x);

/// (estimate - truth) / truth.
double relative_error(double estimate, double truth);
Rational relative_error(const Rational& estimate, const Rational& truth);

}  // namespace twinrec
