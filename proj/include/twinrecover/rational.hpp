#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace twinrec {

using Rational = boost::multiprecision::cpp_rational;

/// Accepts "3", "-2/7", "0.95", "1.5e-3".
Rational parse_rational(std::string_view text);

double to_double(const Rational& r);

/// "241/295"
std::string to_fraction_string(const Rational& r);

}  // namespace twinrec
