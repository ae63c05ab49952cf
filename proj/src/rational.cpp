#include "twinrecover/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace twinrec {

namespace {

boost::multiprecision::cpp_int pow10(long e) {
    boost::multiprecision::cpp_int p = 1;
    for (long i = 0; i < e; ++i) p *= 10;
    return p;
}

[[noreturn]] void bad(std::string_view text) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) bad(text);

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_rational(text.substr(0, slash));
        Rational den = parse_rational(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        return num / den;
    }

    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') negative = text[i++] == '-';
    boost::multiprecision::cpp_int mantissa = 0;
    long frac_digits = 0;
    bool digits = false, seen_point = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mantissa = mantissa * 10 + (c - '0');
            digits = true;
            if (seen_point) ++frac_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!digits) bad(text);
    long exponent = 0;
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') bad(text);
        try {
            std::size_t used = 0;
            exponent = std::stol(std::string(text.substr(i + 1)), &used);
            if (used != text.size() - i - 1) bad(text);
        } catch (const std::logic_error&) {
            bad(text);
        }
    }
    exponent -= frac_digits;
    Rational r = exponent >= 0 ? Rational(mantissa * pow10(exponent)) : Rational(mantissa, pow10(-exponent));
    return negative ? Rational(-r) : r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_fraction_string(const Rational& r) {
    auto n = boost::multiprecision::numerator(r);
    auto d = boost::multiprecision::denominator(r);
    return d == 1 ? n.str() : n.str() + "/" + d.str();
}

}  // namespace twinrec
