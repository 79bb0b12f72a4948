#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace itp {

using Rational = boost::multiprecision::cpp_rational;

/// Shortest decimal text that parses back to exactly `x`. Integral values
/// below 1e16 are printed without an exponent.
std::string format_number(double x);

/// Parses "p/q", a decimal literal ("0.01", "1.5e-6") or an integer into an
/// exact rational. Returns nullopt on malformed input.
std::optional<Rational> parse_rational(std::string_view text);

/// Parses a finite double; nullopt on malformed input or trailing garbage.
std::optional<double> parse_double(std::string_view text);

/// Canonical text of a rational: a terminating decimal when the denominator
/// has only factors 2 and 5 and the decimal is short, "p/q" otherwise.
std::string format_rational(const Rational& r);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace itp
