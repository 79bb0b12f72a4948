#include "itp/numeric.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace itp {

std::string format_number(double x) {
  if (x == 0.0) return "0";
  if (std::nearbyint(x) == x && std::fabs(x) < 1e16) {
    return std::to_string(static_cast<long long>(x));
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

namespace {

std::optional<boost::multiprecision::cpp_int> parse_integer(
    std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) return std::nullopt;
  boost::multiprecision::cpp_int value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return negative ? -value : value;
}

std::optional<Rational> parse_decimal(std::string_view text) {
  std::string_view mantissa = text;
  long exponent = 0;
  if (auto pos = text.find_first_of("eE"); pos != std::string_view::npos) {
    mantissa = text.substr(0, pos);
    auto exp_text = text.substr(pos + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    auto res = std::from_chars(exp_text.data(),
                               exp_text.data() + exp_text.size(), exponent);
    if (exp_text.empty() || res.ec != std::errc() ||
        res.ptr != exp_text.data() + exp_text.size()) {
      return std::nullopt;
    }
  }
  std::string digits;
  long fraction_digits = 0;
  bool seen_point = false;
  for (std::size_t k = 0; k < mantissa.size(); ++k) {
    char c = mantissa[k];
    if (k == 0 && (c == '-' || c == '+')) {
      if (c == '-') digits.push_back('-');
      continue;
    }
    if (c == '.') {
      if (seen_point) return std::nullopt;
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    digits.push_back(c);
    if (seen_point) ++fraction_digits;
  }
  auto integer = parse_integer(digits);
  if (!integer) return std::nullopt;
  exponent -= fraction_digits;
  Rational r(*integer);
  boost::multiprecision::cpp_int scale = 1;
  for (long k = 0; k < std::labs(exponent); ++k) scale *= 10;
  if (exponent >= 0) {
    r *= scale;
  } else {
    r /= scale;
  }
  return r;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_integer(text.substr(0, slash));
    auto den = parse_integer(text.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    return Rational(*num, *den);
  }
  return parse_decimal(text);
}

std::string format_rational(const Rational& r) {
  using boost::multiprecision::cpp_int;
  cpp_int num = numerator(r);
  cpp_int den = denominator(r);
  if (den == 1) return num.str();
  cpp_int rest = den;
  int twos = 0;
  int fives = 0;
  while (rest % 2 == 0) {
    rest /= 2;
    ++twos;
  }
  while (rest % 5 == 0) {
    rest /= 5;
    ++fives;
  }
  int places = std::max(twos, fives);
  if (rest != 1 || places > 30) return num.str() + "/" + den.str();
  cpp_int scale = 1;
  for (int k = 0; k < places; ++k) scale *= 10;
  cpp_int scaled = num * scale / den;
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits = scaled.str();
  if (static_cast<int>(digits.size()) <= places) {
    digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
  }
  digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  return (negative ? "-" : "") + digits;
}

}  // namespace itp
