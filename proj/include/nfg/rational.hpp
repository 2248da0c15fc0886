#pragma once

#include <boost/rational.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nfg {

/// Exact rational used for every cost, price and ratio.
using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Parses "p/q", an integer, or a finite decimal such as "-2.75".
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw std::invalid_argument("not a rational: '" + std::string(text) + "'"); };
  auto parse_int = [&](std::string_view s) -> std::int64_t {
    if (s.empty()) fail();
    std::size_t pos = 0;
    bool negative = false;
    if (s[0] == '-' || s[0] == '+') {
      negative = s[0] == '-';
      pos = 1;
    }
    if (pos == s.size()) fail();
    std::int64_t value = 0;
    for (; pos < s.size(); ++pos) {
      if (s[pos] < '0' || s[pos] > '9') fail();
      if (value > (INT64_MAX - 9) / 10) fail();
      value = value * 10 + (s[pos] - '0');
    }
    return negative ? -value : value;
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto den = parse_int(text.substr(slash + 1));
    if (den == 0) fail();
    return Rational(parse_int(text.substr(0, slash)), den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto whole = text.substr(0, dot);
    const auto frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 15) fail();
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const bool negative = !whole.empty() && whole[0] == '-';
    const std::int64_t int_part = (whole.empty() || whole == "-" || whole == "+") ? 0 : parse_int(whole);
    const std::int64_t frac_part = parse_int(frac);
    if (frac_part < 0) fail();
    const std::int64_t magnitude = (int_part < 0 ? -int_part : int_part) * scale + frac_part;
    return Rational(negative ? -magnitude : magnitude, scale);
  }
  return Rational(parse_int(text));
}

inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

inline std::int64_t floor_of(const Rational& r) {
  auto q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
  return q;
}

/// Largest integer n >= 0 with n*n <= r; r must be non-negative.
inline std::int64_t floor_sqrt(const Rational& r) {
  if (r < 0) throw std::domain_error("floor_sqrt of a negative value");
  auto n = static_cast<std::int64_t>(std::sqrt(to_double(r)));
  while (n > 0 && Rational(n * n) > r) --n;
  while (Rational((n + 1) * (n + 1)) <= r) ++n;
  return n;
}

/// The real number sqrt(radicand) + offset, compared exactly.
struct SqrtExpr {
  Rational radicand{0};
  Rational offset{0};

  [[nodiscard]] double approx() const { return std::sqrt(to_double(radicand)) + to_double(offset); }

  /// True when value <= sqrt(radicand) + offset.
  [[nodiscard]] bool admits(const Rational& value) const {
    const Rational shifted = value - offset;
    return shifted <= 0 || shifted * shifted <= radicand;
  }

  /// True when value < sqrt(radicand) + offset.
  [[nodiscard]] bool strictly_above(const Rational& value) const {
    const Rational shifted = value - offset;
    return shifted < 0 || shifted * shifted < radicand;
  }

  [[nodiscard]] std::int64_t floor() const {
    auto n = static_cast<std::int64_t>(std::floor(approx())) + 2;
    while (!admits(Rational(n))) --n;
    return n;
  }
};

}  // namespace nfg
