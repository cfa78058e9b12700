#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tgs {

using Rational = boost::rational<long long>;

inline long long rat_floor(const Rational& r) {
  long long q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
  return q;
}

inline Rational fractional_part(const Rational& r) {
  return r - Rational(rat_floor(r));
}

inline bool is_integer(const Rational& r) { return r.denominator() == 1; }

// Prints exactly: integers bare, otherwise decimal when the denominator is
// a product of 2s and 5s, otherwise num/den.
inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  long long den = r.denominator();
  int twos = 0, fives = 0;
  while (den % 2 == 0) { den /= 2; ++twos; }
  while (den % 5 == 0) { den /= 5; ++fives; }
  if (den != 1)
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
  int digits = twos > fives ? twos : fives;
  long long scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  long long scaled = r.numerator() * (scale / r.denominator());
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string frac = std::to_string(scaled % scale);
  frac.insert(frac.begin(), digits - static_cast<int>(frac.size()), '0');
  return (neg ? "-" : "") + std::to_string(scaled / scale) + "." + frac;
}

// Accepts "12", "0.5", "3/4".
inline Rational parse_rational(const std::string& text) {
  auto bad = [&] { throw std::invalid_argument("malformed rational: " + text); };
  if (text.empty()) bad();
  std::size_t slash = text.find('/');
  if (slash != std::string::npos) {
    long long num = std::stoll(text.substr(0, slash));
    long long den = std::stoll(text.substr(slash + 1));
    if (den == 0) bad();
    return Rational(num, den);
  }
  std::size_t dot = text.find('.');
  if (dot == std::string::npos) return Rational(std::stoll(text));
  std::string whole = text.substr(0, dot);
  std::string frac = text.substr(dot + 1);
  if (frac.empty()) bad();
  long long den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  bool neg = !whole.empty() && whole[0] == '-';
  long long w = whole.empty() || whole == "-" ? 0 : std::stoll(whole);
  long long f = std::stoll(frac);
  long long num = (neg ? -1 : 1) * ((neg ? -w : w) * den + f);
  return Rational(num, den);
}

}  // namespace tgs
