// Apache License, Version 2.0, refer to LICENSE.txt
#include "coalfreeze/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace coalfreeze {

namespace {

bool is_integer_token(const std::string& s) {
  if (s.empty()) return false;
  size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rational parse_rational(const std::string& s) {
  const auto bad = [&] {
    return std::invalid_argument("not a rational: '" + s + "'");
  };
  if (s.empty()) throw bad();

  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const std::string num = s.substr(0, slash);
    const std::string den = s.substr(slash + 1);
    if (!is_integer_token(num) || !is_integer_token(den)) throw bad();
    Rational r{Integer(num), Integer(den)};
    if (r.get_den() == 0) throw bad();
    r.canonicalize();
    return r;
  }

  const auto dot = s.find('.');
  if (dot != std::string::npos) {
    const std::string whole = s.substr(0, dot);
    const std::string frac = s.substr(dot + 1);
    if (!is_integer_token(whole.empty() ? "0" : whole)) throw bad();
    for (char c : frac)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw bad();
    Integer den(1);
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    Integer num(whole.empty() ? "0" : whole);
    const bool neg = num < 0;
    num = abs(num) * den + (frac.empty() ? Integer(0) : Integer(frac));
    Rational r(neg ? Integer(-num) : num, den);
    r.canonicalize();
    return r;
  }

  if (!is_integer_token(s)) throw bad();
  Rational r{Integer(s)};
  return r;
}

Rational rational_from_double(double x) {
  Rational r(x);  // exact: doubles are binary rationals
  r.canonicalize();
  return r;
}

std::string rational_to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace coalfreeze
