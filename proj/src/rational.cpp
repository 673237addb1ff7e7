#include "fixedprice/rational.hpp"

#include <cctype>

#include "fixedprice/errors.hpp"

namespace fixedprice {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

[[noreturn]] void bad(std::string_view text) {
  throw InvalidInput("not a rational number: \"" + std::string(text) + "\"");
}

mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

mpz_class real_to_mpz(const Real& integral) {
  std::string text = integral.str(0, std::ios_base::fixed);
  return mpz_class(text.substr(0, text.find('.')), 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational q;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) bad(text);
    mpz_class d(std::string(den), 10);
    if (d == 0) throw InvalidInput("zero denominator in \"" + std::string(text) + "\"");
    q = Rational(mpz_class(std::string(num), 10), d);
  } else {
    std::string_view exponent_part;
    bool has_exponent = false;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      has_exponent = true;
      exponent_part = s.substr(e + 1);
      s = s.substr(0, e);
    }
    std::string_view int_part = s;
    std::string_view frac_part;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      int_part = s.substr(0, dot);
      frac_part = s.substr(dot + 1);
      if (int_part.empty() && frac_part.empty()) bad(text);
      if (!int_part.empty() && !all_digits(int_part)) bad(text);
      if (!frac_part.empty() && !all_digits(frac_part)) bad(text);
    } else if (!all_digits(int_part)) {
      bad(text);
    }
    std::string digits = std::string(int_part) + std::string(frac_part);
    q = Rational(mpz_class(digits, 10), pow10(frac_part.size()));
    if (has_exponent) {
      bool neg_exp = false;
      if (exponent_part.front() == '-' || exponent_part.front() == '+') {
        neg_exp = exponent_part.front() == '-';
        exponent_part.remove_prefix(1);
      }
      if (!all_digits(exponent_part) || exponent_part.size() > 6) bad(text);
      unsigned long e = std::stoul(std::string(exponent_part));
      q = neg_exp ? Rational(q / Rational(pow10(e))) : Rational(q * Rational(pow10(e)));
    }
  }
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double to_double(const Rational& q) { return q.get_d(); }

Real to_real(const Rational& q) {
  return Real(q.get_num().get_str()) / Real(q.get_den().get_str());
}

Real conversion_tolerance() { return Real("1e-30"); }

Rational rational_from_real(const Real& x, const Real& tolerance) {
  // Convergents h/k of the continued fraction of x.
  mpz_class h_prev = 1, h = 0, k_prev = 0, k = 1;
  Real rest = x;
  for (int iter = 0; iter < 200; ++iter) {
    Real a_real = floor(rest);
    mpz_class a = real_to_mpz(a_real);
    mpz_class h_next = a * h_prev + h;
    mpz_class k_next = a * k_prev + k;
    h = h_prev;
    k = k_prev;
    h_prev = h_next;
    k_prev = k_next;
    Rational approx(h_prev, k_prev);
    approx.canonicalize();
    if (abs(to_real(approx) - x) <= tolerance) return approx;
    Real frac = rest - a_real;
    if (frac == 0) return approx;
    rest = 1 / frac;
  }
  throw InternalInconsistency("continued fraction did not converge");
}

}  // namespace fixedprice
