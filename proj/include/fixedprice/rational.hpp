#pragma once

#include <gmpxx.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <string>
#include <string_view>

namespace fixedprice {

using Rational = mpq_class;

// Extended precision used for models whose parameters are not rational.
using Real = boost::multiprecision::cpp_bin_float_50;

// Accepts "7", "-3", "0.25", "1.5e-2" and "a/b". Throws InvalidInput.
Rational parse_rational(std::string_view text);

// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& q);

double to_double(const Rational& q);
Real to_real(const Rational& q);

// Continued-fraction approximation: the first convergent within tolerance.
Rational rational_from_real(const Real& x, const Real& tolerance);

// Tolerance used when float-born values are brought back to rationals.
Real conversion_tolerance();

}  // namespace fixedprice
