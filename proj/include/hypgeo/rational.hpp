#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace hypgeo {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Exact rational value of a finite double.
inline Rational rational_from_double(double x) { return Rational(x); }

inline std::string to_string(const Rational& q) { return q.str(); }

}  // namespace hypgeo
