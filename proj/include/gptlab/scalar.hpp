#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "gptlab/errors.hpp"

namespace gptlab {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Absolute tolerance used by every floating-mode comparison.
inline double& float_eps() {
  static double eps = 1e-9;
  return eps;
}

inline void set_float_eps(double eps) { float_eps() = eps; }

template <class S>
struct ScalarOps;

template <>
struct ScalarOps<Rat> {
  static constexpr bool exact = true;
  static int sign(const Rat& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }
  static bool is_zero(const Rat& x) { return x == 0; }
  static bool eq(const Rat& a, const Rat& b) { return a == b; }
  static bool lt(const Rat& a, const Rat& b) { return a < b; }
  static bool leq(const Rat& a, const Rat& b) { return a <= b; }
  static Rat abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }
  static double to_double(const Rat& x) { return x.convert_to<double>(); }
  static Rat from_int(long long n) { return Rat(n); }
  static std::string str(const Rat& x) { return x.str(); }
  static Rat parse(const std::string& s) {
    try {
      return Rat(s);
    } catch (const std::exception&) {
      throw UsageError("cannot parse rational: " + s);
    }
  }
};

template <>
struct ScalarOps<double> {
  static constexpr bool exact = false;
  static int sign(double x) {
    double e = float_eps();
    return x > e ? 1 : (x < -e ? -1 : 0);
  }
  static bool is_zero(double x) { return sign(x) == 0; }
  static bool eq(double a, double b) { return sign(a - b) == 0; }
  static bool lt(double a, double b) { return sign(a - b) < 0; }
  static bool leq(double a, double b) { return sign(a - b) <= 0; }
  static double abs(double x) { return std::fabs(x); }
  static double to_double(double x) { return x; }
  static double from_int(long long n) { return static_cast<double>(n); }
  static std::string str(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
  }
  static double parse(const std::string& s) {
    std::size_t pos = 0;
    // Accept "p/q" so exact-mode files can be read back for display.
    auto slash = s.find('/');
    double v;
    try {
      if (slash == std::string::npos) {
        v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
      } else {
        v = std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
      }
    } catch (const std::exception&) {
      throw UsageError("cannot parse number: " + s);
    }
    return v;
  }
};

template <class S>
int sgn(const S& x) {
  return ScalarOps<S>::sign(x);
}

template <class S>
bool scalar_eq(const S& a, const S& b) {
  return ScalarOps<S>::eq(a, b);
}

}  // namespace gptlab
