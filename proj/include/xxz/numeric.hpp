#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <type_traits>

#include "xxz/errors.hpp"

namespace xxz {

/// Neumaier-compensated accumulator; makes long reductions insensitive to
/// summation order at the 1e-15 relative level.
template <typename T>
class CompensatedSum {
 public:
  void add(T value) {
    if constexpr (std::is_floating_point_v<T>) {
      add_real(sum_, comp_, value);
    } else {
      typename T::value_type re = sum_.real(), im = sum_.imag();
      typename T::value_type cre = comp_.real(), cim = comp_.imag();
      add_real(re, cre, value.real());
      add_real(im, cim, value.imag());
      sum_ = T(re, im);
      comp_ = T(cre, cim);
    }
  }
  CompensatedSum& operator+=(T value) {
    add(value);
    return *this;
  }
  T value() const { return sum_ + comp_; }

 private:
  template <typename R>
  static void add_real(R& sum, R& comp, R value) {
    R t = sum + value;
    if (std::abs(sum) >= std::abs(value)) {
      comp += (sum - t) + value;
    } else {
      comp += (value - t) + sum;
    }
    sum = t;
  }

  T sum_{};
  T comp_{};
};

// sin/cos of pi * num / den with exact zeros and units at the quarter turns,
// so resonant matrix elements that must vanish are exactly zero.
inline double sin_pi_fraction(long long num, long long den) {
  long long period = 2 * den;
  long long r = ((num % period) + period) % period;
  if (r == 0 || 2 * r == period) return 0.0;
  if (4 * r == period) return 1.0;
  if (4 * r == 3 * period) return -1.0;
  if (12 * r == period || 12 * r == 5 * period) return 0.5;
  if (12 * r == 7 * period || 12 * r == 11 * period) return -0.5;
  return std::sin(std::numbers::pi * static_cast<double>(r) / static_cast<double>(den));
}

inline double cos_pi_fraction(long long num, long long den) {
  // cos(x) = sin(x + pi/2)
  return sin_pi_fraction(2 * num + den, 2 * den);
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DegenerateFit("linear fit needs at least two points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DegenerateFit("linear fit with a single abscissa");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace xxz
