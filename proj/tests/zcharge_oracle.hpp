#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "xxz/local_operator.hpp"

namespace xxz::test {

/// Explicit A0, A+, A- truncated at `levels` auxiliary levels, built from
/// floating-point trigonometry with no resonance truncation. Basis order:
/// L, R, 1, ..., levels.
struct PlainMpo {
  Eigen::MatrixXd a0, ap, am;
  const Eigen::MatrixXd& of(char s) const { return s == '+' ? ap : s == '-' ? am : a0; }
};

inline PlainMpo plain_mpo(double phi, int levels) {
  const int dim = levels + 2;
  auto lvl = [](int r) { return r + 1; };
  PlainMpo m{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim),
             Eigen::MatrixXd::Zero(dim, dim)};
  m.a0(0, 0) = 1.0;
  m.a0(1, 1) = 1.0;
  for (int r = 1; r <= levels; ++r) m.a0(lvl(r), lvl(r)) = std::cos(r * phi);
  m.ap(0, lvl(1)) = 1.0;
  m.am(lvl(1), 1) = 1.0;
  for (int r = 1; r < levels; ++r) {
    m.ap(lvl(r), lvl(r + 1)) = std::sin(2 * ((r + 1) / 2) * phi);
    m.am(lvl(r + 1), lvl(r)) = -std::sin((2 * (r / 2) + 1) * phi);
  }
  return m;
}

inline char flip_ladder(char s) { return s == '+' ? '-' : s == '-' ? '+' : s; }

/// q^(d) by enumerating all 3^(d-2) middle words, each matrix element from
/// an explicit product of matrices.
inline LocalOperator brute_force_density_at(double phi, int d) {
  PlainMpo mpo = plain_mpo(phi, d + 2);
  LocalOperator out;
  const int k = d - 2;
  long long count = 1;
  for (int i = 0; i < k; ++i) count *= 3;
  for (long long code = 0; code < count; ++code) {
    std::string w;
    long long c = code;
    for (int i = 0; i < k; ++i, c /= 3) w += "0+-"[c % 3];
    Eigen::MatrixXd prod = mpo.ap;
    for (char s : w) prod = prod * mpo.of(s);
    prod = prod * mpo.am;
    double coef = prod(0, 1);
    if (std::abs(coef) < 1e-300) continue;
    std::string mirrored;
    for (char s : w) mirrored += flip_ladder(s);
    LocalOperator forward = LocalOperator::from_symbols("+" + w + "-", 0, Complex(0.0, coef));
    LocalOperator backward = LocalOperator::from_symbols("-" + mirrored + "+", 0, Complex(0.0, -coef));
    for (const auto& [p, v] : forward.terms()) out.accumulate(p, v);
    for (const auto& [p, v] : backward.terms()) out.accumulate(p, v);
  }
  out.prune();
  return out;
}

inline LocalOperator brute_force_density(int l, int m, int d) {
  return brute_force_density_at(std::numbers::pi * l / m, d);
}

}  // namespace xxz::test
