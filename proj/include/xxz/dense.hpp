#pragma once

#include <bit>
#include <cstdint>
#include <utility>

#include <Eigen/Dense>

#include "xxz/local_operator.hpp"

namespace xxz {

/// Chains are open with sites 1..n. Basis index = sum_i b_i 2^(n-i) where
/// b_i = 1 means spin down, so site 1 is the most significant bit and
/// embedding matches the Kronecker order A_1 (x) ... (x) A_n.
struct ComputationalBasis {
  int n = 0;

  std::uint64_t site_bit(int site) const { return std::uint64_t{1} << (n - site); }

  /// Bit masks of a Pauli string in this basis.
  std::pair<std::uint64_t, std::uint64_t> masks(const PauliString& p) const {
    std::uint64_t x = 0, z = 0;
    for (int i = 0; i < p.width(); ++i) {
      int site = p.offset() + i;
      Pauli s = p.at(site);
      if (s == Pauli::I) continue;
      if (site < 1 || site > n) throw SupportOutOfRange("operator support outside [1, n]");
      auto bits = static_cast<unsigned>(s);
      if (bits & 1u) x |= site_bit(site);
      if (bits & 2u) z |= site_bit(site);
    }
    return {x, z};
  }
};

/// P|s> = i^{#y} (-1)^{popcount(z & s)} |s ^ x>, using y = i X Z.
inline std::pair<Complex, std::uint64_t> apply_pauli(std::uint64_t x, std::uint64_t z,
                                                     std::uint64_t state) {
  int e = std::popcount(x & z) + 2 * std::popcount(z & state);
  return {i_power(e), state ^ x};
}

constexpr int kMaxDenseSites = 14;

/// Dense 2^n x 2^n matrix of `op` on the open chain [1, n].
inline Eigen::MatrixXcd embed(const LocalOperator& op, int n) {
  if (n < 1 || n > kMaxDenseSites) throw SizeTooLarge("embed supports 1 <= n <= 14");
  ComputationalBasis basis{n};
  const std::uint64_t dim = std::uint64_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
  for (const auto& [p, c] : op.terms()) {
    auto [x, z] = basis.masks(p);
    for (std::uint64_t s = 0; s < dim; ++s) {
      auto [phase, t] = apply_pauli(x, z, s);
      m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) += c * phase;
    }
  }
  return m;
}

}  // namespace xxz
