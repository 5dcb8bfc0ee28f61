#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "xxz/dense.hpp"
#include "xxz/local_operator.hpp"

namespace xxz::ed {

/// Computational states with a fixed number of down spins.
struct Sector {
  int down = 0;
  std::vector<std::uint64_t> states;
  std::unordered_map<std::uint64_t, Eigen::Index> index;

  Eigen::Index size() const { return static_cast<Eigen::Index>(states.size()); }
};

/// All n + 1 magnetization sectors of an n-site chain, indexed by the
/// number of down spins.
struct SectorBasis {
  int n = 0;
  std::vector<Sector> sectors;

  explicit SectorBasis(int sites) : n(sites), sectors(static_cast<std::size_t>(sites) + 1) {
    for (int k = 0; k <= n; ++k) sectors[static_cast<std::size_t>(k)].down = k;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      auto& sec = sectors[static_cast<std::size_t>(std::popcount(s))];
      sec.index.emplace(s, sec.size());
      sec.states.push_back(s);
    }
  }
  std::size_t count() const { return sectors.size(); }
};

/// Operator stored as dense blocks between sectors; absent blocks are zero.
/// Keys are (row sector, column sector).
using BlockKey = std::pair<std::size_t, std::size_t>;

struct BlockOperator {
  std::map<BlockKey, Eigen::MatrixXcd> blocks;

  bool block_diagonal() const {
    for (const auto& [k, b] : blocks) {
      if (k.first != k.second) return false;
    }
    return true;
  }
  const Eigen::MatrixXcd* find(BlockKey k) const {
    auto it = blocks.find(k);
    return it == blocks.end() ? nullptr : &it->second;
  }
};

/// Blocks of `op` on the chain [1, n].
inline BlockOperator to_blocks(const LocalOperator& op, const SectorBasis& basis) {
  ComputationalBasis cb{basis.n};
  BlockOperator out;
  for (const auto& [p, c] : op.terms()) {
    auto [x, z] = cb.masks(p);
    for (std::size_t col = 0; col < basis.count(); ++col) {
      const auto& cs = basis.sectors[col];
      if (cs.states.empty()) continue;
      // The target sector depends on the state when x flips several spins.
      for (Eigen::Index j = 0; j < cs.size(); ++j) {
        auto [phase, t] = apply_pauli(x, z, cs.states[static_cast<std::size_t>(j)]);
        auto row = static_cast<std::size_t>(std::popcount(t));
        const auto& rs = basis.sectors[row];
        auto& blk = out.blocks[{row, col}];
        if (blk.size() == 0) blk = Eigen::MatrixXcd::Zero(rs.size(), cs.size());
        blk(rs.index.at(t), j) += c * phase;
      }
    }
  }
  return out;
}

/// A B for block operators.
inline BlockOperator multiply(const BlockOperator& a, const BlockOperator& b) {
  BlockOperator out;
  for (const auto& [ka, ma] : a.blocks) {
    for (const auto& [kb, mb] : b.blocks) {
      if (ka.second != kb.first) continue;
      BlockKey key{ka.first, kb.second};
      auto it = out.blocks.find(key);
      if (it == out.blocks.end()) {
        out.blocks.emplace(key, ma * mb);
      } else {
        it->second.noalias() += ma * mb;
      }
    }
  }
  return out;
}

inline BlockOperator subtract(const BlockOperator& a, const BlockOperator& b) {
  BlockOperator out = a;
  for (const auto& [k, m] : b.blocks) {
    auto it = out.blocks.find(k);
    if (it == out.blocks.end()) {
      out.blocks.emplace(k, -m);
    } else {
      it->second -= m;
    }
  }
  return out;
}

inline double max_abs_entry(const BlockOperator& a) {
  double v = 0.0;
  for (const auto& [k, m] : a.blocks) {
    if (m.size() > 0) v = std::max(v, m.cwiseAbs().maxCoeff());
  }
  return v;
}

/// Dense 2^n matrix in the plain computational ordering; for tests.
inline Eigen::MatrixXcd to_dense(const BlockOperator& a, const SectorBasis& basis) {
  const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << basis.n);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [k, m] : a.blocks) {
    const auto& rs = basis.sectors[k.first].states;
    const auto& cs = basis.sectors[k.second].states;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        out(static_cast<Eigen::Index>(rs[static_cast<std::size_t>(i)]),
            static_cast<Eigen::Index>(cs[static_cast<std::size_t>(j)])) += m(i, j);
  }
  return out;
}

}  // namespace xxz::ed
