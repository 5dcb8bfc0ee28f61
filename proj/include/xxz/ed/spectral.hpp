#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "xxz/charges_boost.hpp"
#include "xxz/ed/sectors.hpp"

namespace xxz::ed {

/// H_n = sum_{x=1}^{n-1} (xx + yy + Delta zz)_x + chi sum_{x=1}^{n} z_x; the
/// field acts on every site of the open chain.
inline LocalOperator chain_hamiltonian(int n, const XxzParams& params) {
  LocalOperator h = translation_sum(hamiltonian_density({params.delta, 0.0}), 1, n - 1);
  if (params.chi != 0.0) h += translation_sum(magnetization_density(), 1, n) * params.chi;
  return h;
}

/// J_n = sum_{x=1}^{n-1} j_x.
inline LocalOperator chain_current(int n) { return translation_sum(spin_current_density(), 1, n - 1); }

/// M_n = sum_{x=1}^{n} z_x.
inline LocalOperator chain_magnetization(int n) {
  return translation_sum(magnetization_density(), 1, n);
}

/// Per-sector eigendecomposition of the open-chain Hamiltonian. The XXZ
/// Hamiltonian is real in the computational basis, so eigenvectors are real.
struct SpectralData {
  int n = 0;
  XxzParams params;
  std::shared_ptr<const SectorBasis> basis;
  std::vector<Eigen::VectorXd> sector_energies;   // ascending within a sector
  std::vector<Eigen::MatrixXd> sector_vectors;    // columns are eigenvectors
  Eigen::VectorXd energies;                       // all 2^n, ascending
  double h_norm = 0.0;                            // max |E|
  double degeneracy_tol = 0.0;
  BlockOperator current;                          // J in the eigenbasis

  std::size_t sector_count() const { return sector_energies.size(); }

  /// Gibbs weights exp(-beta E) / Z per sector.
  std::vector<Eigen::VectorXd> gibbs_weights(double beta) const {
    double e0 = energies.size() > 0 ? energies(0) : 0.0;
    std::vector<Eigen::VectorXd> p(sector_energies.size());
    CompensatedSum<double> z;
    for (std::size_t s = 0; s < p.size(); ++s) {
      p[s] = (-beta * (sector_energies[s].array() - e0)).exp().matrix();
      for (Eigen::Index i = 0; i < p[s].size(); ++i) z += p[s](i);
    }
    for (auto& v : p) v /= z.value();
    return p;
  }

  /// V_r^T O V_c for every block.
  BlockOperator to_eigenbasis(const BlockOperator& op) const {
    BlockOperator out;
    for (const auto& [k, m] : op.blocks) {
      Eigen::MatrixXcd left = sector_vectors[k.first].transpose() * m;
      out.blocks.emplace(k, left * sector_vectors[k.second]);
    }
    return out;
  }

  BlockOperator from_eigenbasis(const BlockOperator& op) const {
    BlockOperator out;
    for (const auto& [k, m] : op.blocks) {
      Eigen::MatrixXcd left = sector_vectors[k.first] * m;
      out.blocks.emplace(k, left * sector_vectors[k.second].transpose());
    }
    return out;
  }
};

inline SpectralData diagonalize(int n, const XxzParams& params) {
  if (n < 2 || n > kMaxDenseSites) throw SizeTooLarge("exact diagonalization supports 2 <= n <= 14");
  SpectralData out;
  out.n = n;
  out.params = params;
  out.basis = std::make_shared<SectorBasis>(n);
  BlockOperator h = to_blocks(chain_hamiltonian(n, params), *out.basis);
  std::vector<double> all;
  for (std::size_t s = 0; s < out.basis->count(); ++s) {
    const auto* blk = h.find({s, s});
    Eigen::MatrixXd hs = blk ? Eigen::MatrixXd(blk->real())
                             : Eigen::MatrixXd::Zero(out.basis->sectors[s].size(),
                                                     out.basis->sectors[s].size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hs);
    out.sector_energies.push_back(eig.eigenvalues());
    out.sector_vectors.push_back(eig.eigenvectors());
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) all.push_back(eig.eigenvalues()(i));
  }
  std::sort(all.begin(), all.end());
  out.energies = Eigen::Map<Eigen::VectorXd>(all.data(), static_cast<Eigen::Index>(all.size()));
  out.h_norm = out.energies.cwiseAbs().maxCoeff();
  out.degeneracy_tol = 1e-8 * out.h_norm;
  out.current = out.to_eigenbasis(to_blocks(chain_current(n), *out.basis));
  return out;
}

}  // namespace xxz::ed
