#pragma once

#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "xxz/ed/dynamics.hpp"
#include "xxz/parallel.hpp"

namespace xxz::ed {

/// Largest |eigenvalue| of a Hermitian matrix. Small matrices use a dense
/// eigensolve; large ones a Lanczos run with full reorthogonalization,
/// stopped once the extreme Ritz values settle.
inline double hermitian_norm(const Eigen::MatrixXcd& h) {
  const Eigen::Index dim = h.rows();
  if (dim <= 256) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
  }
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  v.normalize();
  const Eigen::Index max_steps = std::min<Eigen::Index>(dim, 200);
  Eigen::MatrixXcd q(dim, max_steps);
  std::vector<double> alpha, beta;
  double previous = -1.0;
  for (Eigen::Index k = 0; k < max_steps; ++k) {
    q.col(k) = v;
    Eigen::VectorXcd w = h * v;
    alpha.push_back(v.dot(w).real());
    for (int pass = 0; pass < 2; ++pass) {
      w -= q.leftCols(k + 1) * (q.leftCols(k + 1).adjoint() * w);
    }
    double b = w.norm();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (Eigen::Index i = 0; i <= k; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i > 0) t(i, i - 1) = t(i - 1, i) = beta[static_cast<std::size_t>(i - 1)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(t, Eigen::EigenvaluesOnly);
    double current = ritz.eigenvalues().cwiseAbs().maxCoeff();
    if (b <= 1e-14 * std::max(current, 1e-300)) return current;  // invariant subspace
    if (k >= 8 && std::abs(current - previous) <= 1e-14 * current) return current;
    previous = current;
    beta.push_back(b);
    v = w / b;
  }
  return previous;
}

/// Spectral norm of an anti-Hermitian block operator: the sectors it couples
/// are merged into connected components and i C is diagonalized on each.
inline double anti_hermitian_norm(const BlockOperator& c, const SectorBasis& basis) {
  std::vector<std::size_t> parent(basis.count());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto root = [&](std::size_t s) {
    while (parent[s] != s) s = parent[s] = parent[parent[s]];
    return s;
  };
  for (const auto& [k, m] : c.blocks) parent[root(k.first)] = root(k.second);

  double norm = 0.0;
  for (std::size_t r = 0; r < basis.count(); ++r) {
    if (root(r) != r) continue;
    std::vector<std::size_t> members;
    std::vector<Eigen::Index> start;
    Eigen::Index dim = 0;
    for (std::size_t s = 0; s < basis.count(); ++s) {
      if (root(s) != r) continue;
      members.push_back(s);
      start.push_back(dim);
      dim += basis.sectors[s].size();
    }
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    bool any = false;
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = 0; b < members.size(); ++b) {
        if (const auto* m = c.find({members[a], members[b]})) {
          h.block(start[a], start[b], m->rows(), m->cols()) = Complex(0.0, 1.0) * *m;
          any = true;
        }
      }
    }
    if (!any || dim == 0) continue;
    norm = std::max(norm, hermitian_norm(h));
  }
  return norm;
}

/// tau_t(f) = e^{iHt} f e^{-iHt} in the computational basis, from f in the
/// eigenbasis.
inline BlockOperator heisenberg_evolve(const SpectralData& spec, const BlockOperator& f_e,
                                       double t) {
  BlockOperator ft;
  for (const auto& [k, m] : f_e.blocks) {
    const auto& er = spec.sector_energies[k.first];
    const auto& ec = spec.sector_energies[k.second];
    Eigen::VectorXcd left = (Complex(0.0, t) * er.cast<Complex>()).array().exp();
    Eigen::VectorXcd right = (Complex(0.0, -t) * ec.cast<Complex>()).array().exp();
    ft.blocks.emplace(k, left.asDiagonal() * m * right.asDiagonal());
  }
  return spec.from_eigenbasis(ft);
}

/// [a, b] where b's blocks may be diagonal matrices; diagonal blocks are
/// applied as row/column scalings.
inline BlockOperator block_commutator(const BlockOperator& a, const BlockOperator& b) {
  BlockOperator out;
  auto add = [&](BlockKey key, const Eigen::MatrixXcd& m, double sign) {
    auto it = out.blocks.find(key);
    if (it == out.blocks.end()) {
      out.blocks.emplace(key, sign * m);
    } else {
      it->second += sign * m;
    }
  };
  for (const auto& [kb, mb] : b.blocks) {
    bool diag = kb.first == kb.second && mb.isDiagonal(0.0);
    Eigen::VectorXcd d = diag ? Eigen::VectorXcd(mb.diagonal()) : Eigen::VectorXcd();
    for (const auto& [ka, ma] : a.blocks) {
      if (ka.second == kb.first) {  // a b
        add({ka.first, kb.second}, diag ? Eigen::MatrixXcd(ma * d.asDiagonal()) : Eigen::MatrixXcd(ma * mb), 1.0);
      }
      if (kb.second == ka.first) {  // b a
        add({kb.first, ka.second}, diag ? Eigen::MatrixXcd(d.asDiagonal() * ma) : Eigen::MatrixXcd(mb * ma), -1.0);
      }
    }
  }
  return out;
}

/// ||[tau_t(f), eta_x(g)]|| with rows over `distances` and columns over
/// `times`. At t = 0 the commutator is formed symbolically, so disjoint
/// supports give exactly zero.
inline std::vector<std::vector<double>> commutator_norm_table(const SpectralData& spec,
                                                              const LocalOperator& f,
                                                              const LocalOperator& g,
                                                              std::span<const double> times,
                                                              std::span<const int> distances) {
  const auto& basis = *spec.basis;
  BlockOperator f_e = spec.to_eigenbasis(to_blocks(f, basis));
  std::vector<BlockOperator> gx;
  for (int x : distances) gx.push_back(to_blocks(shift(g, x), basis));
  std::vector<std::vector<double>> table(distances.size(), std::vector<double>(times.size(), 0.0));
  parallel_for(times.size(), [&](std::size_t ti) {
    double t = times[ti];
    if (t == 0.0) {
      for (std::size_t xi = 0; xi < distances.size(); ++xi) {
        LocalOperator c = commutator(f, shift(g, distances[xi]));
        table[xi][ti] = c.empty() ? 0.0 : anti_hermitian_norm(to_blocks(c, basis), basis);
      }
      return;
    }
    BlockOperator ft = heisenberg_evolve(spec, f_e, t);
    for (std::size_t xi = 0; xi < distances.size(); ++xi) {
      table[xi][ti] = anti_hermitian_norm(block_commutator(ft, gx[xi]), basis);
    }
  });
  return table;
}

/// |w(f eta_x(g)) - w(f) w(eta_x(g))| in the Gibbs state at `beta`.
inline std::vector<double> clustering_table(const SpectralData& spec, const LocalOperator& f,
                                            const LocalOperator& g, double beta,
                                            std::span<const int> distances) {
  auto p = spec.gibbs_weights(beta);
  const auto& basis = *spec.basis;
  auto expect = [&](const BlockOperator& a) {
    CompensatedSum<Complex> s;
    for (const auto& [k, m] : a.blocks) {
      if (k.first != k.second) continue;
      for (Eigen::Index i = 0; i < m.rows(); ++i) s += p[k.first](i) * m(i, i);
    }
    return s.value();
  };
  BlockOperator f_e = spec.to_eigenbasis(to_blocks(adjoint(f), basis));
  Complex wf = std::conj(expect(f_e));
  std::vector<double> out;
  for (int x : distances) {
    BlockOperator g_e = spec.to_eigenbasis(to_blocks(shift(g, x), basis));
    Complex joint = detail::gibbs_inner(f_e, g_e, p);
    out.push_back(std::abs(joint - wf * expect(g_e)));
  }
  return out;
}

struct LightConeFit {
  std::vector<double> times;
  std::vector<int> distances;
  std::vector<std::vector<double>> commutator_norms;  // [distance][time]
  double fitted_v = 0.0;
  double fitted_mu = 0.0;
  std::vector<double> clustering;  // per distance
  double fitted_kappa = 0.0;
  double fitted_rho = 0.0;
};

struct LightConeOptions {
  double arrival_fraction = 0.25;  // of the table maximum
  double floor = 1e-13;            // values below are treated as zero
};

/// v from arrival times x ~ v t*, mu from log norms against x - v t outside
/// the cone, and (kappa, rho) from log clustering ~ log kappa - rho x.
inline void fit_light_cone(LightConeFit& fit, const LightConeOptions& opt = {}) {
  double top = 0.0;
  for (const auto& row : fit.commutator_norms)
    for (double v : row) top = std::max(top, v);
  std::vector<double> arrival, dist;
  for (std::size_t xi = 0; xi < fit.distances.size(); ++xi) {
    if (fit.distances[xi] <= 0) continue;
    const auto& row = fit.commutator_norms[xi];
    for (std::size_t ti = 0; ti < row.size(); ++ti) {
      if (row[ti] >= opt.arrival_fraction * top && top > 0.0) {
        arrival.push_back(fit.times[ti]);
        dist.push_back(fit.distances[xi]);
        break;
      }
    }
  }
  fit.fitted_v = fit_line(arrival, dist).slope;

  std::vector<double> u, logs;
  for (std::size_t xi = 0; xi < fit.distances.size(); ++xi) {
    for (std::size_t ti = 0; ti < fit.times.size(); ++ti) {
      double v = fit.commutator_norms[xi][ti];
      double outside = fit.distances[xi] - fit.fitted_v * fit.times[ti];
      if (fit.distances[xi] > 0 && outside > 0.0 && v > opt.floor) {
        u.push_back(outside);
        logs.push_back(std::log(v));
      }
    }
  }
  fit.fitted_mu = -fit_line(u, logs).slope;

  std::vector<double> cx, clog;
  for (std::size_t xi = 0; xi < fit.distances.size(); ++xi) {
    if (fit.distances[xi] > 0 && fit.clustering[xi] > opt.floor) {
      cx.push_back(fit.distances[xi]);
      clog.push_back(std::log(fit.clustering[xi]));
    }
  }
  auto c = fit_line(cx, clog);
  fit.fitted_rho = -c.slope;
  fit.fitted_kappa = std::exp(c.intercept);
}

inline LightConeFit light_cone_scan(const SpectralData& spec, const LocalOperator& f,
                                    const LocalOperator& g, double beta,
                                    std::span<const double> times,
                                    std::span<const int> distances,
                                    const LightConeOptions& opt = {}) {
  if (spec.n > 12) throw SizeTooLarge("light-cone scan supports n <= 12");
  LightConeFit fit;
  fit.times.assign(times.begin(), times.end());
  fit.distances.assign(distances.begin(), distances.end());
  fit.commutator_norms = commutator_norm_table(spec, f, g, times, distances);
  fit.clustering = clustering_table(spec, f, g, beta, distances);
  fit_light_cone(fit, opt);
  return fit;
}

inline LightConeFit light_cone_scan(int n, const XxzParams& params, const LocalOperator& f,
                                    const LocalOperator& g, double beta,
                                    std::span<const double> times,
                                    std::span<const int> distances,
                                    const LightConeOptions& opt = {}) {
  if (n > 12) throw SizeTooLarge("light-cone scan supports n <= 12");
  return light_cone_scan(diagonalize(n, params), f, g, beta, times, distances, opt);
}

}  // namespace xxz::ed
