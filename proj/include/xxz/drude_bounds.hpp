#pragma once

#include <bit>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "xxz/charges_boost.hpp"
#include "xxz/zcharge_mpo.hpp"

namespace xxz {

struct TransferMatrix {
  ResonantAnisotropy resonance;
  Eigen::MatrixXd t;
};

/// T = |L><L| + |R><R| + (|L><1| + |1><R|)/2 + sum_r cos^2(r phi)|r><r|
///     + sin^2(2 floor((r+1)/2) phi)/2 |r><r+1| + sin^2((2 floor(r/2)+1) phi)/2 |r+1><r|,
/// with r = 1..m-1 and couplings to |m> dropped.
inline TransferMatrix build_transfer_matrix(const ResonantAnisotropy& res) {
  const int m = res.m();
  TransferMatrix tm{res, Eigen::MatrixXd::Zero(m + 1, m + 1)};
  auto& t = tm.t;
  t(AuxIndex::kL, AuxIndex::kL) = 1.0;
  t(AuxIndex::kR, AuxIndex::kR) = 1.0;
  t(AuxIndex::kL, AuxIndex::level(1)) = 0.5;
  t(AuxIndex::level(1), AuxIndex::kR) = 0.5;
  for (int r = 1; r <= m - 1; ++r) {
    double c = res.cos_k(r);
    t(AuxIndex::level(r), AuxIndex::level(r)) = c * c;
    if (r + 1 <= m - 1) {
      double up = res.sin_k(2LL * ((r + 1) / 2));
      double down = res.sin_k(2LL * (r / 2) + 1);
      t(AuxIndex::level(r), AuxIndex::level(r + 1)) = 0.5 * up * up;
      t(AuxIndex::level(r + 1), AuxIndex::level(r)) = 0.5 * down * down;
    }
  }
  return tm;
}

/// <L|T^n|R> for n = 0..n_max.
inline std::vector<double> transfer_corner_sequence(const TransferMatrix& tm, int n_max) {
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(tm.t.rows());
  v(AuxIndex::kL) = 1.0;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    out.push_back(v(AuxIndex::kR));
    v = v * tm.t;
  }
  return out;
}

/// D_Z = (1/4) lim n / <L|T^n|R>, from the slope of a linear fit over the
/// second half of the iterates.
inline double dz_numeric(const ResonantAnisotropy& res, int n_max = 2000) {
  if (n_max < 100) throw InvalidArgument("dz_numeric needs n_max >= 100");
  auto seq = transfer_corner_sequence(build_transfer_matrix(res), n_max);
  std::vector<double> xs, ys;
  for (int n = n_max / 2; n <= n_max; ++n) {
    xs.push_back(n);
    ys.push_back(seq[static_cast<std::size_t>(n)]);
  }
  auto fit = fit_line(xs, ys);
  return 1.0 / (4.0 * fit.slope);
}

/// D_Z = (1 - Delta^2) m / (2 (m - 1)).
inline double dz_closed_form(const ResonantAnisotropy& res) {
  double s = res.sin_k(1);
  return 0.5 * s * s * res.m() / (res.m() - 1.0);
}

// ---------------------------------------------------------------------------
// Infinite-temperature inner products

/// Connected overlap sum_x [w(f^dagger eta_x(g)) - w(f^dagger) w(eta_x(g))] in
/// the product state w ~ exp(-field M), the beta -> 0 limit taken at fixed
/// beta chi. At field 0 this is the normalized-trace sum `ti_inner`.
inline Complex state_ti_inner(const LocalOperator& f, const LocalOperator& g, double field) {
  if (field == 0.0) return ti_inner(f, g);
  const double mz = -std::tanh(field);
  auto expect = [&](const PauliString& p) -> double {
    return p.xmask() != 0 ? 0.0 : std::pow(mz, std::popcount(p.zmask()));
  };
  CompensatedSum<Complex> s;
  for (const auto& [pf, cf] : f.terms()) {
    if (pf.is_identity()) continue;
    for (const auto& [pg, cg] : g.terms()) {
      if (pg.is_identity()) continue;
      // Disjoint windows factorize and drop out of the connected part.
      for (int x = pf.offset() - pg.last_site(); x <= pf.last_site() - pg.offset(); ++x) {
        PauliString q = pg.shifted(x);
        auto [e, prod] = string_multiply_exponent(pf, q);
        double joint = expect(prod);
        double split = expect(pf) * expect(q);
        if (joint == 0.0 && split == 0.0) continue;
        s += std::conj(cf) * cg * (i_power(e) * joint - split);
      }
    }
  }
  return s.value();
}

// ---------------------------------------------------------------------------
// Mazur bounds at beta -> 0

struct MazurReport {
  double w = 0.0;
  double u = 0.0;
  double bound = 0.0;
  int d_max = 0;
  std::vector<std::pair<int, double>> convergence;
};

/// Single-charge bound w^2 / (2u) for the Z-charge truncated at d_max, the
/// beta -> 0 value of D_beta / beta. Densities of different order have
/// disjoint symbol patterns, so u = sum_d ||q^(d)||^2 and only q^(2)
/// overlaps the two-site current.
inline MazurReport mazur_bound_zcharge(const ResonantAnisotropy& res, int d_max) {
  if (d_max < 2) throw InvalidArgument("d_max must be at least 2");
  MpoTriple mpo = build_mpo(res);
  MazurReport rep;
  rep.d_max = d_max;
  rep.w = ti_inner(spin_current_density(), density(mpo, 2)).real();
  auto norms = hs_norms_squared_by_transfer(mpo, d_max);
  CompensatedSum<double> u;
  for (int d = 2; d <= d_max; ++d) {
    u += norms[static_cast<std::size_t>(d - 2)];
    rep.convergence.emplace_back(d, rep.w * rep.w / (2.0 * u.value()));
  }
  rep.u = u.value();
  rep.bound = rep.convergence.back().second;
  return rep;
}

struct MultiChargeMazurReport {
  std::vector<double> wk;
  Eigen::MatrixXd ukl;
  double bound = 0.0;
  double conditioning = 1.0;
};

/// (1/2) sum_kl w_k (U^+)_kl w_l over an arbitrary set of charges, each given
/// as the sum of its densities. Eigenvalues of U below 1e-10 of the largest
/// are projected out.
inline MultiChargeMazurReport mazur_bound_general(std::span<const LocalOperator> charges,
                                                  double field = 0.0) {
  if (charges.empty()) throw InvalidArgument("charge set is empty");
  const auto m = static_cast<Eigen::Index>(charges.size());
  const LocalOperator j = spin_current_density();
  MultiChargeMazurReport rep;
  rep.ukl = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    rep.wk.push_back(state_ti_inner(j, charges[static_cast<std::size_t>(k)], field).real());
    for (Eigen::Index l = k; l < m; ++l) {
      double v = state_ti_inner(charges[static_cast<std::size_t>(k)],
                                charges[static_cast<std::size_t>(l)], field)
                     .real();
      rep.ukl(k, l) = v;
      rep.ukl(l, k) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rep.ukl);
  const auto& lambda = eig.eigenvalues();
  double top = lambda.cwiseAbs().maxCoeff();
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rep.wk.data(), m);
  CompensatedSum<double> b;
  double kept_min = top;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (top == 0.0 || lambda(i) <= 1e-10 * top) continue;
    double proj = eig.eigenvectors().col(i).dot(w);
    b += proj * proj / lambda(i);
    kept_min = std::min(kept_min, lambda(i));
  }
  rep.bound = 0.5 * b.value();
  rep.conditioning = top > 0.0 ? top / kept_min : 1.0;
  return rep;
}

/// Boost charges q_1..q_kmax, optionally followed by the Z-charge truncated
/// at d_max, in the beta -> 0 state at reduced field `chi`.
inline MultiChargeMazurReport mazur_bound_multi(const ChargeSequence& charges,
                                                const std::optional<ResonantAnisotropy>& res,
                                                double chi, int d_max) {
  std::vector<LocalOperator> set;
  for (const auto& e : charges.entries) set.push_back(e.q.density());
  if (res) {
    if (d_max < 2) throw InvalidArgument("d_max must be at least 2");
    LocalOperator z;
    for (const auto& [d, q] : zcharge_densities(*res, d_max).by_order) z += q;
    set.push_back(std::move(z));
  }
  return mazur_bound_general(set, chi);
}

}  // namespace xxz
