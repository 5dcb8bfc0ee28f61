#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "xxz/drude_bounds.hpp"
#include "xxz/ed/spectral.hpp"

namespace xxz::ed {

namespace detail {

/// sum_{a,b} p_a |O_ab|^2 f(E_a - E_b) over the eigenbasis blocks of O,
/// with a the row index.
template <class F>
double weighted_pair_sum(const SpectralData& spec, const BlockOperator& op_e,
                         const std::vector<Eigen::VectorXd>& p, F&& f) {
  CompensatedSum<double> s;
  for (const auto& [k, m] : op_e.blocks) {
    const auto& er = spec.sector_energies[k.first];
    const auto& ec = spec.sector_energies[k.second];
    const auto& pr = p[k.first];
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double a2 = std::norm(m(i, j));
        if (a2 == 0.0) continue;
        s += pr(i) * a2 * f(er(i), ec(j), i, j, k);
      }
    }
  }
  return s.value();
}

inline double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

}  // namespace detail

/// c_n(t) = (1/n) Re w(J tau_t(J)) = (1/n) sum p_a |J_ab|^2 cos((E_a - E_b) t).
inline double cn_of_t(const SpectralData& spec, double t, double beta) {
  auto p = spec.gibbs_weights(beta);
  return detail::weighted_pair_sum(spec, spec.current, p,
                                   [t](double ea, double eb, auto...) {
                                     return std::cos((ea - eb) * t);
                                   }) /
         spec.n;
}

struct AutocorrResult {
  int n = 0;
  double beta = 0.0;
  std::vector<double> times;
  std::vector<double> cn_values;
  double cbar_n = 0.0;
};

/// Infinite-time average: only degenerate pairs |E_a - E_b| <= tol survive.
inline double time_averaged_autocorr(const SpectralData& spec, double beta,
                                     const BlockOperator& observable_e) {
  auto p = spec.gibbs_weights(beta);
  double tol = spec.degeneracy_tol;
  return detail::weighted_pair_sum(spec, observable_e, p,
                                   [tol](double ea, double eb, auto...) {
                                     return std::abs(ea - eb) <= tol ? 1.0 : 0.0;
                                   }) /
         spec.n;
}

inline double time_averaged_autocorr(const SpectralData& spec, double beta) {
  return time_averaged_autocorr(spec, beta, spec.current);
}

/// (1/t_max) int_0^t_max c_n(t) dt = (1/n) sum p_a |J_ab|^2 sinc((E_a - E_b) t_max).
inline double finite_time_average(const SpectralData& spec, double beta, double t_max) {
  auto p = spec.gibbs_weights(beta);
  return detail::weighted_pair_sum(spec, spec.current, p,
                                   [t_max](double ea, double eb, auto...) {
                                     return detail::sinc((ea - eb) * t_max);
                                   }) /
         spec.n;
}

inline AutocorrResult autocorrelation(const SpectralData& spec, double beta,
                                      std::span<const double> times) {
  AutocorrResult out;
  out.n = spec.n;
  out.beta = beta;
  out.times.assign(times.begin(), times.end());
  for (double t : times) out.cn_values.push_back(cn_of_t(spec, t, beta));
  out.cbar_n = time_averaged_autocorr(spec, beta);
  return out;
}

/// t in [0, t_max] with spacing dt, endpoints included.
inline std::vector<double> time_grid(double t_max, double dt) {
  std::vector<double> out;
  auto steps = static_cast<long>(std::llround(t_max / dt));
  for (long i = 0; i <= steps; ++i) out.push_back(static_cast<double>(i) * dt);
  return out;
}

// ---------------------------------------------------------------------------

namespace detail {

/// tr(rho A^dagger B) for eigenbasis blocks.
inline Complex gibbs_inner(const BlockOperator& a, const BlockOperator& b,
                           const std::vector<Eigen::VectorXd>& p) {
  CompensatedSum<Complex> s;
  for (const auto& [k, ma] : a.blocks) {
    const auto* mb = b.find(k);
    if (!mb) continue;
    const auto& pc = p[k.second];
    for (Eigen::Index j = 0; j < ma.cols(); ++j) {
      s += pc(j) * ma.col(j).dot(mb->col(j));
    }
  }
  return s.value();
}

inline void axpy(BlockOperator& y, Complex a, const BlockOperator& x) {
  for (const auto& [k, m] : x.blocks) {
    auto it = y.blocks.find(k);
    if (it == y.blocks.end()) {
      y.blocks.emplace(k, a * m);
    } else {
      it->second += a * m;
    }
  }
}

}  // namespace detail

struct SuzukiResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

/// Finite-n Mazur-Suzuki inequality c_bar_n >= (1/n) sum_k |<Q_k, J>|^2 /
/// <Q_k, Q_k> for the Gram-Schmidt orthogonalized conserved set in the Gibbs
/// inner product tr(rho A^dagger B).
inline SuzukiResult suzuki_finite_check(const SpectralData& spec,
                                        std::span<const LocalOperator> conserved, double beta) {
  auto p = spec.gibbs_weights(beta);
  std::vector<BlockOperator> ortho;
  std::vector<double> norms;
  for (const auto& q : conserved) {
    BlockOperator qe = spec.to_eigenbasis(to_blocks(q, *spec.basis));
    double qmax = max_abs_entry(qe);
    double tol = 1e-10 * std::max(1.0, spec.h_norm) * std::max(1.0, qmax);
    for (const auto& [k, m] : qe.blocks) {
      const auto& er = spec.sector_energies[k.first];
      const auto& ec = spec.sector_energies[k.second];
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
          if (std::abs((er(i) - ec(j)) * m(i, j)) > tol) {
            throw NotConserved("operator does not commute with the chain Hamiltonian");
          }
    }
    double raw = detail::gibbs_inner(qe, qe, p).real();
    for (std::size_t l = 0; l < ortho.size(); ++l) {
      detail::axpy(qe, -detail::gibbs_inner(ortho[l], qe, p) / norms[l], ortho[l]);
    }
    double nn = detail::gibbs_inner(qe, qe, p).real();
    if (nn <= 1e-12 * std::max(raw, 1e-300)) continue;  // linearly dependent
    ortho.push_back(std::move(qe));
    norms.push_back(nn);
  }
  SuzukiResult out;
  out.lhs = time_averaged_autocorr(spec, beta);
  CompensatedSum<double> rhs;
  for (std::size_t k = 0; k < ortho.size(); ++k) {
    rhs += std::norm(detail::gibbs_inner(ortho[k], spec.current, p)) / norms[k];
  }
  out.rhs = rhs.value() / spec.n;
  out.holds = out.lhs >= out.rhs - 1e-8;
  if (!out.holds) throw std::logic_error("finite-n Mazur inequality violated");
  return out;
}

// ---------------------------------------------------------------------------

struct KuboMoriResult {
  int n = 0;
  double beta = 0.0;
  double thermal_dt = 0.0;
  double canonical_dt = 0.0;
  double gap = 0.0;
};

/// Finite-time Drude estimators (beta / 2n) sum_ab k_ab |J_ab|^2 sinc((E_a -
/// E_b) t_max), the time average of c_n over [0, t_max]. The thermal one
/// uses k_ab = p_a, the Kubo-Mori one (p_a - p_b) / (beta (E_b - E_a)).
inline KuboMoriResult kubo_mori_compare(const SpectralData& spec, double beta, double t_max) {
  if (!(beta > 0.0)) throw InvalidArgument("Kubo-Mori comparison needs beta > 0");
  auto p = spec.gibbs_weights(beta);
  double tol = spec.degeneracy_tol;
  KuboMoriResult out;
  out.n = spec.n;
  out.beta = beta;
  out.thermal_dt = beta / (2.0 * spec.n) *
                   detail::weighted_pair_sum(spec, spec.current, p,
                                             [t_max](double ea, double eb, auto...) {
                                               return detail::sinc((ea - eb) * t_max);
                                             });
  CompensatedSum<double> s;
  for (const auto& [k, m] : spec.current.blocks) {
    const auto& er = spec.sector_energies[k.first];
    const auto& ec = spec.sector_energies[k.second];
    const auto& pr = p[k.first];
    const auto& pc = p[k.second];
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double a2 = std::norm(m(i, j));
        if (a2 == 0.0) continue;
        double de = ec(j) - er(i);
        double w = std::abs(de) <= tol ? pr(i) : (pr(i) - pc(j)) / (beta * de);
        s += w * a2 * detail::sinc(de * t_max);
      }
    }
  }
  out.canonical_dt = beta / (2.0 * spec.n) * s.value();
  out.gap = std::abs(out.thermal_dt - out.canonical_dt);
  return out;
}

// ---------------------------------------------------------------------------

struct SweepRow {
  int n = 0;
  double cbar_n = 0.0;
  double half_cbar_n = 0.0;  // finite-n estimate of D_beta / beta at beta -> 0
  double window = 0.0;       // n / 8, before the fastest front reaches the far end
  double window_average = 0.0;
  double bound = 0.0;        // Z-charge Mazur bound at the given d_max
  double four_dz = 0.0;
};

/// beta = 0 time averages on open chains next to the n-independent bound.
/// On an open chain J = i[H, P] with P the polarization, so the infinite
/// time average vanishes; the finite-window average is reported alongside.
inline std::vector<SweepRow> bound_vs_ed_sweep(const ResonantAnisotropy& res,
                                               std::span<const int> n_list, int d_max) {
  for (int n : n_list) {
    if (n > 12) throw SizeTooLarge("bound sweep supports n <= 12");
  }
  auto rep = mazur_bound_zcharge(res, d_max);
  double four_dz = 4.0 * dz_closed_form(res);
  std::vector<SweepRow> rows;
  for (int n : n_list) {
    auto spec = diagonalize(n, {res.delta(), 0.0});
    double cbar = time_averaged_autocorr(spec, 0.0);
    double window = n / 8.0;
    rows.push_back({n, cbar, 0.5 * cbar, window, finite_time_average(spec, 0.0, window), rep.bound,
                    four_dz});
  }
  return rows;
}

}  // namespace xxz::ed
