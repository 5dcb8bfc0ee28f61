#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "xxz/charges_boost.hpp"
#include "xxz/local_operator.hpp"
#include "xxz/numeric.hpp"

namespace xxz {

/// Delta = cos(pi l / m) with gcd(l, m) = 1 and m > 1.
class ResonantAnisotropy {
 public:
  ResonantAnisotropy(int l, int m) : l_(l), m_(m) {
    if (m <= 1 || l <= 0 || std::gcd(l, m) != 1) {
      throw InvalidResonance("resonance needs l >= 1, m > 1 and gcd(l, m) = 1 (got l=" +
                             std::to_string(l) + ", m=" + std::to_string(m) + ")");
    }
  }
  int l() const { return l_; }
  int m() const { return m_; }
  double phi() const { return std::numbers::pi * l_ / m_; }
  double delta() const { return cos_pi_fraction(l_, m_); }
  /// sin(k phi) and cos(k phi), exact at multiples of pi/2.
  double sin_k(long long k) const { return sin_pi_fraction(k * l_, m_); }
  double cos_k(long long k) const { return cos_pi_fraction(k * l_, m_); }

 private:
  int l_;
  int m_;
};

/// Auxiliary basis ordering shared by the MPO and the transfer matrix:
/// index 0 is |L>, 1 is |R>, and 1 + r is |r> for r = 1..m-1.
struct AuxIndex {
  static constexpr Eigen::Index kL = 0;
  static constexpr Eigen::Index kR = 1;
  static Eigen::Index level(int r) { return 1 + r; }
};

struct MpoTriple {
  ResonantAnisotropy resonance;
  Eigen::MatrixXd a0;
  Eigen::MatrixXd aplus;
  Eigen::MatrixXd aminus;

  const Eigen::MatrixXd& matrix(char symbol) const {
    return symbol == '+' ? aplus : symbol == '-' ? aminus : a0;
  }
};

/// Rank-(m+1) matrices A0, A+ and A- of the quasi-local charge. The link
/// between |m-1> and |m> vanishes in one direction at resonance, so no
/// contraction ⟨L|...|R⟩ ever visits |r> for r >= m.
inline MpoTriple build_mpo(const ResonantAnisotropy& res) {
  const int m = res.m();
  const Eigen::Index dim = m + 1;
  MpoTriple mpo{res, Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim),
                Eigen::MatrixXd::Zero(dim, dim)};
  mpo.a0(AuxIndex::kL, AuxIndex::kL) = 1.0;
  mpo.a0(AuxIndex::kR, AuxIndex::kR) = 1.0;
  for (int r = 1; r <= m - 1; ++r) mpo.a0(AuxIndex::level(r), AuxIndex::level(r)) = res.cos_k(r);

  mpo.aplus(AuxIndex::kL, AuxIndex::level(1)) = 1.0;
  mpo.aminus(AuxIndex::level(1), AuxIndex::kR) = 1.0;
  auto up = [&](int r) { return res.sin_k(2LL * ((r + 1) / 2)); };
  auto down = [&](int r) { return -res.sin_k(2LL * (r / 2) + 1); };
  for (int r = 1; r <= m - 2; ++r) {
    mpo.aplus(AuxIndex::level(r), AuxIndex::level(r + 1)) = up(r);
    mpo.aminus(AuxIndex::level(r + 1), AuxIndex::level(r)) = down(r);
  }
  if (std::min(std::abs(up(m - 1)), std::abs(down(m - 1))) > 1e-14) {
    throw std::logic_error("MPO truncation leaks beyond rank m + 1");
  }
  return mpo;
}

/// Density of order d in the ladder basis: q^(d) = i sum_w c(w) (s+ w s- -
/// s- w' s+) with the middle word w over {0,+,-} and w' its +/- mirror.
struct LadderDensity {
  int order = 0;
  std::map<std::string, double> coefficients;
};

inline char mirror_symbol(char s) { return s == '+' ? '-' : s == '-' ? '+' : s; }

namespace detail {

using AuxState = std::vector<std::unordered_map<std::string, double>>;

inline LadderDensity close_sweep(const MpoTriple& mpo, const AuxState& state, int order) {
  LadderDensity out;
  out.order = order;
  for (Eigen::Index r = 0; r < mpo.aminus.rows(); ++r) {
    double tail = mpo.aminus(r, AuxIndex::kR);
    if (tail == 0.0) continue;
    for (const auto& [w, c] : state[static_cast<std::size_t>(r)]) {
      double v = c * tail;
      if (v != 0.0) out.coefficients[w] += v;
    }
  }
  return out;
}

}  // namespace detail

/// All ladder densities of order 2..d_max from a single left-to-right sweep.
/// Each auxiliary basis vector carries the map word -> partial contraction.
inline std::vector<LadderDensity> ladder_densities(const MpoTriple& mpo, int d_max) {
  if (d_max < 2) throw InvalidArgument("density order must be at least 2");
  const auto dim = static_cast<std::size_t>(mpo.a0.rows());
  detail::AuxState state(dim);
  for (Eigen::Index r = 0; r < mpo.aplus.cols(); ++r) {
    double v = mpo.aplus(AuxIndex::kL, r);
    if (v != 0.0) state[static_cast<std::size_t>(r)][std::string()] = v;
  }
  std::vector<LadderDensity> out;
  out.push_back(detail::close_sweep(mpo, state, 2));
  for (int d = 3; d <= d_max; ++d) {
    detail::AuxState next(dim);
    for (std::size_t r = 0; r < dim; ++r) {
      for (const auto& [w, c] : state[r]) {
        for (char s : {'0', '+', '-'}) {
          const auto& a = mpo.matrix(s);
          for (Eigen::Index r2 = 0; r2 < a.cols(); ++r2) {
            double v = a(static_cast<Eigen::Index>(r), r2);
            if (v == 0.0) continue;
            next[static_cast<std::size_t>(r2)][w + s] += c * v;
          }
        }
      }
    }
    state = std::move(next);
    out.push_back(detail::close_sweep(mpo, state, d));
  }
  return out;
}

/// Expands i c (s+ w s- - s- w' s+) into Pauli strings. Writing the product
/// of ladder factors on a fixed x/y choice as f, the pair contributes
/// i c (f - conj(f)) = -2 c Im(f): only choices with an odd number of y
/// survive.
inline void accumulate_ladder_term(LocalOperator& out, const std::string& middle, double c,
                                   int offset = 0) {
  std::string word = "+" + middle + "-";
  std::vector<int> ladder_sites;
  std::vector<int> ladder_sign;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i] == '+' || word[i] == '-') {
      ladder_sites.push_back(static_cast<int>(i));
      ladder_sign.push_back(word[i] == '+' ? 1 : -1);
    }
  }
  const auto k = ladder_sites.size();
  std::uint64_t xbase = 0;
  for (int s : ladder_sites) xbase |= std::uint64_t{1} << s;
  const double scale = -2.0 * c * std::ldexp(1.0, -static_cast<int>(k));
  for (std::uint64_t choice = 0; choice < (std::uint64_t{1} << k); ++choice) {
    int exponent = 0;
    std::uint64_t zmask = 0;
    for (std::size_t b = 0; b < k; ++b) {
      if ((choice >> b) & 1u) {
        exponent += ladder_sign[b];
        zmask |= std::uint64_t{1} << ladder_sites[b];
      }
    }
    exponent = ((exponent % 4) + 4) % 4;
    if (exponent % 2 == 0) continue;
    double im = exponent == 1 ? 1.0 : -1.0;
    out.accumulate(PauliString(offset, xbase, zmask), scale * im);
  }
}

inline LocalOperator to_local_operator(const LadderDensity& q) {
  LocalOperator out;
  for (const auto& [w, c] : q.coefficients) accumulate_ladder_term(out, w, c);
  out.prune();
  return out;
}

/// q^(d) in the Pauli basis.
inline LocalOperator density(const MpoTriple& mpo, int d) {
  return to_local_operator(ladder_densities(mpo, d).back());
}

/// ||q^(d)||_HS^2 read off the ladder coefficients: s+/s- have normalized
/// HS weight 1/2, identity 1, and the two mirrored strings are orthogonal.
inline double hs_norm_squared(const LadderDensity& q) {
  CompensatedSum<double> s;
  for (const auto& [w, c] : q.coefficients) {
    int ladders = 2;
    for (char ch : w) ladders += (ch != '0');
    s += 2.0 * c * c * std::ldexp(1.0, -ladders);
  }
  return s.value();
}

/// ||q^(d)||_HS^2 for d = 2..d_max by contracting the doubled MPO
/// E = A0 (x) A0 + (A+ (x) A+ + A- (x) A-) / 2; polynomial in d_max.
inline std::vector<double> hs_norms_squared_by_transfer(const MpoTriple& mpo, int d_max) {
  const Eigen::Index dim = mpo.a0.rows();
  auto doubled = [&](const Eigen::MatrixXd& a, double w) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim * dim, dim * dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index k = 0; k < dim; ++k)
          for (Eigen::Index l = 0; l < dim; ++l) out(i * dim + k, j * dim + l) = w * a(i, j) * a(k, l);
    return out;
  };
  Eigen::MatrixXd e = doubled(mpo.a0, 1.0) + doubled(mpo.aplus, 0.5) + doubled(mpo.aminus, 0.5);
  Eigen::MatrixXd head = doubled(mpo.aplus, 0.5);
  Eigen::MatrixXd tail = doubled(mpo.aminus, 0.5);
  Eigen::RowVectorXd left = head.row(AuxIndex::kL * dim + AuxIndex::kL);
  Eigen::VectorXd right = tail.col(AuxIndex::kR * dim + AuxIndex::kR);
  std::vector<double> out;
  for (int d = 2; d <= d_max; ++d) {
    out.push_back(2.0 * left.dot(right));
    left = left * e;
  }
  return out;
}

struct ZChargeDensities {
  ResonantAnisotropy resonance;
  std::map<int, LocalOperator> by_order;
};

inline ZChargeDensities zcharge_densities(const ResonantAnisotropy& res, int d_max) {
  ZChargeDensities out{res, {}};
  for (const auto& q : ladder_densities(build_mpo(res), d_max)) {
    out.by_order.emplace(q.order, to_local_operator(q));
  }
  return out;
}

/// Q_n = sum_{d=2}^{d_max} sum_{x=1}^{n-d+1} eta_x(q^(d)).
inline LocalOperator assemble_charge(const ResonantAnisotropy& res, int d_max, int n) {
  if (d_max < 2 || n < d_max) throw InvalidArgument("need n >= d_max >= 2");
  LocalOperator q;
  for (const auto& ld : ladder_densities(build_mpo(res), d_max)) {
    LocalOperator dens = to_local_operator(ld);
    for (int x = 1; x <= n - ld.order + 1; ++x) {
      for (const auto& [p, c] : dens.terms()) q.accumulate(p.shifted(x), c);
    }
  }
  q.prune();
  return q;
}

struct BoundaryResidual {
  LocalOperator residual;
  double residual_norm = 0.0;     // sum of |coefficients|
  double residual_hs_norm = 0.0;  // normalized Hilbert-Schmidt norm
};

/// [H_n, Q_n] + 2i z_1 - 2i z_n; vanishes identically when d_max = n.
/// The Hilbert-Schmidt norm of the residual shrinks with d_max from d_max = m
/// on; the coefficient sum need not, since the number of strings grows.
inline BoundaryResidual boundary_residual(const ResonantAnisotropy& res, int d_max, int n) {
  LocalOperator qn = assemble_charge(res, d_max, n);
  LocalOperator hn = translation_sum(hamiltonian_density({res.delta(), 0.0}), 1, n - 1);
  BoundaryResidual out;
  out.residual = commutator(hn, qn);
  out.residual.add_term(PauliString::single(1, Pauli::Z), Complex(0.0, 2.0));
  out.residual.add_term(PauliString::single(n, Pauli::Z), Complex(0.0, -2.0));
  out.residual_norm = coefficient_norm1(out.residual);
  out.residual_hs_norm = hs_norm(out.residual);
  return out;
}

struct DecayFit {
  double gamma = 0.0;
  double xi = 0.0;
};

/// Least-squares fit of log ||q^(d)|| = log(gamma) - xi d over the orders
/// whose norm exceeds the pruning tolerance. `norms[i]` belongs to d = i + 2.
inline DecayFit fit_norm_decay(std::span<const double> norms) {
  std::vector<double> ds, logs;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (norms[i] > LocalOperator::kPruneTolerance) {
      ds.push_back(static_cast<double>(i + 2));
      logs.push_back(std::log(norms[i]));
    }
  }
  if (ds.size() < 2) throw DegenerateFit("fewer than two orders with non-negligible norm");
  auto fit = fit_line(ds, logs);
  return {std::exp(fit.intercept), -fit.slope};
}

/// HS norms ||q^(d)|| for d = 2..d_max.
inline std::vector<double> zcharge_hs_norms(const ResonantAnisotropy& res, int d_max) {
  auto sq = hs_norms_squared_by_transfer(build_mpo(res), d_max);
  for (auto& v : sq) v = std::sqrt(std::max(v, 0.0));
  return sq;
}

inline DecayFit norm_decay_fit(const ResonantAnisotropy& res, int d_max) {
  if (d_max < 6) throw InvalidArgument("norm decay fit needs d_max >= 6");
  auto norms = zcharge_hs_norms(res, d_max);
  return fit_norm_decay(norms);
}

/// Isotropic points Delta = +-1: q^(d) = i Delta^(d-2) (s+_1 s-_d - s-_1 s+_d),
/// whose norms do not decay with d.
inline std::map<int, LocalOperator> marginal_charge_densities(int delta_sign, int d_max) {
  if (delta_sign != 1 && delta_sign != -1) throw InvalidArgument("marginal case needs Delta = +-1");
  if (d_max < 2) throw InvalidArgument("density order must be at least 2");
  std::map<int, LocalOperator> out;
  for (int d = 2; d <= d_max; ++d) {
    LocalOperator q;
    double c = ((d - 2) % 2 == 0 || delta_sign == 1) ? 1.0 : -1.0;
    accumulate_ladder_term(q, std::string(static_cast<std::size_t>(d - 2), '0'), c);
    q.prune();
    out.emplace(d, std::move(q));
  }
  return out;
}

}  // namespace xxz
