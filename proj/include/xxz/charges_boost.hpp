#pragma once

#include <map>
#include <vector>

#include "xxz/local_operator.hpp"

namespace xxz {

/// XXZ chain h = xx + yy + delta zz (+ chi z on the left site).
struct XxzParams {
  double delta = 1.0;
  double chi = 0.0;
};

inline LocalOperator hamiltonian_density(const XxzParams& params) {
  LocalOperator h;
  h.accumulate(PauliString::from_symbols("xx"), 1.0);
  h.accumulate(PauliString::from_symbols("yy"), 1.0);
  h.accumulate(PauliString::from_symbols("zz"), params.delta);
  h.accumulate(PauliString::from_symbols("z"), params.chi);
  h.prune();
  return h;
}

/// Spin current j = 2(xy - yx).
inline LocalOperator spin_current_density() {
  LocalOperator j;
  j.accumulate(PauliString::from_symbols("xy"), 2.0);
  j.accumulate(PauliString::from_symbols("yx"), -2.0);
  return j;
}

inline LocalOperator magnetization_density() {
  return LocalOperator::term(PauliString::from_symbols("z"));
}

/// i sum_x [h_x, eta_1(q)] over every x where h_x overlaps eta_1(q).
inline LocalOperator bulk_derivative(const DensityOperator& q, const LocalOperator& h) {
  auto qs = shift(q.density(), 1);
  auto sq = qs.support();
  auto sh = h.support();
  if (!sq || !sh) return {};
  LocalOperator out;
  for (int x = sq->first - sh->last; x <= sq->last - sh->first; ++x) {
    out += commutator(shift(h, x), qs);
  }
  return out * Complex(0.0, 1.0);
}

/// Solves p - eta_1(p) = d for local p with no identity component.
///
/// Terms of `d` are grouped by translation class (same symbols, any offset);
/// p's coefficient at offset o is the running sum of d's class coefficients
/// up to o. Each class must sum to zero, otherwise p would not be local.
inline LocalOperator anti_difference(const LocalOperator& d, double tolerance = 1e-10) {
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::map<int, Complex>> classes;
  for (const auto& [p, c] : d.terms()) {
    if (p.is_identity()) {
      if (std::abs(c) > tolerance) throw NotTelescoping("identity component in difference");
      continue;
    }
    classes[{p.xmask(), p.zmask()}][p.offset()] += c;
  }
  LocalOperator out;
  for (const auto& [masks, by_offset] : classes) {
    CompensatedSum<Complex> running;
    int last = by_offset.rbegin()->first;
    auto it = by_offset.begin();
    for (int o = by_offset.begin()->first; o <= last; ++o) {
      if (it != by_offset.end() && it->first == o) {
        running += it->second;
        ++it;
      }
      if (o == last) {
        if (std::abs(running.value()) > tolerance) {
          throw NotTelescoping("translation class residue " +
                               std::to_string(std::abs(running.value())));
        }
        break;
      }
      out.accumulate(PauliString(o, masks.first, masks.second), running.value());
    }
  }
  out.prune();
  return out;
}

/// q_{k+1} = p_k / 2 + (i/2) sum_x (x + 1) [h_x, q_k], summed over every x
/// where h_x overlaps q_k.
inline DensityOperator boost_step(const DensityOperator& q, const DensityOperator& p,
                                  const LocalOperator& h) {
  LocalOperator next = p.density() * 0.5;
  auto sq = q.density().support();
  auto sh = h.support();
  if (sq && sh) {
    LocalOperator moment;
    for (int x = sq->first - sh->last; x <= sq->last - sh->first; ++x) {
      if (x + 1 == 0) continue;
      moment += commutator(shift(h, x), q.density()) * static_cast<double>(x + 1);
    }
    next += moment * Complex(0.0, 0.5);
  }
  return DensityOperator(std::move(next));
}

struct ChargeEntry {
  int k = 0;
  DensityOperator q;  // charge density on k sites
  DensityOperator p;  // current density on k + 1 sites
};

/// Boost-generated charges: k = 1 is the magnetization with current j, k = 2
/// the energy, and k >= 3 follow from the recurrences. With a field chi the
/// energy density carries chi z, while the boost runs on the field-free
/// density: z commutes with every q_k, and boosting it would add a chi j
/// piece that is not conserved. Currents always use the full density.
struct ChargeSequence {
  XxzParams params;
  std::vector<ChargeEntry> entries;

  const ChargeEntry& at(int k) const { return entries.at(static_cast<std::size_t>(k - 1)); }
  int k_max() const { return static_cast<int>(entries.size()); }
};

inline ChargeSequence generate_charges(const XxzParams& params, int k_max) {
  if (k_max < 2) throw InvalidArgument("k_max must be at least 2");
  ChargeSequence seq;
  seq.params = params;
  const LocalOperator h = hamiltonian_density(params);
  const LocalOperator h0 = hamiltonian_density({params.delta, 0.0});

  auto add = [&](int k, DensityOperator q) {
    DensityOperator p(anti_difference(bulk_derivative(q, h)));
    seq.entries.push_back({k, std::move(q), std::move(p)});
  };
  add(1, DensityOperator(magnetization_density()));
  add(2, DensityOperator(h));
  for (int k = 3; k <= k_max; ++k) {
    const auto& prev = seq.entries.back();
    DensityOperator q0 = k == 3 ? DensityOperator(h0) : prev.q;
    DensityOperator p0 = k == 3 ? DensityOperator(anti_difference(bulk_derivative(q0, h0))) : prev.p;
    add(k, boost_step(q0, p0, h0));
  }
  return seq;
}

/// [H_n, Q_n] on the open chain [1, n] with H_n = sum of h_x and Q_n = sum
/// of eta_x(q) over all placements inside the chain.
inline LocalOperator boundary_commutator(const DensityOperator& q, int n, const LocalOperator& h) {
  int dq = q.width();
  int dh = h.support() ? h.support()->width() : 0;
  if (n < dq || n < dh) throw InvalidArgument("chain shorter than the densities");
  LocalOperator hn = translation_sum(h, 1, n - dh + 1);
  LocalOperator qn = translation_sum(q.density(), 1, n - dq + 1);
  return commutator(hn, qn);
}

/// Parts of an open-chain operator near each end; `bulk` collects every term
/// that reaches into [width + 1, n - width].
struct BoundarySplit {
  LocalOperator left;
  LocalOperator right;  // shifted so the chain's last site sits at 0
  LocalOperator bulk;
};

inline BoundarySplit split_boundary(const LocalOperator& op, int n, int width) {
  BoundarySplit out;
  for (const auto& [p, c] : op.terms()) {
    if (p.is_identity()) {
      out.bulk.accumulate(p, c);
    } else if (p.last_site() <= width) {
      out.left.accumulate(p, c);
    } else if (p.offset() >= n - width + 1) {
      out.right.accumulate(p.shifted(-n), c);
    } else {
      out.bulk.accumulate(p, c);
    }
  }
  return out;
}

}  // namespace xxz
