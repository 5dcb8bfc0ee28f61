#pragma once

#include <algorithm>
#include <complex>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xxz/numeric.hpp"
#include "xxz/pauli_string.hpp"

namespace xxz {

using Complex = std::complex<double>;

/// Closed integer interval of lattice sites.
struct Support {
  int first = 0;
  int last = -1;
  int width() const { return last - first + 1; }
  friend bool operator==(const Support&, const Support&) = default;
};

/// Finite complex-weighted sum of Pauli strings.
///
/// Coefficients with magnitude below `kPruneTolerance` are dropped at the end
/// of every arithmetic operation. String composition is exact; the only
/// rounding is in the coefficients.
class LocalOperator {
 public:
  static constexpr double kPruneTolerance = 1e-14;
  using Term = std::pair<PauliString, Complex>;
  using TermMap = std::unordered_map<PauliString, Complex, PauliStringHash>;

  LocalOperator() = default;

  static LocalOperator identity(Complex c = 1.0) {
    LocalOperator op;
    op.add_term(PauliString{}, c);
    return op;
  }

  static LocalOperator term(const PauliString& s, Complex c = 1.0) {
    LocalOperator op;
    op.add_term(s, c);
    return op;
  }

  /// Word over {0,x,y,z,+,-} placed at `offset`. Raising and lowering
  /// symbols expand as sigma^(+-) = (x +- i y) / 2.
  static LocalOperator from_symbols(std::string_view symbols, int offset = 0,
                                    Complex c = 1.0) {
    if (symbols.size() > static_cast<std::size_t>(PauliString::kMaxWidth)) {
      throw WindowTooWide("operator word longer than 64 sites");
    }
    std::vector<std::pair<std::string, Complex>> partial{{std::string(), c}};
    for (char ch : symbols) {
      std::vector<std::pair<std::string, Complex>> next;
      next.reserve(partial.size() * 2);
      for (auto& [w, coeff] : partial) {
        switch (ch) {
          case '+':
            next.emplace_back(w + 'x', coeff * 0.5);
            next.emplace_back(w + 'y', coeff * Complex(0.0, 0.5));
            break;
          case '-':
            next.emplace_back(w + 'x', coeff * 0.5);
            next.emplace_back(w + 'y', coeff * Complex(0.0, -0.5));
            break;
          default:
            next.emplace_back(w + ch, coeff);
        }
      }
      partial = std::move(next);
    }
    LocalOperator op;
    for (auto& [w, coeff] : partial) op.accumulate(PauliString::from_symbols(w, offset), coeff);
    op.prune();
    return op;
  }

  void add_term(const PauliString& s, Complex c) {
    accumulate(s, c);
    auto it = terms_.find(s);
    if (it != terms_.end() && std::abs(it->second) < kPruneTolerance) terms_.erase(it);
  }

  /// Raw accumulation without pruning; call `prune()` when done.
  void accumulate(const PauliString& s, Complex c) { terms_[s] += c; }

  void prune() {
    std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < kPruneTolerance; });
  }

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  Complex coefficient(const PauliString& s) const {
    auto it = terms_.find(s);
    return it == terms_.end() ? Complex{} : it->second;
  }

  /// Terms in canonical order (offset, then masks).
  std::vector<Term> sorted_terms() const {
    std::vector<Term> out(terms_.begin(), terms_.end());
    std::sort(out.begin(), out.end(),
              [](const Term& a, const Term& b) { return a.first < b.first; });
    return out;
  }

  /// Union of the non-identity term windows; empty for scalars.
  std::optional<Support> support() const {
    std::optional<Support> s;
    for (const auto& [p, c] : terms_) {
      if (p.is_identity()) continue;
      if (!s) {
        s = Support{p.offset(), p.last_site()};
      } else {
        s->first = std::min(s->first, p.offset());
        s->last = std::max(s->last, p.last_site());
      }
    }
    return s;
  }

  LocalOperator& operator+=(const LocalOperator& other) {
    for (const auto& [p, c] : other.terms_) accumulate(p, c);
    prune();
    return *this;
  }
  LocalOperator& operator-=(const LocalOperator& other) {
    for (const auto& [p, c] : other.terms_) accumulate(p, -c);
    prune();
    return *this;
  }
  LocalOperator& operator*=(Complex s) {
    for (auto& [p, c] : terms_) c *= s;
    prune();
    return *this;
  }

  friend LocalOperator operator+(LocalOperator a, const LocalOperator& b) { return a += b; }
  friend LocalOperator operator-(LocalOperator a, const LocalOperator& b) { return a -= b; }
  friend LocalOperator operator-(LocalOperator a) { return a *= -1.0; }
  friend LocalOperator operator*(LocalOperator a, Complex s) { return a *= s; }
  friend LocalOperator operator*(Complex s, LocalOperator a) { return a *= s; }

  friend LocalOperator operator*(const LocalOperator& a, const LocalOperator& b) {
    LocalOperator out;
    for (const auto& [pa, ca] : a.terms_) {
      for (const auto& [pb, cb] : b.terms_) {
        auto [e, p] = string_multiply_exponent(pa, pb);
        out.accumulate(p, i_power(e) * ca * cb);
      }
    }
    out.prune();
    return out;
  }

 private:
  TermMap terms_;
};

/// Largest coefficient difference between two operators.
inline double max_coefficient_distance(const LocalOperator& a, const LocalOperator& b) {
  double d = 0.0;
  for (const auto& [p, c] : a.terms()) d = std::max(d, std::abs(c - b.coefficient(p)));
  for (const auto& [p, c] : b.terms()) {
    if (a.terms().find(p) == a.terms().end()) d = std::max(d, std::abs(c));
  }
  return d;
}

inline bool approx_equal(const LocalOperator& a, const LocalOperator& b, double tol = 1e-12) {
  return max_coefficient_distance(a, b) <= tol;
}

/// Sum of |coefficient| over all terms.
inline double coefficient_norm1(const LocalOperator& a) {
  CompensatedSum<double> s;
  for (const auto& [p, c] : a.terms()) s += std::abs(c);
  return s.value();
}

/// [A, B]. Only anticommuting string pairs survive, each contributing 2AB.
inline LocalOperator commutator(const LocalOperator& a, const LocalOperator& b) {
  LocalOperator out;
  for (const auto& [pa, ca] : a.terms()) {
    for (const auto& [pb, cb] : b.terms()) {
      if (!anticommute(pa, pb)) continue;
      auto [e, p] = string_multiply_exponent(pa, pb);
      out.accumulate(p, 2.0 * i_power(e) * ca * cb);
    }
  }
  out.prune();
  return out;
}

/// Lattice translation eta_x.
inline LocalOperator shift(const LocalOperator& a, int x) {
  LocalOperator out;
  for (const auto& [p, c] : a.terms()) out.accumulate(p.shifted(x), c);
  return out;
}

/// Pauli strings are Hermitian, so the adjoint conjugates coefficients.
inline LocalOperator adjoint(const LocalOperator& a) {
  LocalOperator out;
  for (const auto& [p, c] : a.terms()) out.accumulate(p, std::conj(c));
  return out;
}

/// Global spin flip: x -> x, y -> -y, z -> -z.
inline LocalOperator spin_flip(const LocalOperator& a) {
  LocalOperator out;
  for (const auto& [p, c] : a.terms()) {
    int odd = (p.count_y() + p.count_z()) % 2;
    out.accumulate(p, odd ? -c : c);
  }
  return out;
}

/// Normalized trace tr(A^dagger B) / 2^N over any window containing both.
/// Pauli strings are orthonormal under this product.
inline Complex hs_inner(const LocalOperator& a, const LocalOperator& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  CompensatedSum<Complex> s;
  for (const auto& [p, c] : small.terms()) {
    Complex other = large.coefficient(p);
    if (other == Complex{}) continue;
    s += (&small == &a) ? std::conj(c) * other : std::conj(other) * c;
  }
  return s.value();
}

inline double hs_norm(const LocalOperator& a) { return std::sqrt(hs_inner(a, a).real()); }

/// Translation-invariant density: represents sum_x eta_x(density). The
/// density is aligned so that its support starts at site 0.
class DensityOperator {
 public:
  DensityOperator() = default;

  /// Shifts `op` so that its support starts at site 0.
  explicit DensityOperator(LocalOperator op) : density_(std::move(op)) {
    if (auto s = density_.support(); s && s->first != 0) density_ = shift(density_, -s->first);
  }

  const LocalOperator& density() const { return density_; }
  int width() const {
    auto s = density_.support();
    return s ? s->width() : 0;
  }

 private:
  LocalOperator density_;
};

/// sum_x hs_inner(f, eta_x(g)) at infinite temperature. Each pair of terms
/// with equal symbol pattern overlaps at exactly one shift, so the sum
/// reduces to matching patterns. Identity components are excluded (the
/// translation sum of a constant diverges); the densities are treated as
/// traceless.
inline Complex ti_inner(const LocalOperator& f, const LocalOperator& g) {
  auto key = [](const PauliString& p) { return PauliString(0, p.xmask(), p.zmask()); };
  std::unordered_map<PauliString, CompensatedSum<Complex>, PauliStringHash> fsum, gsum;
  for (const auto& [p, c] : f.terms()) {
    if (!p.is_identity()) fsum[key(p)] += std::conj(c);
  }
  for (const auto& [p, c] : g.terms()) {
    if (!p.is_identity()) gsum[key(p)] += c;
  }
  CompensatedSum<Complex> s;
  for (const auto& [k, fs] : fsum) {
    auto it = gsum.find(k);
    if (it != gsum.end()) s += fs.value() * it->second.value();
  }
  return s.value();
}

inline Complex ti_inner(const DensityOperator& f, const DensityOperator& g) {
  return ti_inner(f.density(), g.density());
}

/// Sum of shifted copies eta_x(density) for x in [first, last].
inline LocalOperator translation_sum(const LocalOperator& density, int first, int last) {
  LocalOperator out;
  for (int x = first; x <= last; ++x) {
    for (const auto& [p, c] : density.terms()) out.accumulate(p.shifted(x), c);
  }
  out.prune();
  return out;
}

}  // namespace xxz
