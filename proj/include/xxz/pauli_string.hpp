#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>

#include "xxz/errors.hpp"

namespace xxz {

enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

/// Tensor product of single-site Pauli matrices on a contiguous window of the
/// integer lattice. Bit `i` of the masks refers to site `offset + i`; a site
/// carries x if only the x bit is set, z if only the z bit is set and y if
/// both are set.
///
/// Values are kept canonical: the first and last window sites are
/// non-identity, and the identity string has width 0 and offset 0.
class PauliString {
 public:
  static constexpr int kMaxWidth = 64;

  PauliString() = default;

  /// Builds from raw masks and canonicalizes.
  PauliString(int offset, std::uint64_t xmask, std::uint64_t zmask)
      : offset_(offset), xmask_(xmask), zmask_(zmask) {
    canonicalize();
  }

  /// Parses a word over {0,x,y,z} (also I/X/Y/Z) starting at `offset`.
  static PauliString from_symbols(std::string_view symbols, int offset = 0) {
    if (symbols.size() > static_cast<std::size_t>(kMaxWidth)) {
      throw WindowTooWide("Pauli word longer than 64 sites");
    }
    std::uint64_t x = 0, z = 0;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      switch (symbols[i]) {
        case '0': case 'I': case 'i': break;
        case 'x': case 'X': x |= std::uint64_t{1} << i; break;
        case 'z': case 'Z': z |= std::uint64_t{1} << i; break;
        case 'y': case 'Y':
          x |= std::uint64_t{1} << i;
          z |= std::uint64_t{1} << i;
          break;
        default:
          throw InvalidArgument(std::string("not a Pauli symbol: ") + symbols[i]);
      }
    }
    return PauliString(offset, x, z);
  }

  static PauliString single(int site, Pauli p) {
    auto bits = static_cast<std::uint8_t>(p);
    return PauliString(site, bits & 1u, (bits >> 1) & 1u);
  }

  int offset() const { return offset_; }
  int width() const { return width_; }
  std::uint64_t xmask() const { return xmask_; }
  std::uint64_t zmask() const { return zmask_; }
  bool is_identity() const { return width_ == 0; }
  /// Last occupied site (inclusive); meaningless for the identity.
  int last_site() const { return offset_ + width_ - 1; }

  Pauli at(int site) const {
    int i = site - offset_;
    if (i < 0 || i >= width_) return Pauli::I;
    unsigned x = (xmask_ >> i) & 1u, z = (zmask_ >> i) & 1u;
    return static_cast<Pauli>(x | (z << 1));
  }

  int count_y() const { return std::popcount(xmask_ & zmask_); }
  int count_z() const { return std::popcount(zmask_ & ~xmask_); }
  int weight() const { return std::popcount(xmask_ | zmask_); }

  /// Symbols of the canonical window, e.g. "xzy"; empty for the identity.
  std::string symbols() const {
    std::string out(static_cast<std::size_t>(width_), '0');
    for (int i = 0; i < width_; ++i) {
      out[static_cast<std::size_t>(i)] = "0xzy"[static_cast<int>(at(offset_ + i))];
    }
    return out;
  }

  PauliString shifted(int by) const {
    if (is_identity()) return *this;
    PauliString s = *this;
    s.offset_ += by;
    return s;
  }

  /// Same symbols irrespective of position.
  bool same_pattern(const PauliString& other) const {
    return xmask_ == other.xmask_ && zmask_ == other.zmask_;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;

  /// Canonical order: offset, then masks.
  friend bool operator<(const PauliString& a, const PauliString& b) {
    if (a.offset_ != b.offset_) return a.offset_ < b.offset_;
    if (a.xmask_ != b.xmask_) return a.xmask_ < b.xmask_;
    return a.zmask_ < b.zmask_;
  }

 private:
  void canonicalize() {
    std::uint64_t occ = xmask_ | zmask_;
    if (occ == 0) {
      offset_ = 0;
      xmask_ = zmask_ = 0;
      width_ = 0;
      return;
    }
    int tz = std::countr_zero(occ);
    xmask_ >>= tz;
    zmask_ >>= tz;
    offset_ += tz;
    width_ = std::bit_width(xmask_ | zmask_);
  }

  int offset_ = 0;
  std::uint64_t xmask_ = 0;
  std::uint64_t zmask_ = 0;
  int width_ = 0;
};

struct PauliStringHash {
  std::size_t operator()(const PauliString& s) const noexcept {
    std::uint64_t h = s.xmask() * 0x9E3779B97F4A7C15ull;
    h ^= (s.zmask() + 0x632BE59BD9B4E019ull + (h << 6) + (h >> 2));
    h ^= static_cast<std::uint64_t>(static_cast<std::int64_t>(s.offset())) * 0xC2B2AE3D27D4EB4Full;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

namespace detail {

struct AlignedMasks {
  int base = 0;
  std::uint64_t ax = 0, az = 0, bx = 0, bz = 0;
};

inline AlignedMasks align(const PauliString& a, const PauliString& b) {
  AlignedMasks m;
  if (a.is_identity() && b.is_identity()) return m;
  int lo, hi;
  if (a.is_identity()) {
    lo = b.offset();
    hi = b.last_site();
  } else if (b.is_identity()) {
    lo = a.offset();
    hi = a.last_site();
  } else {
    lo = std::min(a.offset(), b.offset());
    hi = std::max(a.last_site(), b.last_site());
  }
  if (hi - lo + 1 > PauliString::kMaxWidth) {
    throw WindowTooWide("product window exceeds 64 sites");
  }
  m.base = lo;
  if (!a.is_identity()) {
    m.ax = a.xmask() << (a.offset() - lo);
    m.az = a.zmask() << (a.offset() - lo);
  }
  if (!b.is_identity()) {
    m.bx = b.xmask() << (b.offset() - lo);
    m.bz = b.zmask() << (b.offset() - lo);
  }
  return m;
}

}  // namespace detail

/// i^k for k mod 4.
inline std::complex<double> i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

/// Product a*b = i^phase * product. The phase exponent is exact: writing
/// sigma(x,z) = i^{xz} X^x Z^z, the reordering Z^{z1} X^{x2} contributes
/// (-1)^{z1 x2} per site.
inline std::pair<int, PauliString> string_multiply_exponent(const PauliString& a,
                                                            const PauliString& b) {
  auto m = detail::align(a, b);
  std::uint64_t x = m.ax ^ m.bx, z = m.az ^ m.bz;
  int e = std::popcount(m.ax & m.az) + std::popcount(m.bx & m.bz) +
          2 * std::popcount(m.az & m.bx) - std::popcount(x & z);
  return {((e % 4) + 4) % 4, PauliString(m.base, x, z)};
}

inline std::pair<std::complex<double>, PauliString> string_multiply(const PauliString& a,
                                                                    const PauliString& b) {
  auto [e, p] = string_multiply_exponent(a, b);
  return {i_power(e), p};
}

inline bool anticommute(const PauliString& a, const PauliString& b) {
  if (a.is_identity() || b.is_identity()) return false;
  if (a.last_site() < b.offset() || b.last_site() < a.offset()) return false;
  auto m = detail::align(a, b);
  return (std::popcount(m.ax & m.bz) + std::popcount(m.az & m.bx)) % 2 == 1;
}

}  // namespace xxz
