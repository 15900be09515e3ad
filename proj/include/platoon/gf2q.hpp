#pragma once

// Arithmetic in GF(2^q), 1 <= q <= 16.
//
// Two paths are provided. FieldElement carries its field identity and computes
// products by carry-less multiplication followed by reduction, which is slow but
// table free. FieldContext owns log/antilog tables (plus a full product table for
// q <= 8) and offers the raw-symbol bulk operations used by the matrix code.

#include <array>
#include <bit>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "platoon/errors.hpp"
#include "platoon/rng.hpp"

namespace platoon::gf {

/// Raw field symbol; interpreted as a GF(2) polynomial of degree < q.
using Symbol = std::uint16_t;

inline constexpr unsigned kMaxExponent = 16;

/// Default reduction polynomial per exponent. Index 0 is unused. All entries are
/// irreducible; q = 8 uses the AES polynomial x^8 + x^4 + x^3 + x + 1, the rest are
/// primitive trinomials/pentanomials from the usual tables.
inline constexpr std::array<std::uint32_t, kMaxExponent + 1> kDefaultPolynomials = {
    0x0,    0x3,    0x7,    0xB,    0x13,   0x25,   0x43,   0x89,   0x11B,
    0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B};

/// Degree of a GF(2) polynomial bitmask; -1 for the zero polynomial.
constexpr int degree(std::uint32_t poly) noexcept {
  return poly == 0 ? -1 : 31 - std::countl_zero(poly);
}

/// Carry-less product. Inputs must have degree < 16 so the result fits.
constexpr std::uint32_t clmul(std::uint32_t a, std::uint32_t b) noexcept {
  std::uint32_t out = 0;
  while (b != 0) {
    if (b & 1U) out ^= a;
    a <<= 1;
    b >>= 1;
  }
  return out;
}

/// Remainder of a modulo m over GF(2). m must be nonzero.
constexpr std::uint32_t poly_mod(std::uint32_t a, std::uint32_t m) noexcept {
  const int dm = degree(m);
  for (int da = degree(a); da >= dm; da = degree(a)) a ^= m << (da - dm);
  return a;
}

/// Irreducibility by trial division against every polynomial of degree 1..deg/2.
constexpr bool is_irreducible(std::uint32_t poly) noexcept {
  const int d = degree(poly);
  if (d < 1) return false;
  for (int dd = 1; 2 * dd <= d; ++dd) {
    for (std::uint32_t div = 1U << dd; div < (2U << dd); ++div) {
      if (poly_mod(poly, div) == 0) return false;
    }
  }
  return true;
}

class FieldContext;

/// Element of GF(2^q). Knows which field it belongs to, so mixing elements of
/// different fields is detected instead of silently producing garbage.
class FieldElement {
 public:
  FieldElement(const FieldContext& ctx, std::uint32_t value);

  Symbol value() const noexcept { return value_; }
  unsigned exponent() const noexcept { return exponent_; }
  std::uint32_t reduction_poly() const noexcept { return poly_; }
  bool is_zero() const noexcept { return value_ == 0; }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;

  friend FieldElement add(const FieldElement& a, const FieldElement& b) {
    check_same_field(a, b);
    return FieldElement(a.exponent_, a.poly_, static_cast<Symbol>(a.value_ ^ b.value_));
  }

  friend FieldElement mul(const FieldElement& a, const FieldElement& b) {
    check_same_field(a, b);
    return FieldElement(a.exponent_, a.poly_,
                        static_cast<Symbol>(poly_mod(clmul(a.value_, b.value_), a.poly_)));
  }

  /// Multiplicative inverse as a^(Q-2).
  friend FieldElement inv(const FieldElement& a) {
    if (a.value_ == 0) throw DomainError("zero has no inverse");
    std::uint32_t e = (1U << a.exponent_) - 2;
    FieldElement acc(a.exponent_, a.poly_, 1);
    FieldElement base = a;
    while (e != 0) {
      if (e & 1U) acc = mul(acc, base);
      base = mul(base, base);
      e >>= 1;
    }
    return acc;
  }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) { return add(a, b); }
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) { return add(a, b); }
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) { return mul(a, b); }

 private:
  friend class FieldContext;

  FieldElement(unsigned exponent, std::uint32_t poly, Symbol value) noexcept
      : poly_(poly), value_(value), exponent_(static_cast<std::uint8_t>(exponent)) {}

  static void check_same_field(const FieldElement& a, const FieldElement& b) {
    if (a.exponent_ != b.exponent_ || a.poly_ != b.poly_) {
      throw UsageError("field context mismatch: GF(2^" + std::to_string(a.exponent_) + ") vs GF(2^" +
                       std::to_string(b.exponent_) + ")");
    }
  }

  std::uint32_t poly_;
  Symbol value_;
  std::uint8_t exponent_;
};

/// Field parameters plus lookup tables. Immutable after construction; copies
/// share the tables and may be used concurrently.
class FieldContext {
 public:
  explicit FieldContext(unsigned exponent)
      : FieldContext(exponent, exponent >= 1 && exponent <= kMaxExponent ? kDefaultPolynomials[exponent] : 0) {}

  FieldContext(unsigned exponent, std::uint32_t reduction_poly) {
    if (exponent < 1 || exponent > kMaxExponent) {
      throw UsageError("field exponent must be in [1, 16], got " + std::to_string(exponent));
    }
    if (degree(reduction_poly) != static_cast<int>(exponent)) {
      throw UsageError("reduction polynomial must have degree exactly " + std::to_string(exponent));
    }
    if (!is_irreducible(reduction_poly)) throw UsageError("reduction polynomial is not irreducible");
    tables_ = build_tables(exponent, reduction_poly);
  }

  unsigned exponent() const noexcept { return tables_->exponent; }
  std::uint32_t reduction_poly() const noexcept { return tables_->poly; }
  /// Field size Q = 2^q.
  std::uint32_t size() const noexcept { return 1U << tables_->exponent; }
  Symbol mask() const noexcept { return static_cast<Symbol>(size() - 1); }

  friend bool operator==(const FieldContext& a, const FieldContext& b) noexcept {
    return a.exponent() == b.exponent() && a.reduction_poly() == b.reduction_poly();
  }

  FieldElement element(std::uint32_t value) const { return FieldElement(*this, value); }
  FieldElement zero() const { return element(0); }
  FieldElement one() const { return element(1); }

  bool owns(const FieldElement& e) const noexcept {
    return e.exponent() == exponent() && e.reduction_poly() == reduction_poly();
  }

  Symbol mul(Symbol a, Symbol b) const noexcept {
    const Tables& t = *tables_;
    if (!t.product.empty()) return t.product[(static_cast<std::size_t>(a) << t.exponent) | b];
    if (a == 0 || b == 0) return 0;
    return t.exp[t.log[a] + t.log[b]];
  }

  Symbol inv(Symbol a) const {
    if (a == 0) throw DomainError("zero has no inverse");
    const Tables& t = *tables_;
    return t.exp[(size() - 1 - t.log[a]) % (size() - 1)];
  }

  /// y += c * x, element-wise.
  void axpy(Symbol c, std::span<const Symbol> x, std::span<Symbol> y) const noexcept {
    if (c == 0) return;
    const Tables& t = *tables_;
    const std::size_t n = x.size();
    if (!t.product.empty()) {
      const Symbol* row = t.product.data() + (static_cast<std::size_t>(c) << t.exponent);
      for (std::size_t j = 0; j < n; ++j) y[j] ^= row[x[j]];
      return;
    }
    const std::uint32_t lc = t.log[c];
    for (std::size_t j = 0; j < n; ++j) {
      if (x[j] != 0) y[j] ^= t.exp[lc + t.log[x[j]]];
    }
  }

  /// y *= c, element-wise.
  void scale(Symbol c, std::span<Symbol> y) const noexcept {
    for (Symbol& v : y) v = mul(c, v);
  }

 private:
  struct Tables {
    unsigned exponent = 0;
    std::uint32_t poly = 0;
    std::vector<std::uint32_t> log;  // log[0] unused
    std::vector<Symbol> exp;         // length 2(Q-1) so log sums need no reduction
    std::vector<Symbol> product;     // Q*Q entries when q <= 8, else empty
  };

  static std::shared_ptr<const Tables> build_tables(unsigned exponent, std::uint32_t poly) {
    auto t = std::make_shared<Tables>();
    t->exponent = exponent;
    t->poly = poly;
    const std::uint32_t q_size = 1U << exponent;
    const std::uint32_t order = q_size - 1;
    auto slow_mul = [poly](std::uint32_t a, std::uint32_t b) { return poly_mod(clmul(a, b), poly); };

    // Irreducible but not necessarily primitive, so search for a generator.
    std::uint32_t generator = 1;
    if (order > 1) {
      for (std::uint32_t g = 2; g < q_size; ++g) {
        std::uint32_t v = g;
        std::uint32_t k = 1;
        while (v != 1) {
          v = slow_mul(v, g);
          ++k;
        }
        if (k == order) {
          generator = g;
          break;
        }
      }
    }
    t->log.assign(q_size, 0);
    t->exp.assign(2 * static_cast<std::size_t>(order), 0);
    std::uint32_t v = 1;
    for (std::uint32_t k = 0; k < order; ++k) {
      t->exp[k] = static_cast<Symbol>(v);
      t->exp[k + order] = static_cast<Symbol>(v);
      t->log[v] = k;
      v = slow_mul(v, generator);
    }
    if (exponent <= 8) {
      t->product.assign(static_cast<std::size_t>(q_size) * q_size, 0);
      for (std::uint32_t a = 1; a < q_size; ++a) {
        for (std::uint32_t b = 1; b < q_size; ++b) {
          t->product[(a << exponent) | b] = t->exp[t->log[a] + t->log[b]];
        }
      }
    }
    return t;
  }

  std::shared_ptr<const Tables> tables_;
};

inline FieldElement::FieldElement(const FieldContext& ctx, std::uint32_t value)
    : poly_(ctx.reduction_poly()), value_(static_cast<Symbol>(value)),
      exponent_(static_cast<std::uint8_t>(ctx.exponent())) {
  if (value >= ctx.size()) {
    throw UsageError("value " + std::to_string(value) + " out of range for GF(2^" +
                     std::to_string(ctx.exponent()) + ")");
  }
}

/// Uniform draw over all Q symbols, zero included.
inline Symbol random_symbol(SeededRng& rng, const FieldContext& ctx) {
  return static_cast<Symbol>(rng() & ctx.mask());
}

inline FieldElement random_element(SeededRng& rng, const FieldContext& ctx) {
  return ctx.element(random_symbol(rng, ctx));
}

/// Fills out with i.i.d. uniform symbols, slicing floor(64/q) symbols per draw.
inline void fill_random(SeededRng& rng, const FieldContext& ctx, std::span<Symbol> out) {
  const unsigned q = ctx.exponent();
  const unsigned per_draw = 64 / q;
  const Symbol mask = ctx.mask();
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t bits = rng();
    for (unsigned k = 0; k < per_draw && i < out.size(); ++k, ++i) {
      out[i] = static_cast<Symbol>(bits & mask);
      bits >>= q;
    }
  }
}

}  // namespace platoon::gf
