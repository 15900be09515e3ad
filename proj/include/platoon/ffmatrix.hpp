#pragma once

// Dense matrices over GF(2^q): batch rank by Gaussian elimination and an
// incrementally maintained row-echelon basis for span-membership tests.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "platoon/errors.hpp"
#include "platoon/gf2q.hpp"
#include "platoon/rng.hpp"

namespace platoon::linalg {

using gf::FieldContext;
using gf::FieldElement;
using gf::Symbol;

/// Row-major rows x cols matrix of field symbols.
class CoeffMatrix {
 public:
  CoeffMatrix(FieldContext ctx, std::size_t rows, std::size_t cols)
      : ctx_(std::move(ctx)), rows_(rows), cols_(cols), entries_(rows * cols, 0) {}

  static CoeffMatrix identity(FieldContext ctx, std::size_t n) {
    CoeffMatrix out(std::move(ctx), n, n);
    for (std::size_t i = 0; i < n; ++i) out.entries_[i * n + i] = 1;
    return out;
  }

  const FieldContext& context() const noexcept { return ctx_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  FieldElement at(std::size_t r, std::size_t c) const { return ctx_.element(entries_.at(r * cols_ + c)); }

  void set(std::size_t r, std::size_t c, const FieldElement& v) {
    if (!ctx_.owns(v)) throw UsageError("field context mismatch in CoeffMatrix::set");
    entries_.at(r * cols_ + c) = v.value();
  }

  void set_symbol(std::size_t r, std::size_t c, Symbol v) {
    if (v > ctx_.mask()) throw UsageError("symbol out of range for matrix field");
    entries_.at(r * cols_ + c) = v;
  }

  std::span<const Symbol> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }
  std::span<Symbol> row(std::size_t r) { return {entries_.data() + r * cols_, cols_}; }
  std::span<const Symbol> entries() const noexcept { return entries_; }

  friend bool operator==(const CoeffMatrix& a, const CoeffMatrix& b) {
    return a.ctx_ == b.ctx_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  FieldContext ctx_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Symbol> entries_;
};

/// Rank over GF(2^q) by in-place Gaussian elimination on a copy.
inline std::size_t rank(const CoeffMatrix& mat) {
  const FieldContext& ctx = mat.context();
  const std::size_t rows = mat.rows();
  const std::size_t cols = mat.cols();
  std::vector<Symbol> a(mat.entries().begin(), mat.entries().end());
  auto row = [&](std::size_t r) { return std::span<Symbol>(a.data() + r * cols, cols); };

  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p * cols + c] == 0) ++p;
    if (p == rows) continue;
    if (p != r) std::swap_ranges(row(p).begin(), row(p).end(), row(r).begin());
    ctx.scale(ctx.inv(a[r * cols + c]), row(r));
    for (std::size_t i = r + 1; i < rows; ++i) {
      const Symbol f = a[i * cols + c];
      if (f != 0) ctx.axpy(f, row(r).subspan(c), row(i).subspan(c));
    }
    ++r;
  }
  return r;
}

/// Row-echelon basis of the span of every row inserted so far. Each stored row
/// has a leading 1 at its pivot column and zeros to the left of it; pivot
/// columns are pairwise distinct.
class EchelonBasis {
 public:
  EchelonBasis(FieldContext ctx, std::size_t cols)
      : ctx_(std::move(ctx)), cols_(cols), row_of_pivot_(cols, -1), scratch_(cols) {}

  const FieldContext& context() const noexcept { return ctx_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t rank() const noexcept { return pivots_.size(); }
  bool full() const noexcept { return rank() == cols_; }
  std::uint64_t inserted() const noexcept { return inserted_; }

  std::span<const Symbol> basis_row(std::size_t i) const { return {rows_.data() + i * cols_, cols_}; }
  std::size_t pivot(std::size_t i) const { return pivots_.at(i); }

  /// Adds row to the basis if it lies outside the current span. Returns whether
  /// the rank increased.
  bool insert(std::span<const Symbol> row) {
    check_length(row.size());
    ++inserted_;
    if (full()) return false;
    std::copy(row.begin(), row.end(), scratch_.begin());
    const std::size_t lead = reduce(scratch_);
    if (lead == cols_) return false;
    ctx_.scale(ctx_.inv(scratch_[lead]), std::span<Symbol>(scratch_).subspan(lead));
    row_of_pivot_[lead] = static_cast<std::int32_t>(pivots_.size());
    pivots_.push_back(lead);
    rows_.insert(rows_.end(), scratch_.begin(), scratch_.end());
    return true;
  }

  bool insert(std::span<const FieldElement> row) { return insert(to_symbols(row)); }

  /// Span membership without modifying the basis.
  bool contains(std::span<const Symbol> row) const {
    check_length(row.size());
    std::vector<Symbol> tmp(row.begin(), row.end());
    return reduce(tmp) == cols_;
  }

  bool contains(std::span<const FieldElement> row) const { return contains(to_symbols(row)); }

 private:
  void check_length(std::size_t n) const {
    if (n != cols_) {
      throw UsageError("row length " + std::to_string(n) + " does not match basis width " +
                       std::to_string(cols_));
    }
  }

  std::vector<Symbol> to_symbols(std::span<const FieldElement> row) const {
    std::vector<Symbol> out;
    out.reserve(row.size());
    for (const FieldElement& e : row) {
      if (!ctx_.owns(e)) throw UsageError("field context mismatch in EchelonBasis");
      out.push_back(e.value());
    }
    return out;
  }

  // Eliminates pivot columns left to right. Returns the first nonzero column
  // without a pivot, or cols_ when the row reduced to zero (i.e. is in the span).
  std::size_t reduce(std::span<Symbol> row) const {
    for (std::size_t c = 0; c < cols_; ++c) {
      const Symbol f = row[c];
      if (f == 0) continue;
      const std::int32_t r = row_of_pivot_[c];
      if (r < 0) return c;
      ctx_.axpy(f, basis_row(static_cast<std::size_t>(r)).subspan(c), row.subspan(c));
    }
    return cols_;
  }

  FieldContext ctx_;
  std::size_t cols_;
  std::vector<Symbol> rows_;  // rank() rows of cols_ symbols, insertion order
  std::vector<std::size_t> pivots_;
  std::vector<std::int32_t> row_of_pivot_;
  std::vector<Symbol> scratch_;
  std::uint64_t inserted_ = 0;
};

/// Matrix with i.i.d. uniform entries.
inline CoeffMatrix random_matrix(SeededRng& rng, const FieldContext& ctx, std::size_t rows, std::size_t cols) {
  if (rows < 1 || cols < 1) throw UsageError("random_matrix needs rows, cols >= 1");
  CoeffMatrix out(ctx, rows, cols);
  for (std::size_t r = 0; r < rows; ++r) gf::fill_random(rng, ctx, out.row(r));
  return out;
}

}  // namespace platoon::linalg
