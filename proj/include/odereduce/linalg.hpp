#pragma once

// Exact linear algebra over Q.
//
// Rows are cleared to integers. A rank profile modulo a word-size prime picks
// a candidate set of independent rows; fraction-free Gauss-Jordan elimination
// on that subset gives the exact reduced form, which is then checked against
// every row. A row that fails the check joins the subset and the elimination
// is repeated, so an unlucky prime costs time, never correctness.

#include <odereduce/budget.hpp>
#include <odereduce/modp.hpp>
#include <odereduce/rational.hpp>

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

namespace odereduce {

class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rat& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Rat& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  static RatMatrix from_rows(const std::vector<std::vector<Rat>>& rows) {
    const std::size_t c = rows.empty() ? 0 : rows[0].size();
    RatMatrix m(rows.size(), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != c) throw std::invalid_argument("ragged matrix rows");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::vector<Rat> apply(const std::vector<Rat>& v) const {
    if (v.size() != cols_) throw std::invalid_argument("dimension mismatch");
    std::vector<Rat> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (entries_[i * cols_ + j] != 0 && v[j] != 0) out[i] += entries_[i * cols_ + j] * v[j];
    return out;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rat> entries_;
};

namespace detail {

using IntRow = std::vector<Int>;

inline IntRow integer_row(const RatMatrix& m, std::size_t i, std::size_t extra_cols = 0) {
  Int d = 1;
  for (std::size_t j = 0; j < m.cols(); ++j) d = lcm(d, m(i, j).get_den());
  IntRow r(m.cols() + extra_cols);
  Int g = 0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    r[j] = m(i, j).get_num() * (d / m(i, j).get_den());
    g = gcd(g, r[j]);
  }
  if (g > 1)
    for (std::size_t j = 0; j < m.cols(); ++j) mpz_divexact(r[j].get_mpz_t(), r[j].get_mpz_t(), g.get_mpz_t());
  return r;
}

// Indices of rows independent modulo p (greedy, in row order).
inline std::vector<std::size_t> independent_rows_modp(const std::vector<IntRow>& rows, std::size_t cols, modp::u64 p,
                                                      const Deadline& deadline) {
  std::vector<std::size_t> picked;
  std::vector<std::vector<modp::u64>> basis;
  std::vector<std::size_t> pivots;
  for (std::size_t i = 0; i < rows.size() && picked.size() < cols; ++i) {
    if ((i & 63) == 0) deadline.check();
    std::vector<modp::u64> v(cols);
    bool any = false;
    for (std::size_t j = 0; j < cols; ++j) {
      v[j] = modp::reduce(rows[i][j], p);
      any |= v[j] != 0;
    }
    if (!any) continue;
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const modp::u64 c = v[pivots[b]];
      if (c == 0) continue;
      for (std::size_t j = pivots[b]; j < cols; ++j)
        if (basis[b][j] != 0) v[j] = modp::sub(v[j], modp::mul(c, basis[b][j], p), p);
    }
    std::size_t piv = 0;
    while (piv < cols && v[piv] == 0) ++piv;
    if (piv == cols) continue;
    const modp::u64 inv = modp::inv(v[piv], p);
    for (std::size_t j = piv; j < cols; ++j) v[j] = modp::mul(v[j], inv, p);
    // keep the basis reduced at existing pivots so later rows reduce in one pass
    for (auto& b : basis) {
      const modp::u64 c = b[piv];
      if (c == 0) continue;
      for (std::size_t j = piv; j < cols; ++j)
        if (v[j] != 0) b[j] = modp::sub(b[j], modp::mul(c, v[j], p), p);
    }
    basis.push_back(std::move(v));
    pivots.push_back(piv);
    picked.push_back(i);
  }
  return picked;
}

// Fraction-free Gauss-Jordan form of a set of integer rows: every pivot entry
// equals the same determinant d and every other entry of a pivot column is 0.
struct Reduced {
  std::vector<IntRow> rows;  // one per pivot, in pivot order
  std::vector<std::size_t> pivot_cols;
  Int d = 1;
};

inline Reduced bareiss_jordan(std::vector<IntRow> a, std::size_t cols, const Deadline& deadline) {
  Reduced out;
  std::vector<bool> used(a.size(), false);
  std::vector<std::size_t> pivot_row;
  Int prev = 1;
  std::size_t col = 0;
  Int t;
  while (col < cols) {
    deadline.check();
    // leftmost column with a nonzero entry among unused rows
    std::size_t pr = a.size();
    for (; col < cols; ++col) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (used[i] || a[i][col] == 0) continue;
        if (pr == a.size() || mpz_cmpabs(a[i][col].get_mpz_t(), a[pr][col].get_mpz_t()) < 0) pr = i;
      }
      if (pr != a.size()) break;
    }
    if (col == cols) break;
    const Int piv = a[pr][col];
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == pr) continue;
      const Int f = a[i][col];
      for (std::size_t j = 0; j < cols; ++j) {
        if (j == col) continue;
        if (f == 0) {
          if (a[i][j] == 0) continue;
          mpz_mul(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), piv.get_mpz_t());
        } else {
          mpz_mul(t.get_mpz_t(), f.get_mpz_t(), a[pr][j].get_mpz_t());
          mpz_mul(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), piv.get_mpz_t());
          mpz_sub(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), t.get_mpz_t());
        }
        if (prev != 1) mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[i][col] = 0;
    }
    used[pr] = true;
    pivot_row.push_back(pr);
    out.pivot_cols.push_back(col);
    prev = piv;
    ++col;
  }
  // previously pivoted rows carry older determinants on their pivots; after
  // the sweep above every pivot entry equals the final determinant
  out.d = prev;
  for (std::size_t r : pivot_row) out.rows.push_back(std::move(a[r]));
  return out;
}

inline bool row_annihilates(const IntRow& row, const std::vector<Int>& v) {
  Int s = 0;
  for (std::size_t j = 0; j < v.size(); ++j)
    if (row[j] != 0 && v[j] != 0) mpz_addmul(s.get_mpz_t(), row[j].get_mpz_t(), v[j].get_mpz_t());
  return s == 0;
}

inline std::vector<Int> primitive_vector(std::vector<Int> v) {
  Int g = 0;
  for (const auto& c : v) g = gcd(g, c);
  if (g == 0) return v;
  const auto first = std::find_if(v.begin(), v.end(), [](const Int& c) { return c != 0; });
  if (*first < 0) g = -g;
  for (auto& c : v) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
  return v;
}

inline std::vector<std::vector<Int>> kernel_from_reduced(const Reduced& red, std::size_t cols) {
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : red.pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<Int>> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Int> v(cols);
    v[f] = red.d;
    for (std::size_t k = 0; k < red.rows.size(); ++k) v[red.pivot_cols[k]] = -red.rows[k][f];
    basis.push_back(primitive_vector(std::move(v)));
  }
  return basis;
}

}  // namespace detail

// Basis of the right nullspace. Each vector has integer entries with gcd 1
// and a positive first nonzero entry. The basis is the reduced one: one
// vector per non-pivot column.
inline std::vector<std::vector<Rat>> nullspace(const RatMatrix& m, const Deadline& deadline = Deadline()) {
  const std::size_t cols = m.cols();
  std::vector<detail::IntRow> rows;
  rows.reserve(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(detail::integer_row(m, i));

  std::vector<std::size_t> subset = detail::independent_rows_modp(rows, cols, modp::word_primes()[0], deadline);
  for (;;) {
    std::vector<detail::IntRow> sel;
    for (std::size_t i : subset) sel.push_back(rows[i]);
    const auto red = detail::bareiss_jordan(std::move(sel), cols, deadline);
    auto basis = detail::kernel_from_reduced(red, cols);
    std::optional<std::size_t> bad;
    for (std::size_t i = 0; i < rows.size() && !bad; ++i)
      for (const auto& v : basis)
        if (!detail::row_annihilates(rows[i], v)) {
          bad = i;
          break;
        }
    if (bad) {
      subset.insert(std::upper_bound(subset.begin(), subset.end(), *bad), *bad);
      continue;
    }
    std::vector<std::vector<Rat>> out;
    out.reserve(basis.size());
    for (auto& v : basis) out.emplace_back(v.begin(), v.end());
    return out;
  }
}

// A particular solution of m * s = rhs with free variables set to 0, or
// nullopt when the system is inconsistent.
inline std::optional<std::vector<Rat>> solve(const RatMatrix& m, const std::vector<Rat>& rhs,
                                             const Deadline& deadline = Deadline()) {
  if (rhs.size() != m.rows()) throw std::invalid_argument("solve: dimension mismatch");
  const std::size_t cols = m.cols();
  RatMatrix aug(m.rows(), cols + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) aug(i, j) = m(i, j);
    aug(i, cols) = rhs[i];
  }
  std::vector<detail::IntRow> rows;
  rows.reserve(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(detail::integer_row(aug, i));

  std::vector<std::size_t> subset = detail::independent_rows_modp(rows, cols + 1, modp::word_primes()[0], deadline);
  // The rank over Q is at least the rank mod p. Full column rank mod p plus a
  // pivot in the right-hand side column therefore proves inconsistency.
  if (subset.size() == cols + 1 && detail::independent_rows_modp(rows, cols, modp::word_primes()[0], deadline).size() == cols)
    return std::nullopt;
  for (;;) {
    std::vector<detail::IntRow> sel;
    for (std::size_t i : subset) sel.push_back(rows[i]);
    const auto red = detail::bareiss_jordan(std::move(sel), cols + 1, deadline);
    if (!red.pivot_cols.empty() && red.pivot_cols.back() == cols) return std::nullopt;
    // homogeneous form: d * x - rhs_column * 1 = 0 in the augmented variables
    std::vector<Int> v(cols + 1);
    v[cols] = -red.d;
    for (std::size_t k = 0; k < red.rows.size(); ++k) v[red.pivot_cols[k]] = red.rows[k][cols];
    std::optional<std::size_t> bad;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (!detail::row_annihilates(rows[i], v)) {
        bad = i;
        break;
      }
    if (bad) {
      subset.insert(std::upper_bound(subset.begin(), subset.end(), *bad), *bad);
      continue;
    }
    std::vector<Rat> s(cols);
    for (std::size_t j = 0; j < cols; ++j) {
      s[j] = Rat(v[j], red.d);
      s[j].canonicalize();
    }
    return s;
  }
}

}  // namespace odereduce
