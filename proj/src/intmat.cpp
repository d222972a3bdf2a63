#include "spatialalex/intmat.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace salex {

int int_rank(IntMat a) {
  if (a.empty()) return 0;
  const size_t rows = a.size(), cols = a[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[r], a[p]);
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      // Fraction-free: scale row i by the pivot, then subtract.
      Int piv = a[r][c], f = a[i][c];
      for (size_t j = 0; j < cols; ++j) a[i][j] = a[i][j] * piv - f * a[r][j];
    }
    ++r;
  }
  return static_cast<int>(r);
}

std::vector<Int> smith_invariants(IntMat a) {
  std::vector<Int> out;
  if (a.empty() || a[0].empty()) return out;
  size_t rows = a.size(), cols = a[0].size();
  size_t top = 0;
  while (top < rows && top < cols) {
    // Find a nonzero entry of minimal absolute value in the working block.
    size_t pi = rows, pj = cols;
    Int best = 0;
    for (size_t i = top; i < rows; ++i)
      for (size_t j = top; j < cols; ++j)
        if (a[i][j] != 0 && (best == 0 || abs(a[i][j]) < best)) {
          best = abs(a[i][j]);
          pi = i;
          pj = j;
        }
    if (pi == rows) break;  // block is zero
    std::swap(a[top], a[pi]);
    for (size_t i = 0; i < rows; ++i) std::swap(a[i][top], a[i][pj]);

    bool clean = true;
    for (size_t i = top + 1; i < rows; ++i)
      if (a[i][top] != 0) {
        Int q = a[i][top] / a[top][top];
        for (size_t j = top; j < cols; ++j) a[i][j] -= q * a[top][j];
        if (a[i][top] != 0) clean = false;
      }
    for (size_t j = top + 1; j < cols; ++j)
      if (a[top][j] != 0) {
        Int q = a[top][j] / a[top][top];
        for (size_t i = top; i < rows; ++i) a[i][j] -= q * a[i][top];
        if (a[top][j] != 0) clean = false;
      }
    if (!clean) continue;  // smaller remainder appeared, redo this block

    // Pivot must divide every remaining entry for the divisibility chain.
    bool divides_all = true;
    for (size_t i = top + 1; i < rows && divides_all; ++i)
      for (size_t j = top + 1; j < cols && divides_all; ++j)
        if (a[i][j] % a[top][top] != 0) {
          for (size_t jj = top; jj < cols; ++jj) a[top][jj] += a[i][jj];
          divides_all = false;
        }
    if (!divides_all) continue;
    out.push_back(abs(a[top][top]));
    ++top;
  }
  return out;
}

bool solve_in_rowspace(const IntMat& rows, const std::vector<Int>& target,
                       std::vector<Int>& coeffs) {
  coeffs.assign(rows.size(), 0);
  if (rows.empty()) {
    for (const Int& v : target)
      if (v != 0) return false;
    return true;
  }
  const size_t m = rows.size(), n = rows[0].size();
  // Work on [A | I] so the row operations accumulate the expression of each
  // reduced row in terms of the originals; then reduce the target against it.
  IntMat w(m, std::vector<Int>(n + m, 0));
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) w[i][j] = rows[i][j];
    w[i][n + i] = 1;
  }
  // Integer echelon form via repeated gcd steps per column.
  size_t r = 0;
  std::vector<size_t> pivot_col;
  for (size_t c = 0; c < n && r < m; ++c) {
    while (true) {
      size_t best = m;
      for (size_t i = r; i < m; ++i)
        if (w[i][c] != 0 && (best == m || abs(w[i][c]) < abs(w[best][c]))) best = i;
      if (best == m) break;
      std::swap(w[r], w[best]);
      bool done = true;
      for (size_t i = r + 1; i < m; ++i)
        if (w[i][c] != 0) {
          Int q = w[i][c] / w[r][c];
          for (size_t j = 0; j < n + m; ++j) w[i][j] -= q * w[r][j];
          if (w[i][c] != 0) done = false;
        }
      if (done) break;
    }
    if (w[r][c] != 0) {
      pivot_col.push_back(c);
      ++r;
    }
  }
  // Back-substitute the target.
  std::vector<Int> t = target;
  std::vector<Int> comb(m, 0);
  for (size_t i = 0; i < r; ++i) {
    size_t c = pivot_col[i];
    if (t[c] % w[i][c] != 0) return false;
    Int q = t[c] / w[i][c];
    if (q == 0) continue;
    for (size_t j = 0; j < n; ++j) t[j] -= q * w[i][j];
    for (size_t j = 0; j < m; ++j) comb[j] += q * w[i][n + j];
  }
  for (const Int& v : t)
    if (v != 0) return false;
  coeffs = comb;
  return true;
}

}  // namespace salex
