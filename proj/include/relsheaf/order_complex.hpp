#pragma once

#include <vector>

#include "relsheaf/finspace.hpp"
#include "relsheaf/rational.hpp"

namespace relsheaf {

// Brute-force simplicial cohomology of the order complex of a finite poset,
// with constant Q coefficients. This is the independent oracle used by the
// acceptance suite: it enumerates all chains of the poset as simplices and
// row-reduces the simplicial coboundary matrices with its own elimination,
// sharing nothing with the sheaf-theoretic pipeline.
namespace order_complex {

struct RawMatrix {
  int rows = 0, cols = 0;
  std::vector<Rational> a;
  Rational& at(int r, int c) { return a[size_t(r) * cols + c]; }
  const Rational& at(int r, int c) const { return a[size_t(r) * cols + c]; }
};

inline int row_reduce_rank(RawMatrix m) {
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int p = -1;
    for (int i = r; i < m.rows; ++i)
      if (m.at(i, c) != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != r)
      for (int j = 0; j < m.cols; ++j) std::swap(m.at(p, j), m.at(r, j));
    for (int i = r + 1; i < m.rows; ++i) {
      if (m.at(i, c) == 0) continue;
      Rational f = m.at(i, c) / m.at(r, c);
      for (int j = c; j < m.cols; ++j) m.at(i, j) -= f * m.at(r, j);
    }
    ++r;
  }
  return r;
}

// All strict chains x_0 < x_1 < ... < x_q, grouped by length.
inline std::vector<std::vector<std::vector<int>>> chains(const FinSpace& sp) {
  std::vector<std::vector<std::vector<int>>> by_len;
  std::vector<std::vector<int>> current;
  for (int x = 0; x < sp.size(); ++x) current.push_back({x});
  while (!current.empty()) {
    by_len.push_back(current);
    std::vector<std::vector<int>> next;
    for (const auto& ch : current)
      for (int y = 0; y < sp.size(); ++y)
        if (y != ch.back() && sp.leq(ch.back(), y)) {
          auto ext = ch;
          ext.push_back(y);
          next.push_back(std::move(ext));
        }
    current = std::move(next);
  }
  return by_len;
}

// H^q of the order complex for 0 <= q < len(dims), returned as dimensions.
inline std::vector<int> cohomology_dims(const FinSpace& sp, int up_to) {
  auto cs = chains(sp);
  auto count = [&](int q) { return q < int(cs.size()) ? int(cs[q].size()) : 0; };
  auto index_of = [&](int q, const std::vector<int>& simplex) {
    for (size_t i = 0; i < cs[q].size(); ++i)
      if (cs[q][i] == simplex) return int(i);
    return -1;
  };
  // Coboundary d^q: C^q -> C^{q+1}, (d c)(s) = sum_i (-1)^i c(s without i).
  auto coboundary = [&](int q) {
    RawMatrix m;
    m.rows = count(q + 1);
    m.cols = count(q);
    m.a.assign(size_t(m.rows) * m.cols, Rational(0));
    if (q + 1 >= int(cs.size())) return m;
    for (int r = 0; r < m.rows; ++r) {
      const auto& s = cs[q + 1][r];
      for (size_t i = 0; i < s.size(); ++i) {
        std::vector<int> face;
        for (size_t j = 0; j < s.size(); ++j)
          if (j != i) face.push_back(s[j]);
        int c = index_of(q, face);
        m.at(r, c) += (i % 2 == 0) ? 1 : -1;
      }
    }
    return m;
  };
  std::vector<int> dims;
  int prev_rank = 0;
  for (int q = 0; q <= up_to; ++q) {
    int n = count(q);
    int rank_q = row_reduce_rank(coboundary(q));
    dims.push_back(n - rank_q - prev_rank);
    prev_rank = rank_q;
  }
  return dims;
}

}  // namespace order_complex
}  // namespace relsheaf
