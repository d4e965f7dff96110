#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "latsym/expr.hpp"

namespace latsym {

/// Skew coordinates of a lattice vertex.
struct Site {
  int n = 0;
  int m = 0;
  friend bool operator==(const Site& a, const Site& b) {
    return a.n == b.n && a.m == b.m;
  }
};

/// The point (n,m) and its six nearest neighbors, in the fixed order used
/// everywhere in this library (index 0 is the center).
inline constexpr std::array<Site, 7> kNeighborhood = {
    Site{0, 0}, Site{1, 0},  Site{0, 1}, Site{-1, 1},
    Site{-1, 0}, Site{0, -1}, Site{1, -1}};

/// Finite window with periodic wrap on both skew axes.  Extents must be at
/// least 3 so the wrapped neighborhood of any site has 7 distinct sites.
struct LatticePatch {
  int N = 5;
  int M = 5;

  LatticePatch() = default;
  LatticePatch(int n_extent, int m_extent);

  int size() const { return N * M; }
  Site wrap(Site s) const {
    int n = s.n % N, m = s.m % M;
    if (n < 0) n += N;
    if (m < 0) m += M;
    return {n, m};
  }
  int index(Site s) const {
    Site w = wrap(s);
    return w.n + N * w.m;
  }
  Site site(int idx) const { return {idx % N, idx / N}; }

  std::array<Site, 7> neighbors(Site s) const {
    std::array<Site, 7> out;
    for (int i = 0; i < 7; ++i)
      out[i] = wrap({s.n + kNeighborhood[i].n, s.m + kNeighborhood[i].m});
    return out;
  }
};

/// Displacements and velocities on every site of a patch at one instant.
struct LatticeState {
  double t = 0;
  LatticePatch patch;
  std::vector<double> u;  // indexed by patch.index
  std::vector<double> v;

  explicit LatticeState(const LatticePatch& p, double time = 0)
      : t(time), patch(p), u(p.size(), 0.0), v(p.size(), 0.0) {}
  double& u_at(Site s) { return u[patch.index(s)]; }
  double& v_at(Site s) { return v[patch.index(s)]; }
  double u_at(Site s) const { return u[patch.index(s)]; }
  double v_at(Site s) const { return v[patch.index(s)]; }
};

using SiteFn = std::function<double(Site)>;

/// Ordered family of site functions, the rows of the determinant function.
struct SiteFunctionFamily {
  std::vector<SiteFn> fns;

  static SiteFunctionFamily from_exprs(const std::vector<Expr>& es,
                                       const LatticePatch& patch);
  size_t size() const { return fns.size(); }
};

/// Determinant of the K x K matrix with entry (i,j) = family[i](sites[j]).
/// Cofactor expansion for K <= 3, LU with partial pivoting above.
double detfun(const SiteFunctionFamily& family, const std::vector<Site>& sites);

/// Determinant of a dense K x K matrix of any scalar: cofactor expansion up
/// to K = 5 (exact on integer entries), LU with value()-based partial
/// pivoting above.
template <class S>
S det_cofactor(const std::vector<std::vector<S>>& a, std::vector<int> cols) {
  const size_t k = cols.size();
  const size_t row = a.size() - k;
  if (k == 1) return a[row][cols[0]];
  if (k == 2)
    return a[row][cols[0]] * a[row + 1][cols[1]] -
           a[row][cols[1]] * a[row + 1][cols[0]];
  S acc = a[row][cols[0]] - a[row][cols[0]];  // zero of type S
  for (size_t j = 0; j < k; ++j) {
    std::vector<int> sub;
    for (size_t i = 0; i < k; ++i)
      if (i != j) sub.push_back(cols[i]);
    S term = a[row][cols[j]] * det_cofactor(a, sub);
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

template <class S>
S det_matrix(std::vector<std::vector<S>> a) {
  using Ops = ScalarOps<S>;
  const int k = (int)a.size();
  if (k <= 5) {
    std::vector<int> cols(k);
    for (int i = 0; i < k; ++i) cols[i] = i;
    return det_cofactor(a, cols);
  }
  double sign = 1;
  S det = a[0][0];  // replaced after pivoting below
  for (int col = 0; col < k; ++col) {
    int piv = col;
    double best = std::fabs(Ops::value(a[col][col]));
    for (int r = col + 1; r < k; ++r) {
      double cand = std::fabs(Ops::value(a[r][col]));
      if (cand > best) {
        best = cand;
        piv = r;
      }
    }
    if (best == 0) throw DomainError("singular matrix in determinant");
    if (piv != col) {
      std::swap(a[piv], a[col]);
      sign = -sign;
    }
    det = col == 0 ? a[0][0] : det * a[col][col];
    for (int r = col + 1; r < k; ++r) {
      S factor = a[r][col] / a[col][col];
      for (int c = col; c < k; ++c) a[r][c] = a[r][c] - factor * a[col][c];
    }
  }
  return sign * det;
}

/// Scale-aware nonzero test for determinants: |d| > 1e-9 * (max row norm)^K.
bool det_nonzero(double det, const std::vector<std::vector<double>>& rows);

}  // namespace latsym
