#include "latsym/lattice.hpp"

#include <stdexcept>

namespace latsym {

LatticePatch::LatticePatch(int n_extent, int m_extent)
    : N(n_extent), M(m_extent) {
  if (N < 3 || M < 3)
    throw std::invalid_argument(
        "patch extents must be >= 3 so wrapped neighborhoods stay distinct");
}

SiteFunctionFamily SiteFunctionFamily::from_exprs(const std::vector<Expr>& es,
                                                  const LatticePatch& patch) {
  SiteFunctionFamily fam;
  for (const Expr& e : es)
    fam.fns.push_back([e, patch](Site s) {
      Site w = patch.wrap(s);
      return e.eval_site(w.n, w.m);
    });
  return fam;
}

double detfun(const SiteFunctionFamily& family,
              const std::vector<Site>& sites) {
  const size_t k = family.size();
  if (k != sites.size())
    throw std::invalid_argument("detfun: family size must equal site count");
  if (k < 1 || k > 8)
    throw std::invalid_argument("detfun: K must be between 1 and 8");
  std::vector<std::vector<double>> m(k, std::vector<double>(k));
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) m[i][j] = family.fns[i](sites[j]);
  return det_matrix<double>(std::move(m));
}

bool det_nonzero(double det, const std::vector<std::vector<double>>& rows) {
  // Hadamard bound: |det| <= prod of row norms, so the ratio is a
  // scale-free distance from singularity.
  double bound = 1;
  for (const auto& row : rows) {
    double n2 = 0;
    for (double x : row) n2 += x * x;
    bound *= std::max(std::sqrt(n2), 1e-300);
  }
  return std::fabs(det) > 1e-9 * bound;
}

}  // namespace latsym
