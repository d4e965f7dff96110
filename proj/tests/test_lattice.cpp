#include <doctest.h>

#include "latsym/lattice.hpp"
#include "latsym/rng.hpp"
#include "test_util.hpp"

using namespace latsym;

namespace {

SiteFunctionFamily family_of(std::vector<SiteFn> fns) {
  SiteFunctionFamily f;
  f.fns = std::move(fns);
  return f;
}

}  // namespace

TEST_CASE("neighborhood structure") {
  CHECK(kNeighborhood[0] == Site{0, 0});
  // the six outer offsets are closed under negation
  for (int i = 1; i < 7; ++i) {
    Site neg{-kNeighborhood[i].n, -kNeighborhood[i].m};
    bool found = false;
    for (int j = 1; j < 7; ++j)
      if (kNeighborhood[j] == neg) found = true;
    CHECK(found);
  }
}

TEST_CASE("neighbors with and without wrap") {
  LatticePatch p5(5, 5);
  auto nb = p5.neighbors({2, 2});
  std::array<Site, 7> want5 = {Site{2, 2}, Site{3, 2}, Site{2, 3}, Site{1, 3},
                               Site{1, 2}, Site{2, 1}, Site{3, 1}};
  for (int i = 0; i < 7; ++i) CHECK(nb[i] == want5[i]);

  auto nb0 = p5.neighbors({0, 0});
  std::array<Site, 7> want0 = {Site{0, 0}, Site{1, 0}, Site{0, 1}, Site{4, 1},
                               Site{4, 0}, Site{0, 4}, Site{1, 4}};
  for (int i = 0; i < 7; ++i) CHECK(nb0[i] == want0[i]);

  LatticePatch p3(3, 3);
  auto nb3 = p3.neighbors({2, 2});
  std::array<Site, 7> want3 = {Site{2, 2}, Site{0, 2}, Site{2, 0}, Site{1, 0},
                               Site{1, 2}, Site{2, 1}, Site{0, 1}};
  for (int i = 0; i < 7; ++i) CHECK(nb3[i] == want3[i]);
}

TEST_CASE("wrapped neighborhoods have 7 distinct sites") {
  for (int N = 3; N <= 5; ++N)
    for (int M = 3; M <= 5; ++M) {
      LatticePatch p(N, M);
      auto nb = p.neighbors({0, 0});
      for (int i = 0; i < 7; ++i)
        for (int j = i + 1; j < 7; ++j) CHECK(!(nb[i] == nb[j]));
    }
}

TEST_CASE("negated offsets return to the center") {
  LatticePatch p(4, 3);
  Site s{1, 2};
  for (int i = 1; i < 7; ++i) {
    Site out = p.wrap({s.n + kNeighborhood[i].n, s.m + kNeighborhood[i].m});
    Site back = p.wrap({out.n - kNeighborhood[i].n, out.m - kNeighborhood[i].m});
    CHECK(back == p.wrap(s));
  }
}

TEST_CASE("patch extents below 3 are rejected") {
  CHECK_THROWS_AS(LatticePatch(2, 5), std::invalid_argument);
  CHECK_THROWS_AS(LatticePatch(5, 1), std::invalid_argument);
}

TEST_CASE("detfun examples") {
  auto f = [](Site s) { return 2.0 * s.n + 3.0 * s.m + 1.0; };
  // K=1: the bare value
  CHECK(detfun(family_of({f}), {{2, 1}}) == f({2, 1}));
  // K=2 with a constant second row: f_nm - f_{n+1,m}
  auto one = [](Site) { return 1.0; };
  CHECK(detfun(family_of({f, one}), {{2, 1}, {3, 1}}) ==
        f({2, 1}) - f({3, 1}));
  // K=3 cofactor example: det [[0,1,0],[0,0,1],[1,1,1]] = 1
  auto fn = [](Site s) { return (double)s.n; };
  auto fm = [](Site s) { return (double)s.m; };
  CHECK(detfun(family_of({fn, fm, one}), {{0, 0}, {1, 0}, {0, 1}}) == 1.0);
}

TEST_CASE("detfun matches the Laplace oracle exactly on integer families") {
  Rng rng(0xdead);
  for (int k = 1; k <= 5; ++k) {
    for (int rep = 0; rep < 40; ++rep) {
      std::vector<std::vector<double>> m(k, std::vector<double>(k));
      std::vector<SiteFn> fns;
      std::vector<Site> sites;
      for (int j = 0; j < k; ++j) sites.push_back({j, 0});
      for (int i = 0; i < k; ++i) {
        std::vector<double> row(k);
        for (int j = 0; j < k; ++j) row[j] = (double)(int)(rng.below(11)) - 5;
        m[i] = row;
        fns.push_back([row](Site s) { return row[s.n]; });
      }
      double got = detfun(family_of(fns), sites);
      double want = testutil::det_laplace(m);
      CHECK(got == want);
    }
  }
}

TEST_CASE("detfun is alternating and multilinear") {
  Rng rng(0xfeed);
  for (int rep = 0; rep < 20; ++rep) {
    int k = 2 + (int)rng.below(4);
    std::vector<std::vector<double>> rows(k, std::vector<double>(k));
    for (auto& r : rows)
      for (double& x : r) x = rng.uniform(-2.0, 2.0);
    std::vector<Site> sites;
    for (int j = 0; j < k; ++j) sites.push_back({j, 0});
    auto make = [&](const std::vector<std::vector<double>>& rs) {
      std::vector<SiteFn> fns;
      for (const auto& r : rs)
        fns.push_back([r](Site s) { return r[s.n]; });
      return family_of(fns);
    };
    double base = detfun(make(rows), sites);
    // swapping two family members negates
    auto swapped = rows;
    std::swap(swapped[0], swapped[1]);
    CHECK(detfun(make(swapped), sites) ==
          doctest::Approx(-base).epsilon(1e-12));
    // duplicating a member vanishes
    auto dup = rows;
    dup[1] = dup[0];
    CHECK(std::fabs(detfun(make(dup), sites)) < 1e-12);
    // multilinearity in the first row
    auto scaled = rows;
    for (double& x : scaled[0]) x *= 2.5;
    CHECK(detfun(make(scaled), sites) ==
          doctest::Approx(2.5 * base).epsilon(1e-12));
  }
}

TEST_CASE("detfun rejects mismatched sizes") {
  auto one = [](Site) { return 1.0; };
  CHECK_THROWS_AS(detfun(family_of({one}), {{0, 0}, {1, 0}}),
                  std::invalid_argument);
}

TEST_CASE("scale-aware nonzero test") {
  std::vector<std::vector<double>> rows = {{1e6, 0}, {0, 1e6}};
  CHECK(det_nonzero(1e12, rows));
  CHECK(!det_nonzero(1e-3, rows));  // tiny relative to (1e6)^2
  std::vector<std::vector<double>> unit = {{1, 0}, {0, 1}};
  CHECK(det_nonzero(1.0, unit));
  CHECK(!det_nonzero(1e-12, unit));
}
