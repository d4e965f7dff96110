#include <doctest.h>

#include <cmath>
#include <sstream>

#include "latsym/rng.hpp"
#include "latsym/simulator.hpp"

using namespace latsym;

namespace {

const LatticePatch kPatch(5, 5);

LatticeState constant_state(double u0, double v0, double t0 = 0) {
  LatticeState st(kPatch, t0);
  for (int i = 0; i < kPatch.size(); ++i) {
    st.u[i] = u0;
    st.v[i] = v0;
  }
  return st;
}

const ForceFn kZero = [](const FContext&) { return 0.0; };
const ForceFn kHarmonic = [](const FContext& c) { return -c.u[0]; };

}  // namespace

TEST_CASE("free motion is integrated exactly") {
  Trajectory tr = integrate(kZero, constant_state(1.0, 0.5), 1.0, 0.1);
  REQUIRE(tr.states.size() == 11);
  for (size_t i = 0; i < tr.states.size(); ++i) {
    double t = 0.1 * (double)i;
    CHECK(tr.states[i].u[0] == doctest::Approx(1.0 + 0.5 * t).epsilon(1e-14));
    CHECK(tr.states[i].v[7] == doctest::Approx(0.5).epsilon(1e-14));
  }
  CHECK(trajectory_residual(kZero, tr) < 1e-12);
}

TEST_CASE("harmonic stub matches cos t to fourth order") {
  Trajectory tr = integrate(kHarmonic, constant_state(1.0, 0.0), 1.0, 0.01);
  double got = tr.states.back().u[0];
  CHECK(std::fabs(got - std::cos(1.0)) < 1e-8);
  // central-difference residual floor is O(h^2)
  double res = trajectory_residual(kHarmonic, tr);
  CHECK(res < 1e-4);
  CHECK(res > 1e-7);
}

TEST_CASE("rk4 order: step halving shrinks the error by 12..20") {
  auto err_at = [&](double h) {
    Trajectory tr = integrate(kHarmonic, constant_state(1.0, 0.0), 1.0, h);
    return std::fabs(tr.states.back().u[0] - std::cos(1.0));
  };
  double ratio = err_at(0.02) / err_at(0.01);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("step halving on a catalog entry shows fourth order") {
  ClassId id = *ClassId::parse("A_2_4");
  CatalogEntry entry = build(id, default_freedata(id), kPatch);
  LatticeState init = default_initial_state(kPatch, 5, 0.0);
  auto end_state = [&](double h) {
    return integrate(entry, init, 0.5, h).states.back().u;
  };
  std::vector<double> ref = end_state(0.0025);  // fine reference
  auto err = [&](double h) {
    std::vector<double> u = end_state(h);
    double worst = 0;
    for (size_t i = 0; i < u.size(); ++i)
      worst = std::max(worst, std::fabs(u[i] - ref[i]));
    return worst;
  };
  double ratio = err(0.02) / err(0.01);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("energy of the harmonic stub is conserved to O(h^4)") {
  double h = 0.01;
  Trajectory tr = integrate(kHarmonic, constant_state(1.0, 0.0), 1.0, h);
  for (const LatticeState& st : tr.states) {
    double e = st.u[0] * st.u[0] + st.v[0] * st.v[0];
    CHECK(std::fabs(e - 1.0) < 10 * h * h * h * h);
  }
}

TEST_CASE("random snapshots have O(1) residual") {
  Trajectory tr = integrate(kZero, constant_state(1.0, 0.0), 0.05, 0.01);
  Rng rng(77);
  for (LatticeState& st : tr.states)
    for (double& u : st.u) u = rng.uniform(0.5, 2.0);
  CHECK(trajectory_residual(kZero, tr) > 1.0);
}

TEST_CASE("blow-up is reported with time and site") {
  // force that explodes: u'' = u^9 from u = 2 upward
  ForceFn boom = [](const FContext& c) {
    double u = c.u[0];
    return u * u * u * u * u * u * u * u * u;
  };
  try {
    integrate(boom, constant_state(2.0, 5.0), 40.0, 0.05);
    FAIL("expected BlowupError");
  } catch (const BlowupError& e) {
    CHECK(e.t > 0);
    CHECK(e.t < 40.0);
  }
}

TEST_CASE("time translation maps solutions to solutions") {
  ClassId id = *ClassId::parse("A_2_4");
  CatalogEntry entry = build(id, default_freedata(id), kPatch);
  LatticeState init = default_initial_state(kPatch, 11, 0.0);
  Trajectory tr = integrate(entry, init, 1.0, 0.005);
  double base = trajectory_residual(entry, tr);
  SymmetryField dt = SymmetryField::from_exprs(
      Expr::literal(1), Expr::literal(0), Expr::literal(0), "dt");
  // d_t is a symmetry of A_2_4 only when f has no explicit t; defaults don't
  double moved = orbit_check(entry, dt, tr, 0.1);
  CHECK(moved == doctest::Approx(base).epsilon(1e-6));
}

TEST_CASE("orbit check distinguishes symmetries from non-symmetries") {
  ClassId id = *ClassId::parse("NS_3_1");
  CatalogEntry entry = build(id, default_freedata(id), kPatch);
  LatticeState init = default_initial_state(kPatch, 3, 0.0);
  Trajectory tr = integrate(entry, init, 1.0, 0.005);
  double base = trajectory_residual(entry, tr);
  // scaling generator X2 maps the solution to a solution
  double good = orbit_check(entry, entry.generators[1], tr, 0.02);
  CHECK(good <= 5 * base);
  // a plain shift is not a symmetry here
  SymmetryField shift = SymmetryField::from_exprs(
      Expr::literal(0), Expr::literal(0), Expr::literal(1), "du");
  double bad = orbit_check(entry, shift, tr, 0.1);
  CHECK(bad > 50 * base);
}

TEST_CASE("csv export shape") {
  Trajectory tr = integrate(kZero, constant_state(1.0, 0.0), 0.02, 0.01);
  std::ostringstream os;
  write_csv(tr, os);
  std::string text = os.str();
  CHECK(text.rfind("t,n,m,u,v\n", 0) == 0);
  size_t lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  CHECK(lines == 1 + tr.states.size() * (size_t)kPatch.size());
}
