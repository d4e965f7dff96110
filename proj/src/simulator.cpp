#include "latsym/simulator.hpp"

#include <cmath>
#include <cstdio>

#include "latsym/rng.hpp"

namespace latsym {

namespace {

FContext site_ctx(const LatticePatch& patch, Site s, double t,
                  const std::vector<double>& u) {
  FContext c;
  c.patch = patch;
  c.s = s;
  c.t = t;
  std::array<Site, 7> nb = patch.neighbors(s);
  for (int j = 0; j < 7; ++j) c.u[j] = u[patch.index(nb[j])];
  return c;
}

void check_sane(const std::vector<double>& u, const LatticePatch& patch,
                double t) {
  for (int i = 0; i < patch.size(); ++i) {
    double x = u[i];
    if (!std::isfinite(x) || std::fabs(x) > 1e8)
      throw BlowupError("displacement left the safe range", t, patch.site(i));
  }
}

void accel(const ForceFn& force, const LatticePatch& patch, double t,
           const std::vector<double>& u, std::vector<double>& out) {
  for (int i = 0; i < patch.size(); ++i) {
    try {
      out[i] = force(site_ctx(patch, patch.site(i), t, u));
    } catch (const DomainError& e) {
      throw BlowupError(std::string("interaction left its domain: ") +
                            e.what(),
                        t, patch.site(i));
    }
  }
}

}  // namespace

ForceFn force_of(const CatalogEntry& entry) {
  InteractionFn F = entry.F;
  return [F](const FContext& c) { return F(c).v; };
}

LatticeState default_initial_state(const LatticePatch& patch, uint64_t seed,
                                   double t0) {
  Rng rng(seed);
  LatticeState st(patch, t0);
  for (int i = 0; i < patch.size(); ++i) {
    st.u[i] = 1.0 + 0.1 * rng.uniform(-1.0, 1.0);
    st.v[i] = 0.1 * rng.uniform(-1.0, 1.0);
  }
  return st;
}

Trajectory integrate(const ForceFn& force, const LatticeState& initial,
                     double t_end, double h) {
  if (h <= 0) throw std::invalid_argument("step must be positive");
  const LatticePatch patch = initial.patch;
  const int n = patch.size();
  Trajectory traj;
  traj.patch = patch;
  traj.h = h;
  int steps = (int)std::llround((t_end - initial.t) / h);
  if (steps < 0) throw std::invalid_argument("t_end before start time");
  LatticeState cur = initial;
  traj.states.push_back(cur);
  std::vector<double> ku1(n), ku2(n), ku3(n), ku4(n);
  std::vector<double> kv1(n), kv2(n), kv3(n), kv4(n);
  std::vector<double> tmpu(n), tmpv(n);
  for (int s = 0; s < steps; ++s) {
    double t = cur.t;
    check_sane(cur.u, patch, t);
    // k1
    ku1 = cur.v;
    accel(force, patch, t, cur.u, kv1);
    // k2
    for (int i = 0; i < n; ++i) {
      tmpu[i] = cur.u[i] + h / 2 * ku1[i];
      tmpv[i] = cur.v[i] + h / 2 * kv1[i];
    }
    ku2 = tmpv;
    accel(force, patch, t + h / 2, tmpu, kv2);
    // k3
    for (int i = 0; i < n; ++i) {
      tmpu[i] = cur.u[i] + h / 2 * ku2[i];
      tmpv[i] = cur.v[i] + h / 2 * kv2[i];
    }
    ku3 = tmpv;
    accel(force, patch, t + h / 2, tmpu, kv3);
    // k4
    for (int i = 0; i < n; ++i) {
      tmpu[i] = cur.u[i] + h * ku3[i];
      tmpv[i] = cur.v[i] + h * kv3[i];
    }
    ku4 = tmpv;
    accel(force, patch, t + h, tmpu, kv4);
    for (int i = 0; i < n; ++i) {
      cur.u[i] += h / 6 * (ku1[i] + 2 * ku2[i] + 2 * ku3[i] + ku4[i]);
      cur.v[i] += h / 6 * (kv1[i] + 2 * kv2[i] + 2 * kv3[i] + kv4[i]);
    }
    cur.t = initial.t + (s + 1) * h;
    check_sane(cur.u, patch, cur.t);
    traj.states.push_back(cur);
  }
  return traj;
}

Trajectory integrate(const CatalogEntry& entry, const LatticeState& initial,
                     double t_end, double h) {
  return integrate(force_of(entry), initial, t_end, h);
}

double trajectory_residual(const ForceFn& force, const Trajectory& traj) {
  if (traj.states.size() < 5)
    throw std::invalid_argument("trajectory needs at least 5 snapshots");
  const LatticePatch& patch = traj.patch;
  double worst = 0;
  for (size_t i = 1; i + 1 < traj.states.size(); ++i) {
    const LatticeState& prev = traj.states[i - 1];
    const LatticeState& mid = traj.states[i];
    const LatticeState& next = traj.states[i + 1];
    for (int k = 0; k < patch.size(); ++k) {
      double d2 = (prev.u[k] - 2 * mid.u[k] + next.u[k]) / (traj.h * traj.h);
      double f = force(site_ctx(patch, patch.site(k), mid.t, mid.u));
      worst = std::max(worst, std::fabs(d2 - f));
    }
  }
  return worst;
}

double trajectory_residual(const CatalogEntry& entry, const Trajectory& traj) {
  return trajectory_residual(force_of(entry), traj);
}

namespace {

// 4-point Lagrange interpolation on a (possibly non-uniform) grid
double lagrange4(const std::vector<double>& xs, const std::vector<double>& ys,
                 size_t lo, double x) {
  double acc = 0;
  for (size_t i = lo; i < lo + 4; ++i) {
    double w = ys[i];
    for (size_t j = lo; j < lo + 4; ++j) {
      if (i == j) continue;
      w *= (x - xs[j]) / (xs[i] - xs[j]);
    }
    acc += w;
  }
  return acc;
}

double interp_cubic(const std::vector<double>& xs,
                    const std::vector<double>& ys, double x) {
  size_t n = xs.size();
  size_t k = 0;
  while (k + 1 < n && xs[k + 1] < x) ++k;
  size_t lo = k >= 1 ? k - 1 : 0;
  if (lo + 4 > n) lo = n - 4;
  return lagrange4(xs, ys, lo, x);
}

}  // namespace

double orbit_check(const ForceFn& force, const SymmetryField& X,
                   const Trajectory& traj, double epsilon) {
  const LatticePatch& patch = traj.patch;
  const size_t K = traj.states.size();
  const int n = patch.size();
  std::vector<double> t_img(K);
  std::vector<std::vector<double>> u_img(n, std::vector<double>(K));
  for (size_t i = 0; i < K; ++i) {
    const LatticeState& st = traj.states[i];
    for (int k = 0; k < n; ++k) {
      FlowPoint p = flow(X, epsilon, patch.site(k), st.t, st.u[k]);
      if (k == 0)
        t_img[i] = p.t;
      else if (std::fabs(p.t - t_img[i]) > 1e-9)
        throw FlowError("flow produced inconsistent image times", epsilon);
      u_img[k][i] = p.u;
    }
  }
  // resample the image onto a uniform grid of the same length
  Trajectory out;
  out.patch = patch;
  out.method = traj.method + "+flow";
  double span = t_img.back() - t_img.front();
  if (span <= 0) throw FlowError("flow reversed the time direction", epsilon);
  out.h = span / (double)(K - 1);
  for (size_t i = 0; i < K; ++i) {
    LatticeState st(patch, t_img.front() + (double)i * out.h);
    for (int k = 0; k < n; ++k)
      st.u[k] = interp_cubic(t_img, u_img[k], st.t);
    out.states.push_back(std::move(st));
  }
  return trajectory_residual(force, out);
}

double orbit_check(const CatalogEntry& entry, const SymmetryField& X,
                   const Trajectory& traj, double epsilon) {
  return orbit_check(force_of(entry), X, traj, epsilon);
}

void write_csv(const Trajectory& traj, std::ostream& os) {
  os << "t,n,m,u,v\n";
  char buf[128];
  for (const LatticeState& st : traj.states)
    for (int m = 0; m < traj.patch.M; ++m)
      for (int n = 0; n < traj.patch.N; ++n) {
        int idx = traj.patch.index({n, m});
        std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g,%.17g\n", st.t, n, m,
                      st.u[idx], st.v[idx]);
        os << buf;
      }
}

}  // namespace latsym
