#pragma once

#include <ostream>

#include "latsym/verifier.hpp"

namespace latsym {

struct BlowupError : std::runtime_error {
  double t;
  Site site;
  BlowupError(const std::string& msg, double time, Site s)
      : std::runtime_error(msg), t(time), site(s) {}
};

/// Uniform-step snapshots of one integration run.
struct Trajectory {
  LatticePatch patch;
  double h = 0;
  std::vector<LatticeState> states;  // times t0 + i h
  std::string method = "rk4";
};

/// Value-only interaction callback for integration (exact partials are not
/// needed along a trajectory).
using ForceFn = std::function<double(const FContext&)>;

ForceFn force_of(const CatalogEntry& entry);

/// u = 1 + 0.1 rho(site), v = 0.1 rho'(site) with seeded rho in [-1,1];
/// keeps displacements positive for the power-law interactions.
LatticeState default_initial_state(const LatticePatch& patch, uint64_t seed,
                                   double t0);

/// Classical fixed-step RK4 on udot = v, vdot = F(t, u on Gamma).
/// Halts with BlowupError when any displacement leaves (1e-8, 1e8) or
/// stops being finite.
Trajectory integrate(const ForceFn& force, const LatticeState& initial,
                     double t_end, double h);
Trajectory integrate(const CatalogEntry& entry, const LatticeState& initial,
                     double t_end, double h);

/// max over interior times and sites of |second central difference - F|;
/// O(h^2) for true solutions, which dominates the integrator's O(h^4).
double trajectory_residual(const ForceFn& force, const Trajectory& traj);
double trajectory_residual(const CatalogEntry& entry, const Trajectory& traj);

/// Pushes every trajectory sample through the flow of X at parameter
/// epsilon, resamples the image onto a uniform grid by cubic interpolation,
/// and returns its trajectory_residual: small iff the image is again a
/// solution.
double orbit_check(const ForceFn& force, const SymmetryField& X,
                   const Trajectory& traj, double epsilon);
double orbit_check(const CatalogEntry& entry, const SymmetryField& X,
                   const Trajectory& traj, double epsilon);

/// CSV export: header "t,n,m,u,v", rows ordered by time then m then n.
void write_csv(const Trajectory& traj, std::ostream& os);

}  // namespace latsym
