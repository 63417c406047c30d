#pragma once

#include <vector>

#include "grid.hpp"

namespace lcd {

// Subcritical double well psi(s) = a (s^2 - s*^2)^2; psi'(0) = 0 by construction.
struct PotentialSpec {
  bool enabled = false;
  double a = 0.0;
  double s_star = 0.5;
  double lambda = 0.0;  // generalized-frequency rate; default M sqrt(kappa) when enabled

  PotentialSpec() = default;
  PotentialSpec(bool enabled_, double a_, double s_star_, double kappa);

  // psi'(s) s <= M s^2 on [0,1]
  double bound_M() const { return 4.0 * a * (1.0 - s_star * s_star); }
  double psi(double s) const { double q = s*s - s_star*s_star; return a*q*q; }
  double dpsi(double s) const { return 4.0*a*s*(s*s - s_star*s_star); }
};

struct EnergyTrace {
  std::vector<double> energies;  // one value per completed sweep, plus the initial state
  double residual = 0.0;         // last relative per-sweep decrease
  int sweeps = 0;
};

// Sum over grid edges of the sign-minimized squared difference / h^2 * h^3,
// plus the potential term when enabled.
double discrete_energy(const LineField& f, const PotentialSpec& pot, int threads = 1);

// Projected two-color Gauss-Seidel: interior node <- project(mean of the six
// gauge-aligned neighbors), preceded by an explicit h^2/12 potential step when
// enabled. Stops when the relative energy decrease per sweep drops below tol.
// Throws "divergence" if a non-finite value appears.
EnergyTrace relax(LineField& f, const PotentialSpec& pot, int max_sweeps,
                  double tol, int threads = 1);

}  // namespace lcd
