/* geometry.hpp
 *
 * Schwarzschild background in Schwarzschild coordinates (c = G = hbar = 1,
 * lengths in units of M): lapse and tortoise maps, null geodesics between two
 * exterior radii (closed-form radial rays and impact-parameter shooting for
 * rays that sweep a given angle, possibly orbiting the hole), the static
 * proper distance, and static / radial-infall worldlines.
 *
 * mass == 0 is accepted everywhere and gives the flat-space limit.
 */
#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "bhsignal/numkit.hpp"

namespace bhsignal::geometry {

struct BlackHole {
  double mass = 1.0;  // M >= 0; M = 0 is Minkowski
};

struct SpacetimePoint {
  double t = 0, r = 0, theta = 0, phi = 0;
};

/* sqrt(1 - 2M/r); requires r > 2M. */
double lapse(const BlackHole& bh, double r);

/* r + 2M ln(r/M - 2), strictly increasing on r > 2M; r for M = 0. */
double tortoise(const BlackHole& bh, double r);

/* Inverse of tortoise (bracketed Newton, |residual| < 1e-13 M-ish scale). */
double tortoise_inverse(const BlackHole& bh, double rstar);

enum class OrbitClass { direct, secondary, tertiary, quaternary };

/* Swept angle for a class at angular separation gamma in [0, pi]. */
double sweep_angle(OrbitClass c, double gamma);

/* A null geodesic connecting two exterior radii. Affine normalization fixes
 * E such that dt/dlambda = E / f; path samples run from the emission point. */
struct NullRay {
  double energy = 1.0;      // E
  double angular_momentum = 0.0;  // L = b E
  OrbitClass orbit_class = OrbitClass::direct;
  double delta_t = 0.0;     // coordinate time of flight
  double delta_lambda = 0.0;
  std::vector<double> lambda, t, r, phi;  // sampled path
  std::vector<double> rdot;               // dr/dlambda, smooth through turning points

  /* Tangent d x^mu / d lambda at a sampled lambda (Hermite on samples). */
  void tangent(double lam, double& tdot, double& rdot, double& phidot,
               const BlackHole& bh) const;
};

/* Radial null geodesic r(lambda) = r_a -/+ lambda, closed form. */
NullRay radial_null(const BlackHole& bh, double r_a, double r_b);

/* Shoot over impact parameter until the ray from r_a reaches r_b having swept
 * the class angle. gamma in (0, pi); requests within caustic_band of a caustic
 * crossing (sweep near a nonzero multiple of pi) are refused. Throws
 * NumericalFailure when no connecting ray of the class exists. */
NullRay null_shoot(const BlackHole& bh, double r_a, double r_b, double gamma,
                   OrbitClass c, double caustic_band = 0.02);

/* Proper distance between static observers on a constant-t slice, radial
 * separation; symmetric, finite as either radius approaches 2M. */
double static_distance(const BlackHole& bh, double r_a, double r_b);

/* Worldline of a detector: static at fixed spatial point, or radial timelike
 * geodesic released from rest at r0. Proper time tau = 0 at coordinate time
 * clock_zero (static) or at the release event (infall). */
class Worldline {
 public:
  enum class Kind { fixed, radial_infall };

  static Worldline make_static(const BlackHole& bh, double r, double theta,
                               double phi, double clock_zero_t = 0.0);
  /* Release from rest at r0 at coordinate time t_release; tabulated down to
   * r_min (default slightly above the horizon). */
  static Worldline make_infall(const BlackHole& bh, double r0,
                               double t_release = 0.0, double r_min = -1.0);

  Kind kind() const { return kind_; }
  const BlackHole& hole() const { return bh_; }
  double radius_at(double tau) const;           // areal radius
  SpacetimePoint position(double tau) const;
  double t_of_tau(double tau) const;
  double tau_of_t(double t) const;
  /* u^alpha = (dt/dtau, dr/dtau, 0, 0). */
  void four_velocity(double tau, double& ut, double& ur) const;
  double lapse_at(double tau) const;            // d tau / d t at tau
  double conserved_energy() const { return energy_; }
  double tau_min() const;
  double tau_max() const;

  double theta0() const { return theta_; }
  double phi0() const { return phi_; }

 private:
  Kind kind_ = Kind::fixed;
  BlackHole bh_;
  double r0_ = 0, theta_ = 0, phi_ = 0;
  double clock_zero_ = 0;   // coordinate time at tau = 0
  double energy_ = 1.0;     // Etilde for infall
  // infall tables, monotone in tau
  std::vector<double> tau_, r_tab_, t_tab_;
};

/* Radial timelike geodesic from rest at r0 (thin wrapper kept for symmetry
 * with the other constructors). */
Worldline infall_worldline(const BlackHole& bh, double r0);

}  // namespace bhsignal::geometry
