#include "bhsignal/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace bhsignal::geometry {

namespace {
double metric_f(const BlackHole& bh, double r) { return 1.0 - 2.0 * bh.mass / r; }

void require_exterior(const BlackHole& bh, double r, const char* who) {
  if (!(r > 2.0 * bh.mass) || !(r > 0.0))
    throw std::domain_error(std::string(who) + ": radius must satisfy r > 2M");
}
}  // namespace

double lapse(const BlackHole& bh, double r) {
  require_exterior(bh, r, "lapse");
  return std::sqrt(metric_f(bh, r));
}

double tortoise(const BlackHole& bh, double r) {
  require_exterior(bh, r, "tortoise");
  if (bh.mass == 0.0) return r;
  return r + 2.0 * bh.mass * std::log(r / bh.mass - 2.0);
}

double tortoise_inverse(const BlackHole& bh, double rstar) {
  const double M = bh.mass;
  if (M == 0.0) {
    if (!(rstar > 0)) throw std::domain_error("tortoise_inverse: rstar must be > 0 for M = 0");
    return rstar;
  }
  // Seed: near-horizon asymptotic for very negative rstar, else rstar itself.
  double r;
  if (rstar < 2.0 * M) {
    double eps = M * std::exp((rstar - 2.0 * M) / (2.0 * M));
    eps = std::max(eps, 1e-300);
    r = 2.0 * M + eps;
  } else {
    r = std::max(rstar, 2.2 * M);
  }
  for (int it = 0; it < 200; ++it) {
    const double g = r + 2.0 * M * std::log(r / M - 2.0) - rstar;
    const double dg = 1.0 / metric_f(bh, r);  // d rstar / d r = 1/f
    double step = g * metric_f(bh, r);
    // keep iterate outside the horizon
    if (r - step <= 2.0 * M) step = (r - 2.0 * M) * 0.5;
    r -= step;
    (void)dg;
    if (std::abs(g) < 1e-13 * std::max(1.0, std::abs(rstar)) && std::abs(step) < 1e-12 * r)
      return r;
  }
  const double res = r + 2.0 * M * std::log(r / M - 2.0) - rstar;
  if (std::abs(res) < 1e-9 * std::max(1.0, std::abs(rstar))) return r;
  throw NumericalFailure("tortoise_inverse: Newton iteration failed at rstar=" +
                         std::to_string(rstar));
}

double sweep_angle(OrbitClass c, double gamma) {
  switch (c) {
    case OrbitClass::direct: return gamma;
    case OrbitClass::secondary: return 2.0 * M_PI - gamma;
    case OrbitClass::tertiary: return 2.0 * M_PI + gamma;
    case OrbitClass::quaternary: return 4.0 * M_PI - gamma;
  }
  return gamma;
}

void NullRay::tangent(double lam, double& tdot, double& rdot, double& phidot,
                      const BlackHole& bh) const {
  if (lambda.size() < 2) throw std::domain_error("NullRay::tangent: no sampled path");
  auto it = std::upper_bound(lambda.begin(), lambda.end(), lam);
  std::size_t i = (it == lambda.begin()) ? 0 : (it - lambda.begin() - 1);
  if (i + 1 >= lambda.size()) i = lambda.size() - 2;
  const double h = lambda[i + 1] - lambda[i];
  const double w = (lam - lambda[i]) / h;
  const double rr = r[i] * (1 - w) + r[i + 1] * w;
  const double f = metric_f(bh, rr);
  tdot = energy / f;
  phidot = angular_momentum / (rr * rr);
  rdot = this->rdot[i] * (1 - w) + this->rdot[i + 1] * w;
}

NullRay radial_null(const BlackHole& bh, double r_a, double r_b) {
  require_exterior(bh, r_a, "radial_null");
  require_exterior(bh, r_b, "radial_null");
  if (r_a == r_b) throw std::domain_error("radial_null: coincident radii");
  NullRay ray;
  ray.energy = 1.0;
  ray.angular_momentum = 0.0;
  ray.orbit_class = OrbitClass::direct;
  ray.delta_lambda = std::abs(r_a - r_b);
  ray.delta_t = std::abs(tortoise(bh, r_a) - tortoise(bh, r_b));
  const int n = 256;
  const double sgn = (r_b > r_a) ? 1.0 : -1.0;
  const double rsa = tortoise(bh, r_a);
  ray.lambda.resize(n + 1);
  ray.t.resize(n + 1);
  ray.r.resize(n + 1);
  ray.phi.assign(n + 1, 0.0);
  ray.rdot.assign(n + 1, sgn);
  for (int i = 0; i <= n; ++i) {
    const double lam = ray.delta_lambda * i / n;
    const double rr = r_a + sgn * lam;
    ray.lambda[i] = lam;
    ray.r[i] = rr;
    ray.t[i] = std::abs(tortoise(bh, rr) - rsa);  // dt = +/- d rstar along the ray
  }
  return ray;
}

namespace {

/* Integrate the null orbit equation u'' = 3 M u^2 - u in phi with RK4 and
 * accumulate t and lambda; returns u(phi_end) or the full sampled ray. */
struct OrbitShot {
  double u_end = 0;
  bool hit_horizon = false;
  bool escaped = false;
};

OrbitShot shoot_orbit(const BlackHole& bh, double u0, double up0, double b,
                      double phi_end, int steps, NullRay* out) {
  const double M = bh.mass;
  double u = u0, up = up0;
  double t = 0, lam = 0;
  const double h = phi_end / steps;
  const double u_hor = (M > 0) ? 1.0 / (2.0 * M) : std::numeric_limits<double>::infinity();
  if (out) {
    out->lambda.clear(); out->t.clear(); out->r.clear(); out->phi.clear();
    out->rdot.clear();
    out->lambda.push_back(0); out->t.push_back(0);
    out->r.push_back(1 / u); out->phi.push_back(0);
    out->rdot.push_back(-b * up);  // dr/dlambda = -L du/dphi
  }
  auto acc = [&](double uu) { return 3.0 * M * uu * uu - uu; };
  OrbitShot res;
  for (int i = 0; i < steps; ++i) {
    // RK4 on (u, u'); quadratures for t, lambda use Simpson on r^2/b terms
    const double r1 = 1 / u;
    const double k1u = up, k1p = acc(u);
    const double u2 = u + 0.5 * h * k1u, p2 = up + 0.5 * h * k1p;
    const double k2u = p2, k2p = acc(u2);
    const double u3 = u + 0.5 * h * k2u, p3 = up + 0.5 * h * k2p;
    const double k3u = p3, k3p = acc(u3);
    const double u4 = u + h * k3u, p4 = up + h * k3p;
    const double k4u = p4, k4p = acc(u4);
    const double umid = u + 0.5 * h * k1u + 0.125 * h * h * k1p;  // midpoint estimate
    u += (h / 6) * (k1u + 2 * k2u + 2 * k3u + k4u);
    up += (h / 6) * (k1p + 2 * k2p + 2 * k3p + k4p);
    if (!(u > 0)) { res.escaped = true; break; }         // r -> infinity
    if (u >= u_hor) { res.hit_horizon = true; break; }   // crossed horizon
    const double r2 = 1 / u, rm = 1 / umid;
    // dlambda/dphi = r^2 / b ; dt/dphi = r^2 / (b f)
    auto fof = [&](double rr) { return 1.0 - 2.0 * M / rr; };
    lam += (h / 6) * (r1 * r1 + 4 * rm * rm + r2 * r2) / b;
    t += (h / 6) * (r1 * r1 / fof(r1) + 4 * rm * rm / fof(rm) + r2 * r2 / fof(r2)) / b;
    if (out) {
      out->lambda.push_back(lam);
      out->t.push_back(t);
      out->r.push_back(r2);
      out->phi.push_back(h * (i + 1));
      out->rdot.push_back(-b * up);
    }
  }
  res.u_end = u;
  if (out) { out->delta_lambda = lam; out->delta_t = t; }
  return res;
}

}  // namespace

NullRay null_shoot(const BlackHole& bh, double r_a, double r_b, double gamma,
                   OrbitClass c, double caustic_band) {
  require_exterior(bh, r_a, "null_shoot");
  require_exterior(bh, r_b, "null_shoot");
  if (!(gamma > 0.0) || !(gamma < M_PI))
    throw std::domain_error("null_shoot: gamma must lie in (0, pi)");
  const double sweep = sweep_angle(c, gamma);
  // refuse requests too close to a caustic crossing (sweep near k*pi, k >= 1)
  const double kpi = std::round(sweep / M_PI) * M_PI;
  if (kpi >= M_PI - 1e-12 && std::abs(sweep - kpi) < caustic_band)
    throw NumericalFailure("null_shoot: requested sweep lies in the caustic exclusion band");

  const double M = bh.mass;
  if (M == 0.0 && c != OrbitClass::direct)
    throw NumericalFailure("null_shoot: no orbiting rays in flat spacetime");
  const double u_a = 1.0 / r_a, u_b = 1.0 / r_b;
  const int steps = std::max(2000, static_cast<int>(sweep * 2000));

  // Residual u(sweep) - u_b as a function of impact parameter, shooting
  // ingoing (up0 > 0). Direct rays to larger radii instead start outgoing.
  auto residual = [&](double b, bool ingoing) {
    const double disc = 1.0 / (b * b) - u_a * u_a * (1.0 - 2.0 * M * u_a);
    if (disc < 0) return std::numeric_limits<double>::quiet_NaN();
    const double up0 = (ingoing ? 1.0 : -1.0) * std::sqrt(disc);
    const OrbitShot s = shoot_orbit(bh, u_a, up0, b, sweep, steps, nullptr);
    if (s.hit_horizon) return 1.0 + u_b;   // overshoot inward
    if (s.escaped) return -u_b;            // overshoot outward
    return s.u_end - u_b;
  };

  const double b_crit = (M > 0) ? 3.0 * std::sqrt(3.0) * M : 0.0;
  // b may not exceed the turning-point bound at the start radius
  const double b_max_start = r_a / std::sqrt(std::max(metric_f(bh, r_a), 1e-300));

  struct Candidate { double b; bool ingoing; };
  std::optional<Candidate> found;
  auto scan_bracket = [&](double blo, double bhi, bool ingoing) {
    if (found || !(bhi > blo)) return;
    const int ns = 160;
    double prev_b = blo, prev_r = residual(prev_b, ingoing);
    for (int i = 1; i <= ns && !found; ++i) {
      const double bb = blo + (bhi - blo) * i / ns;
      const double rr = residual(bb, ingoing);
      if (std::isfinite(prev_r) && std::isfinite(rr) && prev_r * rr <= 0.0 && prev_r != rr) {
        double lo = prev_b, hi = bb, flo = prev_r;
        for (int it = 0; it < 90; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = residual(mid, ingoing);
          if (!std::isfinite(fm)) break;
          if (flo * fm <= 0) hi = mid; else { lo = mid; flo = fm; }
        }
        const double bsol = 0.5 * (lo + hi);
        if (std::abs(residual(bsol, ingoing)) < 1e-6 * u_b)
          found = Candidate{bsol, ingoing};
      }
      prev_b = bb;
      prev_r = rr;
    }
  };

  if (M > 0) {
    // inside-the-barrier family (monotone infall past the photon sphere)
    scan_bracket(1e-6 * r_a, b_crit * (1 - 1e-9), true);
    // outside family with a periapsis turn
    scan_bracket(b_crit * (1 + 1e-9), b_max_start * (1 - 1e-12), true);
    if (!found && c == OrbitClass::direct)
      scan_bracket(1e-6 * r_a, b_max_start * (1 - 1e-12), false);
  } else {
    scan_bracket(1e-9 * r_a, b_max_start * (1 - 1e-12), true);
    if (!found) scan_bracket(1e-9 * r_a, b_max_start * (1 - 1e-12), false);
  }
  if (!found)
    throw NumericalFailure("null_shoot: no connecting ray of the requested class");

  NullRay ray;
  ray.orbit_class = c;
  ray.energy = 1.0;
  ray.angular_momentum = found->b;
  const double disc = 1.0 / (found->b * found->b) - u_a * u_a * (1.0 - 2.0 * M * u_a);
  const double up0 = (found->ingoing ? 1.0 : -1.0) * std::sqrt(std::max(disc, 0.0));
  shoot_orbit(bh, u_a, up0, found->b, sweep, steps, &ray);
  return ray;
}

double static_distance(const BlackHole& bh, double r_a, double r_b) {
  require_exterior(bh, r_a, "static_distance");
  require_exterior(bh, r_b, "static_distance");
  const double M = bh.mass;
  if (M == 0.0) return std::abs(r_a - r_b);
  auto part = [&](double r) { return r * std::sqrt(1.0 - 2.0 * M / r); };
  return std::abs(part(r_a) - part(r_b) +
                  M * std::log((part(r_a) - M + r_a) / (part(r_b) - M + r_b)));
}

Worldline Worldline::make_static(const BlackHole& bh, double r, double theta,
                                 double phi, double clock_zero_t) {
  require_exterior(bh, r, "Worldline::make_static");
  Worldline w;
  w.kind_ = Kind::fixed;
  w.bh_ = bh;
  w.r0_ = r;
  w.theta_ = theta;
  w.phi_ = phi;
  w.clock_zero_ = clock_zero_t;
  return w;
}

Worldline Worldline::make_infall(const BlackHole& bh, double r0,
                                 double t_release, double r_min) {
  require_exterior(bh, r0, "Worldline::make_infall");
  if (bh.mass == 0.0)
    throw std::domain_error("Worldline::make_infall: release from rest is static for M = 0");
  Worldline w;
  w.kind_ = Kind::radial_infall;
  w.bh_ = bh;
  w.r0_ = r0;
  w.theta_ = M_PI / 2;
  w.phi_ = 0;
  w.clock_zero_ = t_release;
  w.energy_ = std::sqrt(1.0 - 2.0 * bh.mass / r0);
  if (r_min <= 0) r_min = 2.0 * bh.mass * 1.001;
  if (!(r_min < r0)) throw std::domain_error("Worldline::make_infall: r_min must be < r0");

  // Integrate d tau and d t inward. In the variable s = sqrt(r0 - r) the
  // release-point sqrt singularity of dtau/dr is removable:
  //   |dr/dtau| = sqrt(2M (r0 - r) / (r r0))  =>  dtau/ds = 2 sqrt(r r0 / 2M).
  const double M = bh.mass;
  const double E = w.energy_;
  numkit::OdeRhs rhs = [M, E, r0](double s, std::span<const double>, std::span<double> dy) {
    const double r = r0 - s * s;
    const double f = 1.0 - 2.0 * M / r;
    const double g = 2.0 * std::sqrt(r * r0 / (2.0 * M));
    dy[0] = g;            // d tau / d s
    dy[1] = g * E / f;    // d t / d s
  };
  const double y0[2] = {0.0, 0.0};
  numkit::OdeSpec ospec;
  ospec.kind = numkit::OdeSpec::Step::fixed;
  const double s_end = std::sqrt(r0 - r_min);
  ospec.initial_step = s_end / 20000;
  ospec.tol = 1e-12;
  auto sol = numkit::ode_solve(rhs, y0, 0.0, s_end, ospec);

  const auto& nodes = sol.nodes();
  w.tau_.reserve(nodes.size());
  std::vector<double> y(2);
  for (double s : nodes) {
    sol.eval(s, y);
    w.tau_.push_back(y[0]);
    w.r_tab_.push_back(r0 - s * s);
    w.t_tab_.push_back(t_release + y[1]);
  }
  return w;
}

namespace {
double interp_monotone(const std::vector<double>& xs, const std::vector<double>& ys,
                       double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = (it == xs.begin()) ? 0 : (it - xs.begin() - 1);
  if (i + 1 >= xs.size()) i = xs.size() - 2;
  const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] * (1 - w) + ys[i + 1] * w;
}
}  // namespace

double Worldline::tau_min() const { return kind_ == Kind::fixed ? -1e300 : tau_.front(); }
double Worldline::tau_max() const { return kind_ == Kind::fixed ? 1e300 : tau_.back(); }

double Worldline::radius_at(double tau) const {
  if (kind_ == Kind::fixed) return r0_;
  if (tau < -1e-12 || tau > tau_.back() + 1e-12)
    throw std::domain_error("Worldline: tau outside tabulated infall range");
  if (tau <= 0) return r0_;
  // local quadratic near release is captured by the dense table
  return interp_monotone(tau_, r_tab_, tau);
}

double Worldline::t_of_tau(double tau) const {
  if (kind_ == Kind::fixed) return clock_zero_ + tau / lapse(bh_, r0_);
  if (tau <= 0) {
    // before release the worldline is static at r0 by convention
    return clock_zero_ + tau / lapse(bh_, r0_);
  }
  return interp_monotone(tau_, t_tab_, tau);
}

double Worldline::tau_of_t(double t) const {
  if (kind_ == Kind::fixed) return (t - clock_zero_) * lapse(bh_, r0_);
  if (t <= clock_zero_) return (t - clock_zero_) * lapse(bh_, r0_);
  return interp_monotone(t_tab_, tau_, t);
}

SpacetimePoint Worldline::position(double tau) const {
  return {t_of_tau(tau), radius_at(tau), theta_, phi_};
}

void Worldline::four_velocity(double tau, double& ut, double& ur) const {
  const double r = radius_at(tau);
  const double f = metric_f(bh_, r);
  if (kind_ == Kind::fixed || tau <= 0) {
    ut = 1.0 / std::sqrt(f);
    ur = 0.0;
    return;
  }
  ut = energy_ / f;
  ur = -std::sqrt(std::max(energy_ * energy_ - f, 0.0));
}

double Worldline::lapse_at(double tau) const {
  double ut, ur;
  four_velocity(tau, ut, ur);
  return 1.0 / ut;
}

Worldline infall_worldline(const BlackHole& bh, double r0) {
  return Worldline::make_infall(bh, r0);
}

}  // namespace bhsignal::geometry
