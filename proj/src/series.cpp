#include "bhsignal/series.hpp"

#include <cmath>
#include <stdexcept>

namespace bhsignal::hadamard {

Poly3::Poly3(int max_degree) : d_(max_degree) {
  na_ = d_ / 2;
  nb_ = d_ / 2;
  nc_ = d_;
  c_.assign(static_cast<std::size_t>(na_ + 1) * (nb_ + 1) * (nc_ + 1), 0.0);
}

double Poly3::at(int a, int b, int c) const {
  if (a < 0 || b < 0 || c < 0 || a > na_ || b > nb_ || c > nc_ ||
      2 * a + 2 * b + c > d_)
    return 0.0;
  return c_[idx(a, b, c)];
}

void Poly3::set(int a, int b, int c, double v) {
  if (2 * a + 2 * b + c > d_) return;
  c_[idx(a, b, c)] = v;
}

void Poly3::add(int a, int b, int c, double v) {
  if (2 * a + 2 * b + c > d_) return;
  c_[idx(a, b, c)] += v;
}

Poly3& Poly3::operator+=(const Poly3& o) {
  o.for_each([&](int a, int b, int c, double v) { add(a, b, c, v); });
  return *this;
}
Poly3& Poly3::operator-=(const Poly3& o) {
  o.for_each([&](int a, int b, int c, double v) { add(a, b, c, -v); });
  return *this;
}
Poly3& Poly3::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Poly3 Poly3::mul(const Poly3& x, const Poly3& y) {
  Poly3 out(std::min(x.d_, y.d_));
  x.for_each([&](int a1, int b1, int c1, double v1) {
    const int deg1 = 2 * a1 + 2 * b1 + c1;
    y.for_each([&](int a2, int b2, int c2, double v2) {
      if (deg1 + 2 * a2 + 2 * b2 + c2 <= out.d_)
        out.add(a1 + a2, b1 + b2, c1 + c2, v1 * v2);
    });
  });
  return out;
}

Poly3 Poly3::dT() const {
  Poly3 out(d_);
  for_each([&](int a, int b, int c, double v) {
    if (a >= 1) out.add(a - 1, b, c, a * v);
  });
  return out;
}
Poly3 Poly3::dY() const {
  Poly3 out(d_);
  for_each([&](int a, int b, int c, double v) {
    if (b >= 1) out.add(a, b - 1, c, b * v);
  });
  return out;
}
Poly3 Poly3::dR() const {
  Poly3 out(d_);
  for_each([&](int a, int b, int c, double v) {
    if (c >= 1) out.add(a, b, c - 1, c * v);
  });
  return out;
}

Poly3 Poly3::shifted(int da, int db, int dc) const {
  Poly3 out(d_);
  for_each([&](int a, int b, int c, double v) { out.add(a + da, b + db, c + dc, v); });
  return out;
}

Poly3 Poly3::degree_part(int n) const {
  Poly3 out(d_);
  for_each([&](int a, int b, int c, double v) {
    if (2 * a + 2 * b + c == n) out.set(a, b, c, v);
  });
  return out;
}

double Poly3::max_abs() const {
  double m = 0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

double Poly3::max_abs_in_degree(int n) const {
  double m = 0;
  for_each([&](int a, int b, int c, double v) {
    if (2 * a + 2 * b + c == n) m = std::max(m, std::abs(v));
  });
  return m;
}

double Poly3::eval(double T, double y, double rho) const {
  double sum = 0;
  for (int a = na_; a >= 0; --a) {
    double sa = 0;
    for (int b = nb_; b >= 0; --b) {
      double sb = 0;
      for (int c = nc_; c >= 0; --c) {
        if (2 * a + 2 * b + c > d_) continue;
        sb = sb * rho + c_[idx(a, b, c)];
      }
      sa = sa * y + sb;
    }
    sum = sum * T + sa;
  }
  return sum;
}

namespace {

Poly3 lift_rho(const std::vector<double>& s, int maxdeg) {
  Poly3 p(maxdeg);
  for (std::size_t k = 0; k < s.size() && static_cast<int>(k) <= maxdeg; ++k)
    p.set(0, 0, static_cast<int>(k), s[k]);
  return p;
}

std::vector<double> series_inverse(const std::vector<double>& a) {
  std::vector<double> b(a.size(), 0.0);
  b[0] = 1.0 / a[0];
  for (std::size_t n = 1; n < a.size(); ++n) {
    double acc = 0;
    for (std::size_t j = 1; j <= n; ++j) acc += a[j] * b[n - j];
    b[n] = -acc / a[0];
  }
  return b;
}

struct Metric {
  Poly3 f, inv_f, c1, inv_r2, ang_grad;
  Metric(int D) : f(D), inv_f(D), c1(D), inv_r2(D), ang_grad(D) {}
};

Metric build_metric(double M, double r0, int D) {
  Metric m(D);
  const int n = D + 1;
  std::vector<double> inv_r(n), f(n);
  for (int k = 0; k < n; ++k) inv_r[k] = ((k % 2) ? -1.0 : 1.0) / std::pow(r0, k + 1);
  for (int k = 0; k < n; ++k) f[k] = (k == 0 ? 1.0 : 0.0) - 2.0 * M * inv_r[k];
  const std::vector<double> invf = series_inverse(f);
  std::vector<double> inv_r2(n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j <= k; ++j) inv_r2[k] += inv_r[j] * inv_r[k - j];
  std::vector<double> c1(n, 0.0);  // 2 f / r + f', with f' = 2M/r^2
  for (int k = 0; k < n; ++k) {
    double f_over_r = 0;
    for (int j = 0; j <= k; ++j) f_over_r += f[j] * inv_r[k - j];
    c1[k] = 2.0 * f_over_r + 2.0 * M * inv_r2[k];
  }
  m.f = lift_rho(f, D);
  m.inv_f = lift_rho(invf, D);
  m.inv_r2 = lift_rho(inv_r2, D);
  m.c1 = lift_rho(c1, D);
  Poly3 two_y_minus_y2(D);
  two_y_minus_y2.set(0, 1, 0, 2.0);
  two_y_minus_y2.set(0, 2, 0, -1.0);
  m.ang_grad = Poly3::mul(two_y_minus_y2, m.inv_r2);
  return m;
}

/* grad(u).grad(v) = -(1/f) u_t v_t + f u_rho v_rho + (2y-y^2)/r^2 u_y v_y,
 * where u_t v_t = 4 T u_T v_T for objects even in t - t'. */
Poly3 grad_dot(const Metric& m, const Poly3& u, const Poly3& v) {
  Poly3 tt = Poly3::mul(u.dT(), v.dT()).shifted(1, 0, 0);
  tt *= -4.0;
  Poly3 out = Poly3::mul(tt, m.inv_f);
  out += Poly3::mul(Poly3::mul(u.dR(), v.dR()), m.f);
  out += Poly3::mul(Poly3::mul(u.dY(), v.dY()), m.ang_grad);
  return out;
}

/* box h = -(1/f)(2 h_T + 4 T h_TT) + f h_rr + (2f/r + f') h_r
 *         + (1/r^2)[(2-2y) h_y + (2y-y^2) h_yy]. */
Poly3 box(const Metric& m, const Poly3& h) {
  const Poly3 hT = h.dT();
  Poly3 tpart = hT.dT().shifted(1, 0, 0);
  tpart *= 4.0;
  Poly3 two_hT = hT;
  two_hT *= 2.0;
  tpart += two_hT;
  tpart *= -1.0;
  Poly3 out = Poly3::mul(tpart, m.inv_f);
  const Poly3 hR = h.dR();
  out += Poly3::mul(hR.dR(), m.f);
  out += Poly3::mul(hR, m.c1);
  const Poly3 hY = h.dY();
  const Poly3 hYY = hY.dY();
  Poly3 ang = hY;
  ang *= 2.0;
  Poly3 t2 = hY.shifted(0, 1, 0);
  t2 *= -2.0;
  ang += t2;
  Poly3 t3 = hYY.shifted(0, 1, 0);
  t3 *= 2.0;
  ang += t3;
  Poly3 t4 = hYY.shifted(0, 2, 0);
  t4 *= -1.0;
  ang += t4;
  out += Poly3::mul(ang, m.inv_r2);
  return out;
}

}  // namespace

HadamardSeries build_hadamard_series(double mass, double base_r, int max_degree) {
  if (!(base_r > 2.0 * mass) || !(base_r > 0.0) || max_degree < 4)
    throw std::domain_error("build_hadamard_series: need r > 2M and max_degree >= 4");
  const int D = max_degree;
  const double f0 = 1.0 - 2.0 * mass / base_r;
  const Metric m = build_metric(mass, base_r, D);

  HadamardSeries out;
  out.mass = mass;
  out.base_r = base_r;
  out.max_degree = D;

  // world function: seed with the exact quadratic, then match the eikonal
  // identity degree by degree; the correction at degree n enters linearly
  // with factor 2n - 2.
  Poly3 sigma(D);
  sigma.set(1, 0, 0, -f0 / 2.0);
  sigma.set(0, 0, 2, 1.0 / (2.0 * f0));
  sigma.set(0, 1, 0, base_r * base_r);
  {
    // maintain resid = grad.grad - 2 sigma incrementally; a degree-n
    // correction delta changes it by 2 B(sigma,delta) + B(delta,delta) - 2 delta
    Poly3 resid = grad_dot(m, sigma, sigma);
    Poly3 two_sigma = sigma;
    two_sigma *= 2.0;
    resid -= two_sigma;
    for (int n = 3; n <= D; ++n) {
      Poly3 delta = resid.degree_part(n);
      delta *= -1.0 / (2.0 * n - 2.0);
      Poly3 upd = grad_dot(m, sigma, delta);
      upd *= 2.0;
      upd += grad_dot(m, delta, delta);
      Poly3 md = delta;
      md *= -2.0;
      upd += md;
      resid += upd;
      sigma += delta;
    }
  }
  out.sigma = sigma;

  const Poly3 box_sigma = box(m, sigma);

  // van Vleck square root: 2 sigma^a U_,a + (box sigma - 4) U = 0, U0 = 1.
  Poly3 u(D);
  u.set(0, 0, 0, 1.0);
  {
    Poly3 bs = box_sigma;
    bs.add(0, 0, 0, -4.0);
    Poly3 resid = grad_dot(m, sigma, u);
    resid *= 2.0;
    resid += Poly3::mul(bs, u);
    for (int n = 1; n <= D; ++n) {
      Poly3 delta = resid.degree_part(n);
      delta *= -1.0 / (2.0 * n);
      Poly3 upd = grad_dot(m, sigma, delta);
      upd *= 2.0;
      upd += Poly3::mul(bs, delta);
      resid += upd;
      u += delta;
    }
  }
  out.vanvleck = u;

  // tail hierarchy: 2 sigma^a V_k,a + (box sigma + 2(k-1)) V_k = rhs_k with
  // rhs_0 = -box U and rhs_k = -(1/k) box V_{k-1}; degree-n corrections carry
  // factor 2n + 2k + 2.
  const int kmax = D / 2;
  std::vector<Poly3> vk;
  vk.reserve(kmax + 1);
  Poly3 rhs = box(m, u);
  rhs *= -1.0;
  for (int k = 0; k <= kmax; ++k) {
    Poly3 v(D);
    Poly3 bs = box_sigma;
    bs.add(0, 0, 0, 2.0 * (k - 1));
    Poly3 resid = rhs;
    resid *= -1.0;
    for (int n = 0; n <= D - 2 * k; ++n) {
      Poly3 delta = resid.degree_part(n);
      delta *= -1.0 / (2.0 * n + 2.0 * k + 2.0);
      Poly3 upd = grad_dot(m, sigma, delta);
      upd *= 2.0;
      upd += Poly3::mul(bs, delta);
      resid += upd;
      v += delta;
    }
    vk.push_back(v);
    if (k < kmax) {
      rhs = box(m, v);
      rhs *= -1.0 / (k + 1);
    }
  }

  Poly3 v_total = vk[kmax];
  for (int k = kmax - 1; k >= 0; --k) {
    v_total = Poly3::mul(v_total, sigma);
    v_total += vk[k];
  }
  out.tail = v_total;
  return out;
}

}  // namespace bhsignal::hadamard
