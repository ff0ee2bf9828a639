#include "bhsignal/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace bhsignal::numkit {

double legendre_p(int l, double x) {
  if (l < 0) throw std::domain_error("legendre_p: l must be >= 0");
  if (std::abs(x) > 1.0) throw std::domain_error("legendre_p: |x| must be <= 1");
  if (l == 0) return 1.0;
  double pm1 = 1.0, p = x;
  for (int k = 1; k < l; ++k) {
    const double pn = ((2 * k + 1) * x * p - k * pm1) / (k + 1);
    pm1 = p;
    p = pn;
  }
  return p;
}

void legendre_p_all(int lmax, double x, std::span<double> out) {
  if (lmax < 0) throw std::domain_error("legendre_p_all: lmax must be >= 0");
  if (std::abs(x) > 1.0) throw std::domain_error("legendre_p_all: |x| must be <= 1");
  if (out.size() < static_cast<std::size_t>(lmax + 1))
    throw std::invalid_argument("legendre_p_all: output span too small");
  out[0] = 1.0;
  if (lmax == 0) return;
  out[1] = x;
  for (int k = 1; k < lmax; ++k)
    out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1);
}

double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

namespace {

/* Power series for Si and Ci, good to ~1e-16 for x <= 4. */
void cisi_series(double x, double& ci, double& si) {
  constexpr double euler_gamma = 0.57721566490153286061;
  const double x2 = x * x;
  double term_s = x;      // x^{2k+1}/(2k+1)!
  double si_sum = x;      // sum x^{2k+1}/((2k+1)(2k+1)!)
  double term_c = 1.0;    // x^{2k}/(2k)!
  double ci_sum = 0.0;    // sum (-1)^k x^{2k}/((2k)(2k)!), k >= 1
  for (int k = 1; k <= 40; ++k) {
    term_c *= -x2 / ((2 * k - 1) * (2 * k));
    ci_sum += term_c / (2 * k);
    term_s *= -x2 / ((2 * k) * (2 * k + 1));
    si_sum += term_s / (2 * k + 1);
    if (std::abs(term_s) < 1e-18 * std::abs(si_sum) &&
        std::abs(term_c) < 1e-18)
      break;
  }
  si = si_sum;
  ci = euler_gamma + std::log(x) + ci_sum;
}

/* A(x) = int_x^inf e^{it}/t dt = -Ci(x) + i (pi/2 - Si(x)), evaluated with the
 * E1 continued fraction at argument -ix (modified Lentz). */
std::complex<double> exp_integral_tail(double x) {
  const std::complex<double> z(0.0, -x);  // E1(-ix)
  const double tiny = 1e-300;
  std::complex<double> b = z + 1.0;
  std::complex<double> c = 1.0 / tiny;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 1; i <= 20000; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const std::complex<double> del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(std::complex<double>(0.0, x)) * h;
}

void cisi(double x, double& ci, double& si) {
  if (x <= 4.0) {
    cisi_series(x, ci, si);
  } else {
    const std::complex<double> a = exp_integral_tail(x);
    ci = -a.real();
    si = M_PI / 2.0 - a.imag();
  }
}

}  // namespace

double sinint(double x) {
  if (x == 0.0) return 0.0;
  double ci, si;
  cisi(std::abs(x), ci, si);
  return x > 0 ? si : -si;
}

double cosint(double x) {
  if (!(x > 0.0)) throw std::domain_error("cosint: requires x > 0");
  double ci, si;
  cisi(x, ci, si);
  return ci;
}

namespace {

/* Gauss-Kronrod 15-point nodes/weights on [-1,1] (positive half). */
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <typename T>
void gk15(const std::function<T(double)>& f, double a, double b,
          T& result, double& err) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  T fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  T kron{}, gauss{};
  for (int i = 0; i < 7; ++i) kron += kWgk[i] * (fv[i] + fv[14 - i]);
  kron += kWgk[7] * fv[7];
  for (int i = 0; i < 3; ++i) gauss += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  gauss += kWg[3] * fv[7];
  result = h * kron;
  err = std::abs(h) * std::abs(kron - gauss);
}

template <typename T>
QuadResult<T> adapt(const std::function<T(double)>& f, double a, double b,
                    const QuadratureSpec& spec) {
  QuadResult<T> out;
  if (a == b) return out;
  if (!(a < b)) throw std::domain_error("integrate_1d: requires a <= b");
  if (!(spec.rel_tol > 0) || !(spec.abs_tol > 0) || spec.max_subdivisions < 1)
    throw std::domain_error("integrate_1d: invalid QuadratureSpec");

  struct Seg {
    double a, b, err;
    T val;
    bool operator<(const Seg& o) const { return err < o.err; }
  };
  std::priority_queue<Seg> segs;
  T v;
  double e;
  gk15<T>(f, a, b, v, e);
  segs.push({a, b, e, v});
  T total = v;
  double total_err = e;
  int n = 1;
  while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (n >= spec.max_subdivisions) {
      out.converged = false;
      break;
    }
    Seg worst = segs.top();
    segs.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval exhausted
      out.converged = false;
      segs.push(worst);
      break;
    }
    T v1, v2;
    double e1, e2;
    gk15<T>(f, worst.a, mid, v1, e1);
    gk15<T>(f, mid, worst.b, v2, e2);
    total += (v1 + v2) - worst.val;
    total_err += (e1 + e2) - worst.err;
    segs.push({worst.a, mid, e1, v1});
    segs.push({mid, worst.b, e2, v2});
    ++n;
  }
  out.value = total;
  out.error = total_err;
  out.subdivisions = n;
  return out;
}

template <typename T>
QuadResult<T> adapt_split(const std::function<T(double)>& f, double a, double b,
                          std::span<const double> splits,
                          const QuadratureSpec& spec) {
  std::vector<double> pts{a, b};
  for (double s : splits)
    if (s > a && s < b) pts.push_back(s);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  QuadResult<T> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    auto r = adapt<T>(f, pts[i], pts[i + 1], spec);
    out.value += r.value;
    out.error += r.error;
    out.subdivisions += r.subdivisions;
    out.converged = out.converged && r.converged;
  }
  return out;
}

}  // namespace

namespace detail {
QuadResult<double> integrate_impl(const std::function<double(double)>& f,
                                  double a, double b, const QuadratureSpec& spec) {
  return adapt<double>(f, a, b, spec);
}
QuadResult<Cplx> integrate_impl(const std::function<Cplx(double)>& f,
                                double a, double b, const QuadratureSpec& spec) {
  return adapt<Cplx>(f, a, b, spec);
}
QuadResult<double> integrate_split_impl(const std::function<double(double)>& f,
                                        double a, double b,
                                        std::span<const double> splits,
                                        const QuadratureSpec& spec) {
  return adapt_split<double>(f, a, b, splits, spec);
}
QuadResult<Cplx> integrate_split_impl(const std::function<Cplx(double)>& f,
                                      double a, double b,
                                      std::span<const double> splits,
                                      const QuadratureSpec& spec) {
  return adapt_split<Cplx>(f, a, b, splits, spec);
}
}  // namespace detail

std::vector<double> OdeSolution::eval(double lambda) const {
  std::vector<double> out(dim_);
  eval(lambda, out);
  return out;
}

void OdeSolution::eval(double lambda, std::span<double> out) const {
  if (lambda < lambda_.front() - 1e-12 || lambda > lambda_.back() + 1e-12)
    throw std::domain_error("OdeSolution::eval: lambda outside solved range");
  lambda = std::clamp(lambda, lambda_.front(), lambda_.back());
  auto it = std::upper_bound(lambda_.begin(), lambda_.end(), lambda);
  std::size_t i = (it == lambda_.begin()) ? 0 : (it - lambda_.begin() - 1);
  if (i + 1 >= lambda_.size()) i = lambda_.size() - 2;
  const double h = lambda_[i + 1] - lambda_[i];
  const double t = (lambda - lambda_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double* y0 = &y_[i * dim_];
  const double* y1 = &y_[(i + 1) * dim_];
  const double* f0 = &f_[i * dim_];
  const double* f1 = &f_[(i + 1) * dim_];
  for (std::size_t k = 0; k < dim_; ++k)
    out[k] = h00 * y0[k] + h * h10 * f0[k] + h01 * y1[k] + h * h11 * f1[k];
}

std::span<const double> OdeSolution::back() const {
  return {&y_[(lambda_.size() - 1) * dim_], dim_};
}

namespace {

/* Dormand-Prince 5(4) coefficients. */
constexpr double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
constexpr double a21 = 1. / 5;
constexpr double a31 = 3. / 40, a32 = 9. / 40;
constexpr double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
constexpr double a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561,
                 a54 = -212. / 729;
constexpr double a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247,
                 a64 = 49. / 176, a65 = -5103. / 18656;
constexpr double b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192,
                 b5 = -2187. / 6784, b6 = 11. / 84;
constexpr double e1 = 35. / 384 - 5179. / 57600, e3 = 500. / 1113 - 7571. / 16695,
                 e4 = 125. / 192 - 393. / 640, e5 = -2187. / 6784 + 92097. / 339200,
                 e6 = 11. / 84 - 187. / 2100, e7 = -1. / 40;

}  // namespace

OdeSolution ode_solve(const OdeRhs& rhs, std::span<const double> y0,
                      double l0, double l1, const OdeSpec& spec) {
  if (!(spec.initial_step > 0)) throw std::domain_error("ode_solve: initial_step must be > 0");
  if (!(l1 > l0)) throw std::domain_error("ode_solve: requires l1 > l0");
  const std::size_t n = y0.size();
  OdeSolution sol;
  sol.dim_ = n;

  std::vector<double> y(y0.begin(), y0.end()), f0v(n);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), yerr(n);
  double lambda = l0;
  rhs(lambda, y, k1);
  sol.lambda_.push_back(lambda);
  sol.y_.insert(sol.y_.end(), y.begin(), y.end());
  sol.f_.insert(sol.f_.end(), k1.begin(), k1.end());

  const bool fixed = spec.kind == OdeSpec::Step::fixed;
  double h = std::min(spec.initial_step, l1 - l0);
  const double hmin = (l1 - l0) * 1e-14;

  auto step = [&](double hh) {
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hh * a21 * k1[i];
    rhs(lambda + c2 * hh, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hh * (a31 * k1[i] + a32 * k2[i]);
    rhs(lambda + c3 * hh, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hh * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(lambda + c4 * hh, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hh * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(lambda + c5 * hh, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hh * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                             a65 * k5[i]);
    rhs(lambda + hh, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hh * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                             b6 * k6[i]);
    rhs(lambda + hh, ytmp, k7);
    double errnorm = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double err = hh * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                               e6 * k6[i] + e7 * k7[i]);
      const double sc = spec.tol * (1.0 + std::max(std::abs(y[i]), std::abs(ytmp[i])));
      errnorm = std::max(errnorm, std::abs(err) / sc);
    }
    return errnorm;
  };

  while (lambda < l1 - 1e-14 * (l1 - l0)) {
    h = std::min(h, l1 - lambda);
    const double errnorm = step(h);
    if (fixed || errnorm <= 1.0) {
      lambda += h;
      y = ytmp;
      k1 = k7;  // FSAL
      sol.lambda_.push_back(lambda);
      sol.y_.insert(sol.y_.end(), y.begin(), y.end());
      sol.f_.insert(sol.f_.end(), k1.begin(), k1.end());
      if (!fixed) {
        const double fac = std::clamp(0.9 * std::pow(std::max(errnorm, 1e-10), -0.2), 0.2, 5.0);
        h *= fac;
      }
    } else {
      h *= std::clamp(0.9 * std::pow(errnorm, -0.25), 0.1, 0.9);
      if (h < hmin)
        throw NumericalFailure("ode_solve: step-size underflow at lambda=" +
                               std::to_string(lambda));
    }
  }
  return sol;
}

}  // namespace bhsignal::numkit
