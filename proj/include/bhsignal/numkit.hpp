/* numkit.hpp
 *
 * Shared numerical primitives: Legendre polynomials, sine/cosine integrals,
 * sinc, adaptive 1-D quadrature (real and complex integrands) and an ODE
 * solver with dense output. Everything here is pure and reentrant.
 */
#pragma once

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhsignal {

/* Thrown when an algorithm fails for numerical (not precondition) reasons. */
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

namespace numkit {

using Cplx = std::complex<double>;

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 4000;
};

struct OdeSpec {
  enum class Step { fixed, adaptive };
  Step kind = Step::adaptive;
  double initial_step = 1e-3;
  double tol = 1e-10;
};

/* Legendre polynomial P_l(x), |x| <= 1, stable three-term recurrence. */
double legendre_p(int l, double x);

/* Fill out[0..lmax] with P_0(x) .. P_lmax(x). */
void legendre_p_all(int lmax, double x, std::span<double> out);

/* Sine integral Si(x) = int_0^x sin(t)/t dt, odd in x. */
double sinint(double x);

/* Cosine integral Ci(x) = -int_x^inf cos(t)/t dt, requires x > 0. */
double cosint(double x);

/* sin(x)/x with sinc(0) = 1. */
double sinc(double x);

template <typename T>
struct QuadResult {
  T value{};
  double error = 0.0;      // accumulated error bound
  int subdivisions = 0;
  bool converged = true;

  T value_or_throw() const {
    if (!converged)
      throw NumericalFailure("quadrature did not converge; error bound " +
                             std::to_string(error));
    return value;
  }
};

namespace detail {
QuadResult<double> integrate_impl(const std::function<double(double)>& f,
                                  double a, double b, const QuadratureSpec& spec);
QuadResult<Cplx> integrate_impl(const std::function<Cplx(double)>& f,
                                double a, double b, const QuadratureSpec& spec);
QuadResult<double> integrate_split_impl(const std::function<double(double)>& f,
                                        double a, double b,
                                        std::span<const double> splits,
                                        const QuadratureSpec& spec);
QuadResult<Cplx> integrate_split_impl(const std::function<Cplx(double)>& f,
                                      double a, double b,
                                      std::span<const double> splits,
                                      const QuadratureSpec& spec);
}  // namespace detail

/* Adaptive Gauss-Kronrod (G7,K15) integration of f on [a, b]; the integrand
 * may return double or complex. Deterministic for a fixed spec. Callers must
 * split at known kinks or integrable singular points themselves (or use
 * integrate_split). */
template <typename F>
auto integrate_1d(const F& f, double a, double b, const QuadratureSpec& spec = {}) {
  using R = std::invoke_result_t<F, double>;
  if constexpr (std::is_same_v<R, Cplx>)
    return detail::integrate_impl(std::function<Cplx(double)>(f), a, b, spec);
  else
    return detail::integrate_impl(std::function<double(double)>(f), a, b, spec);
}

/* Same, but with the interval pre-split at the given abscissae (values outside
 * (a,b) are ignored; duplicates collapse). */
template <typename F>
auto integrate_split(const F& f, double a, double b, std::span<const double> splits,
                     const QuadratureSpec& spec = {}) {
  using R = std::invoke_result_t<F, double>;
  if constexpr (std::is_same_v<R, Cplx>)
    return detail::integrate_split_impl(std::function<Cplx(double)>(f), a, b, splits, spec);
  else
    return detail::integrate_split_impl(std::function<double(double)>(f), a, b, splits, spec);
}

/* Right-hand side signature: rhs(lambda, y, dy_out). */
using OdeRhs = std::function<void(double, std::span<const double>, std::span<double>)>;

/* Dense-output ODE solution: cubic Hermite between accepted steps. */
class OdeSolution {
 public:
  double lambda_begin() const { return lambda_.front(); }
  double lambda_end() const { return lambda_.back(); }
  std::size_t dim() const { return dim_; }

  /* State at an arbitrary lambda inside the solved range. */
  std::vector<double> eval(double lambda) const;
  void eval(double lambda, std::span<double> out) const;

  /* Final state. */
  std::span<const double> back() const;

  const std::vector<double>& nodes() const { return lambda_; }

 private:
  friend OdeSolution ode_solve(const OdeRhs&, std::span<const double>,
                               double, double, const OdeSpec&);
  std::size_t dim_ = 0;
  std::vector<double> lambda_;
  std::vector<double> y_;   // node states, row-major
  std::vector<double> f_;   // node derivatives, row-major
};

/* Integrate y' = rhs(lambda, y) from l0 to l1 (l1 > l0). Throws
 * NumericalFailure on step-size underflow, with the last good state in the
 * message. */
OdeSolution ode_solve(const OdeRhs& rhs, std::span<const double> y0,
                      double l0, double l1, const OdeSpec& spec = {});

}  // namespace numkit
}  // namespace bhsignal
