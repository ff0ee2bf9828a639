/* series.hpp
 *
 * Truncated multivariate series machinery for the quasi-local Green function
 * around a base point (t', r', angular origin) in Schwarzschild. Everything
 * is expanded in the separation variables
 *
 *   T   = (t - t')^2        (all objects here are even in t - t')
 *   y   = 1 - cos(gamma)
 *   rho = r - r'
 *
 * graded by deg(T^a y^b rho^c) = 2a + 2b + c. From the seeded quadratic the
 * engine solves, order by order,
 *
 *   grad(sigma) . grad(sigma) = 2 sigma                (world function)
 *   2 sigma^a U_,a + (box sigma - 4) U = 0,  U(x,x)=1  (van Vleck root)
 *   box V = 0  with lightcone data
 *   2 sigma^a V_,a + (box sigma - 2) V = -box U        (tail biscalar)
 *
 * the last two combined through V = sum_k V_k sigma^k with the transport
 * hierarchy for the V_k.
 */
#pragma once

#include <vector>

namespace bhsignal::hadamard {

class Poly3 {
 public:
  explicit Poly3(int max_degree = 0);

  int max_degree() const { return d_; }
  double at(int a, int b, int c) const;
  void set(int a, int b, int c, double v);
  void add(int a, int b, int c, double v);

  Poly3& operator+=(const Poly3& o);
  Poly3& operator-=(const Poly3& o);
  Poly3& operator*=(double s);

  /* Product truncated to the common max degree. */
  static Poly3 mul(const Poly3& x, const Poly3& y);

  /* Formal partials with respect to T, y, rho. */
  Poly3 dT() const;
  Poly3 dY() const;
  Poly3 dR() const;

  /* Multiply by the monomial T^da y^db rho^dc. */
  Poly3 shifted(int da, int db, int dc) const;

  /* Homogeneous part of the given total degree. */
  Poly3 degree_part(int n) const;

  double max_abs() const;
  double max_abs_in_degree(int n) const;

  double eval(double T, double y, double rho) const;

  template <typename F>
  void for_each(F&& f) const {
    for (int a = 0; a <= na_; ++a)
      for (int b = 0; b <= nb_; ++b)
        for (int c = 0; c <= nc_; ++c)
          if (2 * a + 2 * b + c <= d_) {
            const double v = c_[idx(a, b, c)];
            if (v != 0.0) f(a, b, c, v);
          }
  }

 private:
  std::size_t idx(int a, int b, int c) const {
    return (static_cast<std::size_t>(a) * (nb_ + 1) + b) * (nc_ + 1) + c;
  }
  int d_ = 0, na_ = 0, nb_ = 0, nc_ = 0;
  std::vector<double> c_;
};

/* sigma, U = Delta^{1/2} and V around a base radius, M fixed. */
struct HadamardSeries {
  double mass = 1.0;
  double base_r = 6.0;
  int max_degree = 24;
  Poly3 sigma, vanvleck, tail;
};

HadamardSeries build_hadamard_series(double mass, double base_r, int max_degree);

}  // namespace bhsignal::hadamard
