/* hadamard.hpp
 *
 * Quasi-local Green function pieces: the van Vleck / world-function transport
 * equations integrated along a connecting geodesic, their closed radial
 * forms, and the tail biscalar V as a truncated coordinate series
 *
 *   V(x,x') = sum v_ijk (t-t')^{2i} (1-cos gamma)^j (r-r')^k
 *
 * built at the base (second) point. The Hadamard form is
 *   G_ret = (U delta(sigma) - V theta(-sigma)) theta(dt);
 * the delta part is never discretized here, only its data (U, affine span,
 * tangent contraction) is exposed for analytic consumption downstream.
 */
#pragma once

#include <array>
#include <iosfwd>
#include <string>

#include "bhsignal/geometry.hpp"
#include "bhsignal/series.hpp"

namespace bhsignal::hadamard {

struct TransportState {
  double u_vanvleck = 1.0;                  // Delta^{1/2} at the far endpoint
  std::array<std::array<double, 4>, 4> q{}; // Q^alpha_beta = sigma^alpha_beta - delta
  double lambda = 0.0;                      // affine parameter at the endpoint
};

/* Integrate the coupled transport equations for Q^alpha_beta and Delta^{1/2}
 * from coincidence data along a connecting null ray (the 1/lambda terms are
 * started from the leading Taylor behaviour Q = O(lambda^2)). Throws
 * NumericalFailure("caustic...") when det(1 + Q) crosses zero. */
TransportState transport_solve(const geometry::BlackHole& bh,
                               const geometry::NullRay& ray);

struct RadialQ {
  double qtt = 0, qrr = 0, qtr = 0, qrt = 0;  // angular components vanish
};

/* Closed-form Q components along a radial null geodesic from r_prime to r;
 * ingoing selects the sign convention of the mixed components. */
RadialQ radial_q_analytic(const geometry::BlackHole& bh, double r, double r_prime,
                          bool ingoing);

/* Truncated tail series at a base radius: v_ijk with i + j + k <= order. */
class TailSeries {
 public:
  TailSeries() = default;
  TailSeries(double mass, double base_r, int order);

  double mass() const { return mass_; }
  double base_r() const { return base_r_; }
  int order() const { return order_; }

  double v(int i, int j, int k) const;
  void set_v(int i, int j, int k, double value);

  /* V at separations (dt, 1-cos gamma, r - base_r). */
  double eval(double dt, double one_minus_cos_gamma, double dr) const;

  /* Same, also reporting |last retained order| / |partial sum|. */
  double eval_with_validity(double dt, double one_minus_cos_gamma, double dr,
                            double* last_order_fraction) const;

 private:
  double mass_ = 1.0, base_r_ = 6.0;
  int order_ = 0;
  std::vector<double> v_;
  std::size_t idx(int i, int j, int k) const;
};

/* Native coefficient generation by the order-by-order wave-equation match
 * (series.hpp). Orders above the configured native maximum must be imported
 * from file instead. */
TailSeries tail_coefficients(const geometry::BlackHole& bh, double base_r, int order,
                             int native_max_order = 12);

/* CSV interchange: header "# schwarzschild-tail-v1 M=1 r=<value>", then rows
 * "i,j,k,value". Unknown (i,j,k) on load are zero. */
void save_tail_csv(const TailSeries& ts, std::ostream& os);
TailSeries load_tail_csv(std::istream& is);
void save_tail_csv_file(const TailSeries& ts, const std::string& path);
TailSeries load_tail_csv_file(const std::string& path);

enum class SigmaSign { timelike, null, spacelike };

struct QlGreen {
  SigmaSign sign = SigmaSign::spacelike;
  double sigma = 0.0;
  double tail = 0.0;        // -V theta(-sigma); zero for spacelike pairs
  double u_direct = 1.0;    // van Vleck root for the direct ray data
  double validity_fraction = 0.0;
};

/* Build the interchange table from a solved series. */
TailSeries tail_from_series(const HadamardSeries& hs, int order);

/* Quasi-local Green data between the field point (dt, r, gamma) and the
 * series base point at (t'=0, base_r, angular origin). Throws
 * NumericalFailure labelled "outside QL region" when the series fails its own
 * validity estimate. */
QlGreen ql_green(const geometry::BlackHole& bh, double dt, double gamma, double r,
                 const HadamardSeries& hs, double validity_threshold = 1e-3);

}  // namespace bhsignal::hadamard
