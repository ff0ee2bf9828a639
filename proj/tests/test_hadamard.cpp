#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "bhsignal/hadamard.hpp"

using namespace bhsignal;
using namespace bhsignal::hadamard;
using bhsignal::geometry::BlackHole;
using bhsignal::geometry::NullRay;
using bhsignal::geometry::OrbitClass;

static const BlackHole bh{1.0};

TEST_CASE("radial_q_analytic limits and relations") {
  // coincidence limit
  auto q0 = radial_q_analytic(bh, 6.0 + 1e-9, 6.0, true);
  CHECK(std::abs(q0.qtt) < 1e-12);
  // trace-free and index relations
  auto q = radial_q_analytic(bh, 4.0, 6.0, true);
  CHECK(q.qrr == doctest::Approx(-q.qtt).epsilon(1e-14));
  const double f = 1.0 - 2.0 / 4.0;
  CHECK(q.qrt == doctest::Approx(-f * f * q.qtr).epsilon(1e-14));
  CHECK(q.qtr == doctest::Approx(q.qtt / f).epsilon(1e-14));
}

TEST_CASE("analytic radial Q satisfies its own transport ODE") {
  // (r - r') dQtt/dr = -2M(r-r')^2/(r^3 f) - (r^2 - 2 M r')/(r^2 f) Qtt
  const double rp = 6.0;
  for (double r : {5.0, 4.0, 3.0, 2.5, 8.0}) {
    const double h = 1e-6;
    const double qp = radial_q_analytic(bh, r + h, rp, true).qtt;
    const double qm = radial_q_analytic(bh, r - h, rp, true).qtt;
    const double dq = (qp - qm) / (2 * h);
    const double q = radial_q_analytic(bh, r, rp, true).qtt;
    const double f = 1.0 - 2.0 / r;
    const double lhs = (r - rp) * dq;
    const double rhs = -2.0 * (r - rp) * (r - rp) / (r * r * r * f) -
                       (r * r - 2.0 * rp) / (r * r * f) * q;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6).scale(std::abs(rhs) + 1e-10));
  }
}

TEST_CASE("transport along radial null rays: U = 1 and Q matches closed form") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ur(2.2, 20.0);
  for (int trial = 0; trial < 10; ++trial) {
    double ra = ur(rng), rb = ur(rng);
    if (std::abs(ra - rb) < 0.3) rb = ra + 1.0;
    auto ray = geometry::radial_null(bh, ra, rb);
    auto st = transport_solve(bh, ray);
    CHECK(std::abs(st.u_vanvleck - 1.0) < 1e-8);
    const bool ingoing = rb < ra;
    auto qa = radial_q_analytic(bh, rb, ra, ingoing);
    CHECK(st.q[0][0] == doctest::Approx(qa.qtt).epsilon(1e-6).scale(std::abs(qa.qtt) + 1e-9));
    CHECK(st.q[1][1] == doctest::Approx(qa.qrr).epsilon(1e-6).scale(std::abs(qa.qrr) + 1e-9));
    CHECK(st.q[0][1] == doctest::Approx(qa.qtr).epsilon(1e-6).scale(std::abs(qa.qtr) + 1e-9));
    CHECK(st.q[1][0] == doctest::Approx(qa.qrt).epsilon(1e-6).scale(std::abs(qa.qrt) + 1e-9));
    // angular block vanishes; symmetry Q^r_t = -f^2 Q^t_r
    CHECK(std::abs(st.q[2][2]) < 1e-8);
    CHECK(std::abs(st.q[3][3]) < 1e-8);
    const double f = 1.0 - 2.0 / rb;
    CHECK(st.q[1][0] ==
          doctest::Approx(-f * f * st.q[0][1]).epsilon(1e-6).scale(1e-9 + std::abs(st.q[1][0])));
  }
}

TEST_CASE("transport in the flat limit gives U = 1, Q = 0") {
  BlackHole flat{0.0};
  auto ray = geometry::radial_null(flat, 6.0, 3.0);
  auto st = transport_solve(flat, ray);
  CHECK(std::abs(st.u_vanvleck - 1.0) < 1e-10);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(st.q[i][j]) < 1e-10);
}

TEST_CASE("transport U along a bent ray stays near unity and above") {
  auto ray = geometry::null_shoot(bh, 6.0, 3.01, M_PI / 4, OrbitClass::direct);
  auto st = transport_solve(bh, ray);
  CHECK(st.u_vanvleck > 1.0);  // focusing
  CHECK(st.u_vanvleck < 1.5);
}

TEST_CASE("series engine: flat space terminates exactly") {
  auto hs = build_hadamard_series(0.0, 6.0, 16);
  // sigma = -T/2 + rho^2/2 + r'^2 y + r' y rho exactly
  CHECK(hs.sigma.at(1, 0, 0) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(hs.sigma.at(0, 0, 2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(hs.sigma.at(0, 1, 0) == doctest::Approx(36.0).epsilon(1e-13));
  CHECK(hs.sigma.at(0, 1, 1) == doctest::Approx(6.0).epsilon(1e-13));
  double other = 0;
  hs.sigma.for_each([&](int a, int b, int c, double v) {
    if (!((a == 1 && b == 0 && c == 0) || (a == 0 && b == 0 && c == 2) ||
          (a == 0 && b == 1 && c == 0) || (a == 0 && b == 1 && c == 1)))
      other = std::max(other, std::abs(v));
  });
  CHECK(other < 1e-10);
  // U = 1, V = 0
  CHECK(hs.vanvleck.at(0, 0, 0) == doctest::Approx(1.0));
  Poly3 ucopy = hs.vanvleck;
  ucopy.add(0, 0, 0, -1.0);
  CHECK(ucopy.max_abs() < 1e-12);
  CHECK(hs.tail.max_abs() < 1e-12);
}

TEST_CASE("series engine: sigma vanishes along radial null geodesics") {
  auto hs = build_hadamard_series(1.0, 6.0, 20);
  for (double dr : {0.1, 0.3, 0.6, -0.2, -0.5}) {
    const double r = 6.0 + dr;
    const double dt = std::abs(geometry::tortoise(bh, r) - geometry::tortoise(bh, 6.0));
    const double sig = hs.sigma.eval(dt * dt, 0.0, dr);
    CHECK(std::abs(sig) < 1e-10 * std::max(1.0, dr * dr));
  }
}

TEST_CASE("series engine: U matches the transport solution on short rays") {
  auto hs = build_hadamard_series(1.0, 6.0, 20);
  for (double g : {0.15, 0.3, 0.5}) {
    auto ray = geometry::null_shoot(bh, 6.0, 5.2, g, OrbitClass::direct);
    auto st = transport_solve(bh, ray);
    const double useries =
        hs.vanvleck.eval(ray.delta_t * ray.delta_t, 1.0 - std::cos(g), 5.2 - 6.0);
    CHECK(useries == doctest::Approx(st.u_vanvleck).epsilon(2e-6));
  }
}

TEST_CASE("series engine: coincidence values") {
  auto hs = build_hadamard_series(1.0, 6.0, 16);
  CHECK(hs.vanvleck.at(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  // vacuum: V(x,x) = 0 and U has no quadratic term
  CHECK(std::abs(hs.tail.at(0, 0, 0)) < 1e-14);
  CHECK(hs.vanvleck.max_abs_in_degree(2) < 1e-13);
}

TEST_CASE("tail series is even in dt and reciprocal on sampled pairs") {
  auto ts = tail_coefficients(bh, 6.0, 8);
  CHECK(ts.eval(1.3, 0.1, 0.2) == ts.eval(-1.3, 0.1, 0.2));
  auto ts2 = tail_coefficients(bh, 6.5, 8);
  for (double dt : {0.5, 1.0, 2.0}) {
    const double v12 = ts.eval(dt, 0.0, 0.5);    // base 6.0, field 6.5
    const double v21 = ts2.eval(dt, 0.0, -0.5);  // base 6.5, field 6.0
    CHECK(v12 == doctest::Approx(v21).epsilon(5e-3));
  }
}

TEST_CASE("tail series flat limit vanishes") {
  auto ts = tail_coefficients(BlackHole{0.0}, 6.0, 8);
  CHECK(ts.eval(2.0, 0.3, 0.5) == 0.0);
}

TEST_CASE("tail CSV round trip") {
  auto ts = tail_coefficients(bh, 6.0, 6);
  std::stringstream ss;
  save_tail_csv(ts, ss);
  auto ts2 = load_tail_csv(ss);
  CHECK(ts2.base_r() == doctest::Approx(6.0));
  CHECK(ts2.order() >= 6);
  for (int i = 0; i <= 6; ++i)
    for (int j = 0; i + j <= 6; ++j)
      for (int k = 0; i + j + k <= 6; ++k)
        CHECK(ts2.v(i, j, k) == doctest::Approx(ts.v(i, j, k)).epsilon(1e-14));
  CHECK_THROWS(tail_coefficients(bh, 6.0, 20));  // beyond native depth -> import
}

TEST_CASE("ql_green support and classification") {
  auto hs = build_hadamard_series(1.0, 6.0, 20);
  // spacelike pair: equal-time, separated radii
  auto g1 = ql_green(bh, 0.0, 0.0, 6.5, hs);
  CHECK(g1.sign == SigmaSign::spacelike);
  CHECK(g1.tail == 0.0);
  // timelike pair: same spatial point, dt > 0
  auto g2 = ql_green(bh, 2.0, 0.0, 6.0, hs);
  CHECK(g2.sign == SigmaSign::timelike);
  CHECK(g2.tail != 0.0);
  // the validity knob trips once the threshold undercuts the series tail
  CHECK_THROWS_AS(ql_green(bh, 5.0, 0.0, 6.0, hs, 1e-8), NumericalFailure);
  // null radial pair: finite tail value, U = 1
  const double dtn = geometry::tortoise(bh, 6.5) - geometry::tortoise(bh, 6.0);
  auto g3 = ql_green(bh, dtn, 0.0, 6.5, hs);
  CHECK(g3.sign == SigmaSign::null);
  CHECK(g3.u_direct == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::isfinite(g3.tail));
  // far outside the QL region -> failure
  CHECK_THROWS_AS(ql_green(bh, 40.0, 0.0, 6.0, hs), NumericalFailure);
}
