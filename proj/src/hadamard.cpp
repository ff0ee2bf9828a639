#include "bhsignal/hadamard.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace bhsignal::hadamard {

namespace {

using Mat4 = std::array<std::array<double, 4>, 4>;

/* Index order t, r, theta, phi; equatorial plane. */
void christoffel_times_u(double M, double r, const double u[4], Mat4& a) {
  const double f = 1.0 - 2.0 * M / r;
  const double fp = 2.0 * M / (r * r);
  for (auto& row : a) row.fill(0.0);
  // A^g_b = Gamma^g_{b d} u^d
  a[0][0] = fp / (2.0 * f) * u[1];          // Gamma^t_{tr} u^r
  a[0][1] = fp / (2.0 * f) * u[0];          // Gamma^t_{rt} u^t
  a[1][0] = f * fp / 2.0 * u[0];            // Gamma^r_{tt} u^t
  a[1][1] = -fp / (2.0 * f) * u[1];         // Gamma^r_{rr} u^r
  a[1][2] = 0.0;                            // Gamma^r_{theta theta} u^theta = 0
  a[1][3] = -r * f * u[3];                  // Gamma^r_{phi phi} u^phi
  a[2][2] = u[1] / r;                       // Gamma^theta_{theta r} u^r
  a[3][1] = u[3] / r;                       // Gamma^phi_{r phi} u^phi
  a[3][3] = u[1] / r;                       // Gamma^phi_{phi r} u^r
}

/* T^a_b = R^a_{g b d} u^g u^d from the pair table P[a][b] = R^a_{b a b}. */
void riemann_contract(double M, double r, const double u[4], Mat4& t) {
  const double f = 1.0 - 2.0 * M / r;
  const double m_r3 = M / (r * r * r);
  double P[4][4] = {};
  P[0][1] = 2.0 * m_r3 / f;   // R^t_{r t r}
  P[0][2] = -M / r;           // R^t_{theta t theta}
  P[0][3] = -M / r;
  P[1][0] = -2.0 * m_r3 * f;  // R^r_{t r t}
  P[1][2] = -M / r;
  P[1][3] = -M / r;
  P[2][0] = f * m_r3;         // R^theta_{t theta t}
  P[2][1] = -m_r3 / f;
  P[2][3] = 2.0 * M / r;
  P[3][0] = f * m_r3;
  P[3][1] = -m_r3 / f;
  P[3][2] = 2.0 * M / r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == b) {
        double acc = 0;
        for (int g = 0; g < 4; ++g)
          if (g != a) acc += P[a][g] * u[g] * u[g];
        t[a][b] = acc;
      } else {
        t[a][b] = -P[a][b] * u[a] * u[b];
      }
    }
}

double det4(const Mat4& m) {
  double a[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = m[i][j];
  double det = 1.0;
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int rr = col + 1; rr < 4; ++rr)
      if (std::abs(a[rr][col]) > std::abs(a[piv][col])) piv = rr;
    if (a[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (int rr = col + 1; rr < 4; ++rr) {
      const double fac = a[rr][col] / a[col][col];
      for (int cc = col; cc < 4; ++cc) a[rr][cc] -= fac * a[col][cc];
    }
  }
  return det;
}

}  // namespace

TransportState transport_solve(const geometry::BlackHole& bh,
                               const geometry::NullRay& ray) {
  const double M = bh.mass;
  const double dl = ray.delta_lambda;
  if (!(dl > 0)) throw std::domain_error("transport_solve: empty ray");

  auto sample = [&](double lam, double& r, double u[4]) {
    // interpolate radius and radial velocity from the stored path
    const auto& ls = ray.lambda;
    auto it = std::upper_bound(ls.begin(), ls.end(), lam);
    std::size_t i = (it == ls.begin()) ? 0 : (it - ls.begin() - 1);
    if (i + 1 >= ls.size()) i = ls.size() - 2;
    const double w = (lam - ls[i]) / (ls[i + 1] - ls[i]);
    r = ray.r[i] * (1 - w) + ray.r[i + 1] * w;
    const double rdot = ray.rdot[i] * (1 - w) + ray.rdot[i + 1] * w;
    const double f = 1.0 - 2.0 * M / r;
    u[0] = ray.energy / f;
    u[1] = rdot;
    u[2] = 0.0;
    u[3] = ray.angular_momentum / (r * r);
  };

  // state: Q row-major (16) + Delta^{1/2}
  numkit::OdeRhs rhs = [&](double lam, std::span<const double> yv, std::span<double> dyv) {
    double r, u[4];
    sample(lam, r, u);
    Mat4 q, a, t;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) q[i][j] = yv[4 * i + j];
    christoffel_times_u(M, r, u, a);
    riemann_contract(M, r, u, t);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double qa = 0, aq = 0, qq = 0;
        for (int g = 0; g < 4; ++g) {
          qa += q[i][g] * a[g][j];
          aq += a[i][g] * q[g][j];
          qq += q[i][g] * q[g][j];
        }
        dyv[4 * i + j] = qa - aq - (qq + q[i][j]) / lam - lam * t[i][j];
      }
    double trq = q[0][0] + q[1][1] + q[2][2] + q[3][3];
    dyv[16] = -trq / (2.0 * lam) * yv[16];
  };

  // Taylor start: Q = -(lambda^2/3) T, Delta^{1/2} = 1 (vacuum).
  const double eps = 1e-6 * dl;
  double r0, u0[4];
  sample(eps, r0, u0);
  Mat4 t0;
  riemann_contract(M, r0, u0, t0);
  std::vector<double> y(17, 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) y[4 * i + j] = -eps * eps / 3.0 * t0[i][j];
  y[16] = 1.0;

  numkit::OdeSpec spec;
  spec.kind = numkit::OdeSpec::Step::adaptive;
  spec.initial_step = dl * 1e-4;
  spec.tol = 1e-11;
  auto sol = numkit::ode_solve(rhs, y, eps, dl, spec);

  TransportState st;
  auto yb = sol.back();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) st.q[i][j] = yb[4 * i + j];
  st.u_vanvleck = yb[16];
  st.lambda = dl;

  Mat4 one_plus_q = st.q;
  for (int i = 0; i < 4; ++i) one_plus_q[i][i] += 1.0;
  if (det4(one_plus_q) <= 0.0)
    throw NumericalFailure("caustic: det(1+Q) crossed zero along the geodesic");
  return st;
}

RadialQ radial_q_analytic(const geometry::BlackHole& bh, double r, double r_prime,
                          bool ingoing) {
  const double M = bh.mass;
  const double f = 1.0 - 2.0 * M / r;
  double shape;  // (3r - r')/r^2 - 2 ln(r/r')/(r - r')
  const double x = (r - r_prime) / r_prime;
  if (std::abs(x) < 1e-4) {
    // coincidence expansion; leading term -(2/3) x^2 / r'
    shape = (-2.0 / 3.0 * x * x + 1.5 * x * x * x - 2.4 * x * x * x * x) / r_prime;
  } else {
    shape = (3.0 * r - r_prime) / (r * r) - 2.0 * std::log(r / r_prime) / (r - r_prime);
  }
  RadialQ q;
  q.qtt = M / f * shape;
  q.qrr = -q.qtt;
  q.qtr = (ingoing ? 1.0 : -1.0) * q.qtt / f;
  q.qrt = -f * f * q.qtr;
  return q;
}

TailSeries::TailSeries(double mass, double base_r, int order)
    : mass_(mass), base_r_(base_r), order_(order) {
  v_.assign(static_cast<std::size_t>(order + 1) * (order + 1) * (order + 1), 0.0);
}

std::size_t TailSeries::idx(int i, int j, int k) const {
  return (static_cast<std::size_t>(i) * (order_ + 1) + j) * (order_ + 1) + k;
}

double TailSeries::v(int i, int j, int k) const {
  if (i < 0 || j < 0 || k < 0 || i + j + k > order_) return 0.0;
  return v_[idx(i, j, k)];
}

void TailSeries::set_v(int i, int j, int k, double value) {
  if (i < 0 || j < 0 || k < 0 || i + j + k > order_)
    throw std::domain_error("TailSeries::set_v: index outside truncation");
  v_[idx(i, j, k)] = value;
}

double TailSeries::eval(double dt, double y, double dr) const {
  return eval_with_validity(dt, y, dr, nullptr);
}

double TailSeries::eval_with_validity(double dt, double y, double dr,
                                      double* last_order_fraction) const {
  const double T = dt * dt;
  double sum = 0.0, last = 0.0, scale = 0.0;
  for (int m = 0; m <= order_; ++m) {
    double sm = 0.0;
    for (int i = 0; i <= m; ++i)
      for (int j = 0; i + j <= m; ++j) {
        const int k = m - i - j;
        const double c = v_[idx(i, j, k)];
        if (c == 0.0) continue;
        sm += c * std::pow(T, i) * std::pow(y, j) * std::pow(dr, k);
      }
    sum += sm;
    scale = std::max(scale, std::abs(sm));
    if (m == order_) last = sm;
  }
  if (last_order_fraction)
    *last_order_fraction = std::abs(last) / std::max(scale, 1e-300);
  return sum;
}

TailSeries tail_from_series(const HadamardSeries& hs, int order) {
  TailSeries ts(hs.mass, hs.base_r, order);
  hs.tail.for_each([&](int a, int b, int c, double v) {
    if (a + b + c <= order) ts.set_v(a, b, c, v);
  });
  return ts;
}

TailSeries tail_coefficients(const geometry::BlackHole& bh, double base_r, int order,
                             int native_max_order) {
  if (!(base_r > 2.0 * bh.mass)) throw std::domain_error("tail_coefficients: r <= 2M");
  if (order > native_max_order)
    throw NumericalFailure(
        "tail_coefficients: order exceeds the native recursion depth; import "
        "coefficients from a tail CSV file instead");
  if (bh.mass == 0.0) return TailSeries(0.0, base_r, order);  // flat tail vanishes
  const auto hs = build_hadamard_series(bh.mass, base_r, 2 * order);
  return tail_from_series(hs, order);
}

void save_tail_csv(const TailSeries& ts, std::ostream& os) {
  os << "# schwarzschild-tail-v1 M=" << ts.mass() << " r=" << std::setprecision(17)
     << ts.base_r() << "\n";
  os << std::setprecision(17);
  for (int i = 0; i <= ts.order(); ++i)
    for (int j = 0; i + j <= ts.order(); ++j)
      for (int k = 0; i + j + k <= ts.order(); ++k)
        if (ts.v(i, j, k) != 0.0)
          os << i << "," << j << "," << k << "," << ts.v(i, j, k) << "\n";
}

TailSeries load_tail_csv(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (header.rfind("# schwarzschild-tail-v1", 0) != 0)
    throw std::runtime_error("load_tail_csv: bad header: " + header);
  double mass = 1.0, r = 0.0;
  {
    auto mpos = header.find("M=");
    auto rpos = header.find("r=");
    if (mpos == std::string::npos || rpos == std::string::npos)
      throw std::runtime_error("load_tail_csv: header lacks M= or r=");
    mass = std::stod(header.substr(mpos + 2));
    r = std::stod(header.substr(rpos + 2));
  }
  struct Row { int i, j, k; double v; };
  std::vector<Row> rows;
  int max_order = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    Row row;
    char comma;
    std::istringstream ss(line);
    ss >> row.i >> comma >> row.j >> comma >> row.k >> comma >> row.v;
    if (ss.fail()) throw std::runtime_error("load_tail_csv: bad row: " + line);
    rows.push_back(row);
    max_order = std::max(max_order, row.i + row.j + row.k);
  }
  TailSeries ts(mass, r, max_order);
  for (const auto& row : rows) ts.set_v(row.i, row.j, row.k, row.v);
  return ts;
}

void save_tail_csv_file(const TailSeries& ts, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_tail_csv_file: cannot open " + path);
  save_tail_csv(ts, os);
}

TailSeries load_tail_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_tail_csv_file: cannot open " + path);
  return load_tail_csv(is);
}

QlGreen ql_green(const geometry::BlackHole& bh, double dt, double gamma, double r,
                 const HadamardSeries& hs, double validity_threshold) {
  (void)bh;
  QlGreen g;
  const double T = dt * dt;
  const double y = 1.0 - std::cos(gamma);
  const double rho = r - hs.base_r;
  g.sigma = hs.sigma.eval(T, y, rho);
  const double scale = std::max({std::abs(T), std::abs(rho) * std::abs(rho), 1e-30});
  if (std::abs(g.sigma) < 1e-10 * scale)
    g.sign = SigmaSign::null;
  else
    g.sign = g.sigma < 0 ? SigmaSign::timelike : SigmaSign::spacelike;

  // validity: contribution of the last retained total order of V, measured
  // against the largest order-group magnitude (the plain partial sum can
  // cancel to zero near the lightcone and would misreport convergence there)
  const int D = hs.max_degree;
  double sum = 0, last = 0, order_scale = 0;
  for (int n = 0; n <= D; ++n) {
    double sn = 0;
    hs.tail.for_each([&](int a, int b, int c, double v) {
      if (2 * a + 2 * b + c == n)
        sn += v * std::pow(T, a) * std::pow(y, b) * std::pow(rho, c);
    });
    sum += sn;
    order_scale = std::max(order_scale, std::abs(sn));
    if (n >= D - 1) last += std::abs(sn);
  }
  g.validity_fraction = last / std::max(order_scale, 1e-300);
  if (g.validity_fraction > validity_threshold && std::abs(sum) > 1e-300)
    throw NumericalFailure("outside QL region: series validity fraction " +
                           std::to_string(g.validity_fraction));
  g.tail = (g.sign == SigmaSign::timelike || g.sign == SigmaSign::null) ? -sum : 0.0;
  if (g.sign == SigmaSign::spacelike) g.tail = 0.0;
  g.u_direct = hs.vanvleck.eval(T, y, rho);
  return g;
}

}  // namespace bhsignal::hadamard
