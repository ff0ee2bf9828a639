/* cid.hpp
 *
 * Distant-past Green function: per-l characteristic initial-data solver on a
 * double-null (u, v) grid and the smoothed multipole sum
 *
 *   G_ret(x,x') = -theta(u-u') theta(v-v') / (r r')
 *                 * sum_l (2l+1) P_l(cos gamma) g_l(u,v) exp(-l^2/(2 lcut^2)).
 *
 * The l-modes satisfy  d2g/dv du + Q(r) g = 0  with boundary data
 * g = -1/2 on both characteristics; nodes are spaced 2h and marched with the
 * locally O(h^6) update (globally O(h^4)).
 */
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bhsignal/geometry.hpp"

namespace bhsignal::cid {

/* Potential of the l-mode equation: (f/4)(l(l+1)/r^2 + 2M/r^3). */
double potential(const geometry::BlackHole& bh, int l, double r);

struct ModeGrid {
  int l = 0;
  double mass = 1.0;
  double h = 0.01;          // half-stepsize; node spacing is 2h
  double u0 = 0.0, v0 = 0.0;  // base point (u', v')
  int nu = 0, nv = 0;         // node counts
  std::vector<double> g;      // u-major: g[j*nv + i], node (i,j) = (v, u) index

  double at(int i, int j) const { return g[static_cast<std::size_t>(j) * nv + i]; }

  double extent_v() const { return 2.0 * h * (nv - 1); }
  double extent_u() const { return 2.0 * h * (nu - 1); }
  double base_rstar() const { return (v0 - u0) / 2.0; }

  /* Bilinear interpolation at offsets (dv, du) = (v - v0, u - u0); exact at
   * nodes. Offsets must lie inside the grid. */
  double interp(double dv, double du) const;
};

/* March the grid from base (u0, v0) covering coordinate extents
 * (extent_v, extent_u) >= 0 with half-step h. */
ModeGrid cid_solve(const geometry::BlackHole& bh, int l, double u0, double v0,
                   double extent_v, double extent_u, double h);

struct ModeSumConfig {
  int lmax = 100;
  double lcut = 20.0;  // gaussian smoothing width, exp(-l^2/(2 lcut^2))
};

/* Smoothed multipole sum over precomputed grids (one per l, l = 0..lmax, all
 * sharing base and spacing). Offsets (dv, du) locate the field point relative
 * to the base; r is recovered from the grid geometry, r_base from the base
 * point. Returns 0 outside the retarded support (du < 0 or dv < 0). */
double mode_sum(std::span<const ModeGrid> grids, double dv, double du,
                double gamma, const ModeSumConfig& cfg);

/* Offsets of a field point relative to the grid base for a static pair:
 * base at (t'=0, rstar_base), field at coordinate-time difference dt and
 * tortoise radius rstar. dv = dt + (rstar - rstar_base), du = dt - (...). */
void static_offsets(double dt, double rstar, double rstar_base, double& dv,
                    double& du);

/* Offsets implementing the time-reflection identity
 *   g(x; x') = g(T x'; T x), T: (t, rstar) -> (-t, rstar),
 * used to query G(x_field, x_src) on a grid whose base sits at the FIELD
 * point's tortoise radius: pass the source event (t_src, rstar_src) and the
 * field event (t_field, rstar_field). */
void reflected_offsets(double t_field, double rstar_field, double t_src,
                       double rstar_src, double& dv, double& du);

/* Green function of fixed spatial endpoints sampled on a uniform dt grid with
 * monotone-cubic interpolation. Queries below the support floor return 0. */
class DPGreenTable {
 public:
  DPGreenTable() = default;
  /* Sample G(dt) on [dt_min, dt_max] with n nodes; support_floor marks the
   * direct-ray flight time (queries below it return 0 exactly). */
  DPGreenTable(std::span<const ModeGrid> grids, double r, double r_base,
               double gamma, double dt_min, double dt_max, int n,
               const ModeSumConfig& cfg, double support_floor,
               std::vector<double> crossings);

  double operator()(double dt) const;
  double dt_min() const { return dt0_; }
  double dt_max() const { return dt0_ + ddt_ * (static_cast<int>(val_.size()) - 1); }
  const std::vector<double>& crossings() const { return crossings_; }
  const std::vector<double>& values() const { return val_; }

 private:
  double dt0_ = 0, ddt_ = 1, floor_ = 0;
  std::vector<double> val_, slope_;
  std::vector<double> crossings_;
};

DPGreenTable dp_table(const geometry::BlackHole& bh, std::span<const ModeGrid> grids,
                      double r, double r_base, double gamma, double dt_min,
                      double dt_max, int n, const ModeSumConfig& cfg);

/* Binary cache: magic "GLCID1\0\0", u32 l, f64 M, f64 h, f64 u', f64 v',
 * u32 N_u, u32 N_v, then N_u*N_v f64 node values row-major, u-major. */
void save_modegrid(const ModeGrid& grid, const std::string& path);
ModeGrid load_modegrid(const std::string& path);

/* Sidecar CSV ("u,v,g") for inspection. */
void export_modegrid_csv(const ModeGrid& grid, const std::string& path);

/* Content key for cache filenames: FNV-1a over the solve parameters. */
std::string modegrid_cache_key(const geometry::BlackHole& bh, int l, double u0,
                               double v0, double extent_v, double extent_u,
                               double h);

}  // namespace bhsignal::cid
