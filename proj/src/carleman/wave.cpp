#include "carleman/wave.hpp"

#include <cmath>

#include "carleman/parallel.hpp"
#include "carleman/quadrature.hpp"
#include "carleman/stencil.hpp"
#include "carleman/util.hpp"

namespace carleman {

Grid make_enlarged_grid(const Geometry& geom, const Grid& omega_grid, double support_margin) {
  Box big;
  big.dim = geom.dim();
  std::array<int, kMaxDim> nx{1, 1, 1};
  for (int a = 0; a < geom.dim(); ++a) {
    double h = omega_grid.hx(a);
    int extra = static_cast<int>(std::ceil((support_margin + geom.T()) / h)) + 2;
    big.lo[a] = geom.omega().lo[a] - extra * h;
    big.hi[a] = geom.omega().hi[a] + extra * h;
    nx[a] = omega_grid.nx(a) + 2 * extra;
  }
  return Grid(big, nx, 0.0, 1);
}

namespace {

// Interior leapfrog update; outer-boundary nodes hold their initial value
// (exact as long as no signal reaches them, which the enlargement ensures).
void leapfrog_step(const Grid& g, const std::vector<double>& cinv, const double* prev,
                   const double* cur, double* next, double ht) {
  const int dim = g.dim();
  const double ht2 = ht * ht;
  double inv_h2[kMaxDim];
  for (int a = 0; a < dim; ++a) inv_h2[a] = 1.0 / (g.hx(a) * g.hx(a));
  parallel_for_slabs(g.spatial_nodes(), [&](std::int64_t lo, std::int64_t hi, int) {
    int idx[kMaxDim];
    for (std::int64_t s = lo; s < hi; ++s) {
      g.decode_spatial(s, idx);
      bool boundary = false;
      for (int a = 0; a < dim; ++a)
        if (idx[a] == 0 || idx[a] == g.nx(a) - 1) { boundary = true; break; }
      if (boundary) {
        next[s] = cur[s];
        continue;
      }
      double lap = 0.0;
      for (int a = 0; a < dim; ++a) {
        std::int64_t st = g.spatial_stride(a);
        lap += (cur[s - st] - 2.0 * cur[s] + cur[s + st]) * inv_h2[a];
      }
      next[s] = 2.0 * cur[s] - prev[s] + ht2 * cinv[s] * lap;
    }
  });
}

}  // namespace

Field solve_wave(const MediumSpec& medium, const InitialData& initial, const Geometry& geom,
                 const Grid& solver_grid, int nt, bool enforce_invariants) {
  require(nt >= 5, ErrorCode::GRID_TOO_SMALL, "need nt >= 5");
  require(medium.c.grid().same_shape(solver_grid) && initial.f.grid().same_shape(solver_grid),
          ErrorCode::TRACE_SHAPE_MISMATCH, "medium/initial not on the solver grid");

  double hmin = solver_grid.hx(0);
  for (int a = 1; a < geom.dim(); ++a) hmin = std::min(hmin, solver_grid.hx(a));
  const double ht = geom.T() / (nt - 1);
  require(ht <= hmin / std::sqrt(static_cast<double>(geom.dim())) * (1.0 + 1e-12),
          ErrorCode::CFL_VIOLATION, "ht must be <= hx / sqrt(dim)");

  if (enforce_invariants) {
    MediumCheck mc = medium.validate(geom);
    require(mc.ok(), ErrorCode::INVARIANT_FAIL, "medium violates admissibility conditions");
    InitialCheck ic = initial.validate(geom);
    require(ic.ok(), ErrorCode::INVARIANT_FAIL, "initial data violates admissibility conditions");
  }

  const std::int64_t nsp = solver_grid.spatial_nodes();
  std::vector<double> cinv(static_cast<std::size_t>(nsp));
  for (std::int64_t s = 0; s < nsp; ++s) cinv[static_cast<std::size_t>(s)] = 1.0 / medium.c[s];

  Grid st_grid(solver_grid.box(),
               {solver_grid.nx(0), solver_grid.nx(1), solver_grid.nx(2)}, geom.T(), nt);
  Field u(st_grid);

  std::vector<double> prev(static_cast<std::size_t>(nsp)), cur(static_cast<std::size_t>(nsp)),
      next(static_cast<std::size_t>(nsp));
  for (std::int64_t s = 0; s < nsp; ++s) prev[static_cast<std::size_t>(s)] = initial.f[s];

  // First step: u^1 = u^0 + (ht^2/2) laplacian_h f / c, consistent with
  // u_t(x,0) = 0 at second order.
  Field lap_f = laplacian(initial.f);
  for (std::int64_t s = 0; s < nsp; ++s) {
    int idx[kMaxDim];
    solver_grid.decode_spatial(s, idx);
    bool boundary = false;
    for (int a = 0; a < geom.dim(); ++a)
      if (idx[a] == 0 || idx[a] == solver_grid.nx(a) - 1) { boundary = true; break; }
    cur[static_cast<std::size_t>(s)] =
        boundary ? prev[static_cast<std::size_t>(s)]
                 : prev[static_cast<std::size_t>(s)] +
                       0.5 * ht * ht * cinv[static_cast<std::size_t>(s)] * lap_f[s];
  }

  for (std::int64_t s = 0; s < nsp; ++s) {
    u.at(s, 0) = prev[static_cast<std::size_t>(s)];
    if (nt > 1) u.at(s, 1) = cur[static_cast<std::size_t>(s)];
  }

  for (int it = 2; it < nt; ++it) {
    leapfrog_step(solver_grid, cinv, prev.data(), cur.data(), next.data(), ht);
    for (std::int64_t s = 0; s < nsp; ++s) u.at(s, it) = next[static_cast<std::size_t>(s)];
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  return u;
}

Field restrict_to_omega(const Field& u, const Geometry& geom, const Grid& omega_grid) {
  const Grid& big = u.grid();
  auto off = big.offset_of(geom.omega());
  Grid qt(omega_grid.box(), {omega_grid.nx(0), omega_grid.nx(1), omega_grid.nx(2)}, big.T(),
          big.nt());
  Field out(qt);
  const int nt = big.nt();
  parallel_for_slabs(qt.spatial_nodes(), [&](std::int64_t lo, std::int64_t hi, int) {
    int idx[kMaxDim];
    int bidx[kMaxDim];
    for (std::int64_t s = lo; s < hi; ++s) {
      qt.decode_spatial(s, idx);
      for (int a = 0; a < qt.dim(); ++a) bidx[a] = idx[a] + off[a];
      std::int64_t sb = big.encode_spatial(bidx);
      for (int it = 0; it < nt; ++it) out.at(s, it) = u.at(sb, it);
    }
  });
  return out;
}

double discrete_energy(const Field& u, const Field& c, int it) {
  const Grid& g = u.grid();
  Field ut = dt(u);
  std::vector<Field> gx = grad(u);
  TrapezoidWeights tw(g);
  return 0.5 * slab_sum(g.spatial_nodes(), [&](std::int64_t s) {
    double v = c[s] * ut.at(s, it) * ut.at(s, it);
    for (const auto& gd : gx) v += gd.at(s, it) * gd.at(s, it);
    return tw.spatial(g, s) * v;
  });
}

std::int64_t face_node_count(const Grid& omega_grid, int axis) {
  return omega_grid.spatial_nodes() / omega_grid.nx(axis);
}

std::int64_t face_to_spatial(const Grid& omega_grid, int axis, int side, std::int64_t tau) {
  const std::int64_t q = omega_grid.spatial_stride(axis);
  const int n = omega_grid.nx(axis);
  std::int64_t iq = tau % q;
  std::int64_t ip = tau / q;
  int ia = side == 0 ? 0 : n - 1;
  return (ip * n + ia) * q + iq;
}

BoundaryRecord extract_boundary(const Field& u, const Geometry& geom, const Grid& omega_grid) {
  const Grid& big = u.grid();
  auto off = big.offset_of(geom.omega());
  for (int a = 0; a < geom.dim(); ++a) {
    require(off[a] >= 1 && off[a] + omega_grid.nx(a) + 1 <= big.nx(a),
            ErrorCode::NO_EXTERIOR_NODES, "solver grid has no exterior neighbors of Omega");
  }
  const int nt = big.nt();
  BoundaryRecord rec;
  for (int a = 0; a < geom.dim(); ++a) {
    for (int side = 0; side < 2; ++side) {
      FaceTrace fs, fp;
      fs.axis = fp.axis = a;
      fs.side = fp.side = side;
      fs.nt = fp.nt = nt;
      fs.tangential_nodes = fp.tangential_nodes = face_node_count(omega_grid, a);
      fs.v.assign(static_cast<std::size_t>(fs.tangential_nodes * nt), 0.0);
      fp.v = fs.v;
      const double sign = side == 0 ? -1.0 : 1.0;
      const double inv2h = 1.0 / (2.0 * big.hx(a));
      const std::int64_t big_step = big.spatial_stride(a);
      for (std::int64_t tau = 0; tau < fs.tangential_nodes; ++tau) {
        std::int64_t so = face_to_spatial(omega_grid, a, side, tau);
        int idx[kMaxDim], bidx[kMaxDim];
        omega_grid.decode_spatial(so, idx);
        for (int b = 0; b < geom.dim(); ++b) bidx[b] = idx[b] + off[b];
        std::int64_t sb = big.encode_spatial(bidx);
        for (int it = 0; it < nt; ++it) {
          fs.at(tau, it) = u.at(sb, it);
          fp.at(tau, it) = sign * (u.at(sb + big_step, it) - u.at(sb - big_step, it)) * inv2h;
        }
      }
      rec.s.push_back(std::move(fs));
      rec.p.push_back(std::move(fp));
    }
  }
  return rec;
}

BoundaryRecord add_noise(const BoundaryRecord& record, double delta, std::uint64_t seed) {
  require(delta >= 0.0, ErrorCode::CONFIG_ERROR, "delta must be nonnegative");
  BoundaryRecord out = record;
  out.noise_level = delta;
  if (delta == 0.0) return out;
  Rng rng(seed);
  for (auto& face : out.s)
    for (auto& v : face.v) v *= 1.0 + delta * rng.symmetric();
  for (auto& face : out.p)
    for (auto& v : face.v) v *= 1.0 + delta * rng.symmetric();
  return out;
}

}  // namespace carleman
