#include "carleman/quadrature.hpp"

#include <cmath>

#include "carleman/parallel.hpp"
#include "carleman/stencil.hpp"

namespace carleman {

TrapezoidWeights::TrapezoidWeights(const Grid& g) {
  for (int a = 0; a < g.dim(); ++a) {
    wx[a].assign(g.nx(a), g.hx(a));
    wx[a].front() = 0.5 * g.hx(a);
    wx[a].back() = 0.5 * g.hx(a);
  }
  if (g.nt() > 1) {
    wt.assign(g.nt(), g.ht());
    wt.front() = 0.5 * g.ht();
    wt.back() = 0.5 * g.ht();
  } else {
    wt.assign(1, 1.0);
  }
}

double TrapezoidWeights::spatial(const Grid& g, std::int64_t s) const {
  int idx[kMaxDim];
  g.decode_spatial(s, idx);
  double w = 1.0;
  for (int a = 0; a < g.dim(); ++a) w *= wx[a][idx[a]];
  return w;
}

WeightField carleman_weight_field(const Geometry& geom, const Grid& grid, double lambda,
                                  double psi_shift) {
  WeightField out;
  out.phi_sq = Field(grid);
  const int nt = grid.nt();
  std::vector<std::uint8_t> clamped(slab_count(grid.spatial_nodes()), 0);
  parallel_for_slabs(grid.spatial_nodes(), [&](std::int64_t b, std::int64_t e, int slab) {
    double x[kMaxDim];
    for (std::int64_t s = b; s < e; ++s) {
      grid.node_point(s, x);
      for (int it = 0; it < nt; ++it) {
        double ex = 2.0 * lambda * (geom.psi(x, grid.time(it)) - psi_shift);
        if (ex > 700.0) { ex = 700.0; clamped[slab] = 1; }
        if (ex < -700.0) { ex = -700.0; clamped[slab] = 1; }
        out.phi_sq.at(s, it) = std::exp(ex);
      }
    }
  });
  for (auto c : clamped) out.clamped = out.clamped || (c != 0);
  return out;
}

namespace {

double inner_qt(const Field& f, const Field& g, const Field& w, const PdMask* mask) {
  const Grid& grid = f.grid();
  TrapezoidWeights tw(grid);
  const int nt = grid.nt();
  return slab_sum(grid.spatial_nodes(), [&](std::int64_t s) {
    double ws = tw.spatial(grid, s);
    double acc = 0.0;
    for (int it = 0; it < nt; ++it) {
      std::int64_t i = s * nt + it;
      if (mask && !mask->mask[static_cast<std::size_t>(i)]) continue;
      acc += tw.wt[it] * f[i] * g[i] * w[i];
    }
    return ws * acc;
  });
}

double inner_omega_t(const Field& f, const Field& g, const Field& w) {
  const Grid& grid = f.grid();
  TrapezoidWeights tw(grid);
  const int it = grid.nt() - 1;
  return slab_sum(grid.spatial_nodes(), [&](std::int64_t s) {
    return tw.spatial(grid, s) * f.at(s, it) * g.at(s, it) * w.at(s, it);
  });
}

double inner_st(const Field& f, const Field& g, const Field& w) {
  const Grid& grid = f.grid();
  TrapezoidWeights tw(grid);
  const int nt = grid.nt();
  double total = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    for (int side = 0; side < 2; ++side) {
      int face_idx = side == 0 ? 0 : grid.nx(a) - 1;
      total += slab_sum(grid.spatial_nodes(), [&](std::int64_t s) {
        int idx[kMaxDim];
        grid.decode_spatial(s, idx);
        if (idx[a] != face_idx) return 0.0;
        double ws = 1.0;
        for (int b = 0; b < grid.dim(); ++b)
          if (b != a) ws *= tw.wx[b][idx[b]];
        double acc = 0.0;
        for (int it = 0; it < nt; ++it) {
          std::int64_t i = s * nt + it;
          acc += tw.wt[it] * f[i] * g[i] * w[i];
        }
        return ws * acc;
      });
    }
  }
  return total;
}

}  // namespace

double weighted_inner(const Field& f, const Field& g, const Field& weight, Region region,
                      const PdMask* mask) {
  require(f.grid().same_shape(g.grid()) && f.grid().same_shape(weight.grid()),
          ErrorCode::TRACE_SHAPE_MISMATCH, "weighted_inner: fields on different grids");
  switch (region) {
    case Region::QT: return inner_qt(f, g, weight, nullptr);
    case Region::Pd:
      require(mask != nullptr, ErrorCode::CONFIG_ERROR, "P_d region needs a mask");
      return inner_qt(f, g, weight, mask);
    case Region::OmegaT: return inner_omega_t(f, g, weight);
    case Region::ST: return inner_st(f, g, weight);
  }
  return 0.0;
}

double weighted_inner(const Field& f, const Field& g, const Geometry& geom, double lambda,
                      Region region, const PdMask* mask) {
  WeightField w = carleman_weight_field(geom, f.grid(), lambda);
  PdMask local;
  if (region == Region::Pd && mask == nullptr) {
    local = pd_mask(geom, f.grid());
    mask = &local;
  }
  return weighted_inner(f, g, w.phi_sq, region, mask);
}

double l2_norm_sq(const Field& f) {
  const Grid& grid = f.grid();
  TrapezoidWeights tw(grid);
  const int nt = grid.nt();
  return slab_sum(grid.spatial_nodes(), [&](std::int64_t s) {
    double ws = tw.spatial(grid, s);
    double acc = 0.0;
    for (int it = 0; it < nt; ++it) {
      double v = f.at(s, it);
      acc += tw.wt[it] * v * v;
    }
    return ws * acc;
  });
}

double h1_pd_norm_sq(const Field& f, const PdMask& mask) {
  const Grid& grid = f.grid();
  TrapezoidWeights tw(grid);
  Field ft = dt(f);
  std::vector<Field> gx = grad(f);
  const int nt = grid.nt();
  return slab_sum(grid.spatial_nodes(), [&](std::int64_t s) {
    double ws = tw.spatial(grid, s);
    double acc = 0.0;
    for (int it = 0; it < nt; ++it) {
      std::int64_t i = s * nt + it;
      if (!mask.mask[static_cast<std::size_t>(i)]) continue;
      double v = f[i] * f[i] + ft[i] * ft[i];
      for (const Field& gd : gx) v += gd[i] * gd[i];
      acc += tw.wt[it] * v;
    }
    return ws * acc;
  });
}

}  // namespace carleman
