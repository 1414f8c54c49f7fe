#include "carleman/functional.hpp"

#include <cmath>

#include "carleman/parallel.hpp"
#include "carleman/stencil.hpp"
#include "carleman/util.hpp"

namespace carleman {

bool FunctionalConfig::theorem_regime(double N) const {
  return alpha >= alpha_for(lambda, c_hat, N) * (1.0 - 1e-12);
}

double FunctionalConfig::alpha_for(double lambda, double c_hat, double N) {
  return 2.0 * c_hat * std::exp(-lambda * N);
}

FunctionalContext::FunctionalContext(const Geometry& geom, const TensorBasis& basis,
                                     const Field& F, const AdmissibleParams& params,
                                     const FunctionalConfig& config)
    : geom_(geom), basis_(basis), F_(F), params_(params), config_(config) {
  require(F_.grid().same_shape(basis_.grid()), ErrorCode::TRACE_SHAPE_MISMATCH,
          "lifting field not on the basis grid");
  mask_ = pd_mask(geom_, basis_.grid());
  gram_m_ = basis_.sobolev_gram(config_.m);

  // Per-axis second-difference lines of every basis factor, with the same
  // boundary rules as the global stencils.
  const Grid& g = basis_.grid();
  const int dim = g.dim();
  d2_lines_.resize(static_cast<std::size_t>(dim) + 1);
  for (int a = 0; a <= dim; ++a) {
    const bool is_time = a == dim;
    const int n = is_time ? g.nt() : g.nx(a);
    const double h = is_time ? g.ht() : g.hx(a);
    d2_lines_[static_cast<std::size_t>(a)].resize(static_cast<std::size_t>(basis_.count(a)));
    std::vector<double> samples(static_cast<std::size_t>(n));
    for (int i = 0; i < basis_.count(a); ++i) {
      for (int node = 0; node < n; ++node)
        samples[static_cast<std::size_t>(node)] = basis_.table(a, 0, node, i);
      auto& line = d2_lines_[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)];
      line.assign(static_cast<std::size_t>(n), 0.0);
      diff_series(samples.data(), line.data(), n, h, 2, /*even_reflect_at_zero=*/is_time);
    }
  }

  set_lambda(config_.lambda);
}

void FunctionalContext::set_lambda(double lambda) {
  config_.lambda = lambda;
  const Grid& g = basis_.grid();
  TrapezoidWeights tw(g);
  WeightField wf = carleman_weight_field(geom_, g, lambda, /*psi_shift=*/geom_.M());
  omega_weight_ = Field(g);
  const int nt = g.nt();
  for (std::int64_t s = 0; s < g.spatial_nodes(); ++s) {
    double wsp = tw.spatial(g, s);
    for (int it = 0; it < nt; ++it)
      omega_weight_.at(s, it) = wsp * tw.wt[static_cast<std::size_t>(it)] * wf.phi_sq.at(s, it);
  }
}

FunctionalContext::ResidualParts FunctionalContext::assemble_residual(const CoeffVector& B) const {
  ResidualParts parts;
  parts.w_plus_F = basis_.synth(B);
  parts.w_plus_F += F_;
  parts.denom0 = parts.w_plus_F.time_slice(0);
  parts.A = a_of(parts.denom0, params_);
  parts.dtt_wpF = dtt(parts.w_plus_F);
  Field lap = laplacian(parts.w_plus_F);
  parts.Y = Field(basis_.grid());
  const int nt = basis_.grid().nt();
  parallel_for_slabs(basis_.grid().spatial_nodes(), [&](std::int64_t lo, std::int64_t hi, int) {
    for (std::int64_t s = lo; s < hi; ++s)
      for (int it = 0; it < nt; ++it)
        parts.Y.at(s, it) = parts.A[s] * parts.dtt_wpF.at(s, it) - lap.at(s, it);
  });
  return parts;
}

Field FunctionalContext::residual(const CoeffVector& B) const {
  return assemble_residual(B).Y;
}

double FunctionalContext::eval(const CoeffVector& B, FunctionalVariant variant) const {
  Field Y = residual(B);
  double J = slab_sum(Y.size(), [&](std::int64_t i) { return omega_weight_[i] * Y[i] * Y[i]; });
  if (variant == FunctionalVariant::JAlpha) J += config_.alpha * penalty_norm_sq(B);
  return J;
}

Field FunctionalContext::frechet_apply(const CoeffVector& B, const CoeffVector& H) const {
  ResidualParts parts = assemble_residual(B);
  Field h = basis_.synth(H);
  Field dtt_h = dtt(h);
  Field lap_h = laplacian(h);
  Field h0 = h.time_slice(0);
  Field out(basis_.grid());
  const int nt = basis_.grid().nt();
  parallel_for_slabs(basis_.grid().spatial_nodes(), [&](std::int64_t lo, std::int64_t hi, int) {
    for (std::int64_t s = lo; s < hi; ++s) {
      double coupling = parts.A[s] / parts.denom0[s] * h0[s];
      for (int it = 0; it < nt; ++it)
        out.at(s, it) = parts.A[s] * dtt_h.at(s, it) - lap_h.at(s, it) -
                        coupling * parts.dtt_wpF.at(s, it);
    }
  });
  return out;
}

CoeffVector FunctionalContext::assemble_against(const Field& Z, const Field& A) const {
  const Grid& g = basis_.grid();
  const int dim = g.dim();
  const int nt = g.nt();
  const int kt = basis_.count(dim);
  CoeffVector out = CoeffVector::Zero(basis_.size());

  // Time contractions of Z against every time factor and its second
  // difference: ZT0[j](s) = sum_t Z psi_j, ZT2[j](s) = sum_t Z dtt(psi_j).
  const std::int64_t nsp = g.spatial_nodes();
  std::vector<std::vector<double>> ZT0(static_cast<std::size_t>(kt)),
      ZT2(static_cast<std::size_t>(kt));
  for (int j = 0; j < kt; ++j) {
    ZT0[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(nsp), 0.0);
    ZT2[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(nsp), 0.0);
  }
  parallel_for_slabs(nsp, [&](std::int64_t lo, std::int64_t hi, int) {
    for (std::int64_t s = lo; s < hi; ++s) {
      const double* zrow = Z.values().data() + s * nt;
      for (int j = 0; j < kt; ++j) {
        const auto& d2 = d2_lines_[static_cast<std::size_t>(dim)][static_cast<std::size_t>(j)];
        double a0 = 0.0, a2 = 0.0;
        for (int it = 0; it < nt; ++it) {
          a0 += zrow[it] * basis_.table(dim, 0, it, j);
          a2 += zrow[it] * d2[static_cast<std::size_t>(it)];
        }
        ZT0[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] = a0;
        ZT2[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] = a2;
      }
    }
  });

  parallel_for_slabs(basis_.size(), [&](std::int64_t elo, std::int64_t ehi, int) {
    int mi[kMaxDim + 1];
    for (std::int64_t e = elo; e < ehi; ++e) {
      basis_.unflatten(e, mi);
      auto lw = basis_.entry_window(e, /*halo=*/3);
      const int j = mi[dim];
      const auto& zt0 = ZT0[static_cast<std::size_t>(j)];
      const auto& zt2 = ZT2[static_cast<std::size_t>(j)];
      double acc = 0.0;
      const int j1lo = dim > 1 ? lw.lo[1] : 0, j1hi = dim > 1 ? lw.hi[1] : 0;
      const int j2lo = dim > 2 ? lw.lo[2] : 0, j2hi = dim > 2 ? lw.hi[2] : 0;
      for (int i0 = lw.lo[0]; i0 <= lw.hi[0]; ++i0) {
        const double v0 = basis_.table(0, 0, i0, mi[0]);
        const double d0 = d2_lines_[0][static_cast<std::size_t>(mi[0])][static_cast<std::size_t>(i0)];
        for (int i1 = j1lo; i1 <= j1hi; ++i1) {
          double v01 = v0, lap01 = d0;
          if (dim > 1) {
            const double v1 = basis_.table(1, 0, i1, mi[1]);
            const double d1 = d2_lines_[1][static_cast<std::size_t>(mi[1])][static_cast<std::size_t>(i1)];
            lap01 = d0 * v1 + v0 * d1;
            v01 = v0 * v1;
          }
          for (int i2 = j2lo; i2 <= j2hi; ++i2) {
            double phi = v01, lap_phi = lap01;
            if (dim > 2) {
              const double v2 = basis_.table(2, 0, i2, mi[2]);
              const double d2v = d2_lines_[2][static_cast<std::size_t>(mi[2])][static_cast<std::size_t>(i2)];
              lap_phi = lap01 * v2 + v01 * d2v;
              phi = v01 * v2;
            }
            std::int64_t s = i0 * g.spatial_stride(0);
            if (dim > 1) s += i1 * g.spatial_stride(1);
            if (dim > 2) s += i2 * g.spatial_stride(2);
            acc += A[s] * phi * zt2[static_cast<std::size_t>(s)] -
                   lap_phi * zt0[static_cast<std::size_t>(s)];
          }
        }
      }
      out[e] = acc;
    }
  });
  return out;
}

Field FunctionalContext::slice_accumulator(const Field& Y, const Field& G) const {
  const Grid& g = basis_.grid();
  const int nt = g.nt();
  std::array<int, kMaxDim> nx{g.nx(0), g.nx(1), g.nx(2)};
  Grid sg(g.box(), nx, 0.0, 1);
  Field S(sg);
  parallel_for_slabs(g.spatial_nodes(), [&](std::int64_t lo, std::int64_t hi, int) {
    for (std::int64_t s = lo; s < hi; ++s) {
      double acc = 0.0;
      for (int it = 0; it < nt; ++it)
        acc += omega_weight_.at(s, it) * Y.at(s, it) * G.at(s, it);
      S[s] = acc;
    }
  });
  return S;
}

CoeffVector FunctionalContext::gradient(const CoeffVector& B, FunctionalVariant variant) const {
  ResidualParts parts = assemble_residual(B);
  const Grid& g = basis_.grid();
  const int dim = g.dim();
  const int nt = g.nt();

  Field Zw(g);
  parallel_for_slabs(g.spatial_nodes(), [&](std::int64_t lo, std::int64_t hi, int) {
    for (std::int64_t s = lo; s < hi; ++s)
      for (int it = 0; it < nt; ++it)
        Zw.at(s, it) = omega_weight_.at(s, it) * parts.Y.at(s, it);
  });
  CoeffVector grad = assemble_against(Zw, parts.A);

  // Initial-slice coupling: -(A / (w+F)(.,0)) dtt(w+F) h(x,0) contributes
  // through the t-sum S(x) once per spatial node.
  Field G(g);
  parallel_for_slabs(g.spatial_nodes(), [&](std::int64_t lo, std::int64_t hi, int) {
    for (std::int64_t s = lo; s < hi; ++s) {
      double c = parts.A[s] / parts.denom0[s];
      for (int it = 0; it < nt; ++it) G.at(s, it) = c * parts.dtt_wpF.at(s, it);
    }
  });
  Field S = slice_accumulator(parts.Y, G);

  int mi[kMaxDim + 1];
  for (std::int64_t e = 0; e < basis_.size(); ++e) {
    basis_.unflatten(e, mi);
    double t0 = basis_.table(dim, 0, 0, mi[dim]);
    if (t0 == 0.0) continue;
    auto lw = basis_.entry_window(e, 0);
    double acc = 0.0;
    const int j1lo = dim > 1 ? lw.lo[1] : 0, j1hi = dim > 1 ? lw.hi[1] : 0;
    const int j2lo = dim > 2 ? lw.lo[2] : 0, j2hi = dim > 2 ? lw.hi[2] : 0;
    for (int i0 = lw.lo[0]; i0 <= lw.hi[0]; ++i0)
      for (int i1 = j1lo; i1 <= j1hi; ++i1)
        for (int i2 = j2lo; i2 <= j2hi; ++i2) {
          std::int64_t s = i0 * g.spatial_stride(0);
          if (dim > 1) s += i1 * g.spatial_stride(1);
          if (dim > 2) s += i2 * g.spatial_stride(2);
          double v = basis_.table(0, 0, i0, mi[0]);
          if (dim > 1) v *= basis_.table(1, 0, i1, mi[1]);
          if (dim > 2) v *= basis_.table(2, 0, i2, mi[2]);
          acc += v * S[s];
        }
    grad[e] -= t0 * acc;
  }

  grad *= 2.0;
  if (variant == FunctionalVariant::JAlpha)
    grad += 2.0 * config_.alpha * (gram_m_ * B);
  return grad;
}

GapReport FunctionalContext::convexity_gap(const CoeffVector& B1, const CoeffVector& B2) const {
  GapReport rep;
  CoeffVector diff = B2 - B1;
  double J1 = eval(B1), J2 = eval(B2);
  CoeffVector g1 = gradient(B1);
  rep.gap = J2 - J1 - g1.dot(diff);
  rep.penalty_floor = 0.5 * config_.alpha * diff.dot(gram_m_ * diff);
  Field dw = basis_.synth(diff);
  rep.h1pd_norm_sq = h1_pd_norm_sq(dw, mask_);
  rep.b_dist_sq = diff.squaredNorm();
  rep.floor_ok = rep.gap >= rep.penalty_floor;
  return rep;
}

CoeffVector FunctionalContext::frozen_hessian_apply(const CoeffVector& B_freeze,
                                                    const CoeffVector& V) const {
  Field w = basis_.synth(B_freeze);
  w += F_;
  Field denom0 = w.time_slice(0);
  Field A = a_of(denom0, params_);

  Field h = basis_.synth(V);
  Field dtt_h = dtt(h);
  Field lap_h = laplacian(h);
  const Grid& g = basis_.grid();
  const int nt = g.nt();
  Field Z(g);
  parallel_for_slabs(g.spatial_nodes(), [&](std::int64_t lo, std::int64_t hi, int) {
    for (std::int64_t s = lo; s < hi; ++s)
      for (int it = 0; it < nt; ++it)
        Z.at(s, it) = omega_weight_.at(s, it) * (A[s] * dtt_h.at(s, it) - lap_h.at(s, it));
  });
  CoeffVector Hv = assemble_against(Z, A);
  Hv *= 2.0;
  Hv += 2.0 * config_.alpha * (gram_m_ * V);
  return Hv;
}

double FunctionalContext::frozen_hessian_largest_eigenvalue(const CoeffVector& B_freeze,
                                                            int iters, std::uint64_t seed) const {
  Rng rng(seed);
  CoeffVector v(basis_.size());
  for (std::int64_t i = 0; i < basis_.size(); ++i) v[i] = rng.symmetric();
  v.normalize();
  double lam = 0.0;
  for (int k = 0; k < iters; ++k) {
    CoeffVector Hv = frozen_hessian_apply(B_freeze, v);
    lam = v.dot(Hv);
    double n = Hv.norm();
    if (n == 0.0) return 0.0;
    v = Hv / n;
  }
  return lam;
}

}  // namespace carleman
