#include "carleman/admissible.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "carleman/stencil.hpp"

namespace carleman {

Field a_of(const Field& v0, const AdmissibleParams& params) {
  require(v0.grid().same_shape(params.lap_f.grid()), ErrorCode::TRACE_SHAPE_MISMATCH,
          "t = 0 slice not on the Omega grid");
  Field A(v0.grid());
  std::string bad;
  int bad_count = 0;
  for (std::int64_t s = 0; s < v0.size(); ++s) {
    double denom = v0[s] + params.F0[s];
    if (denom <= 0.0) {
      if (bad_count < 8) bad += (bad.empty() ? "" : ", ") + std::to_string(s);
      ++bad_count;
      continue;
    }
    A[s] = params.lap_f[s] / denom;
  }
  require(bad_count == 0, ErrorCode::NONPOSITIVE_DENOMINATOR,
          "(v+F)(x,0) <= 0 at " + std::to_string(bad_count) + " node(s): [" + bad + "]");
  return A;
}

RecoveredCoefficient recover_c_pointwise(const Field& w0, const AdmissibleParams& params) {
  RecoveredCoefficient out;
  out.c = a_of(w0, params);
  for (std::int64_t s = 0; s < out.c.size(); ++s) {
    double v = out.c[s];
    double clamped = std::clamp(v, 1.0, 1.0 + params.b);
    if (clamped != v) ++out.clamped_nodes;
    out.c[s] = clamped;
  }
  return out;
}

double MembershipReport::min_margin() const {
  return std::min(std::min(norm_margin, cone_margin), std::min(lower_margin, upper_margin));
}

std::string MembershipReport::table() const {
  std::ostringstream os;
  auto line = [&](const char* name, double margin) {
    os << name << (margin >= 0 ? "  ok   " : "  FAIL ") << "margin " << margin << "\n";
  };
  line("norm  |B| <= R          ", norm_margin);
  line("lower bracket at t = 0  ", lower_margin);
  line("upper bracket at t = 0  ", upper_margin);
  line("monotonicity cone       ", cone_margin);
  return os.str();
}

MembershipReport membership_slice_impl(const Field& v0, const AdmissibleParams& params,
                                       double norm_margin) {
  MembershipReport rep;
  rep.norm_margin = norm_margin;
  const Grid& g = v0.grid();
  const double inv1b = 1.0 / (1.0 + params.b);

  Field vpF = v0;
  vpF += params.F0;

  rep.lower_margin = 1e300;
  rep.upper_margin = 1e300;
  for (std::int64_t s = 0; s < g.spatial_nodes(); ++s) {
    rep.lower_margin = std::min(rep.lower_margin, vpF[s] - inv1b * params.lap_f[s]);
    rep.upper_margin = std::min(rep.upper_margin, params.lap_f[s] - vpF[s]);
  }

  // Monotonicity of A along x - x0 in product form:
  //   (grad(lap f) (v+F) - lap f grad(v+F), x - x0) >= 0,
  // equivalent to (grad A, x - x0) >= 0 when (v+F)(x,0) > 0, and affine in B.
  std::vector<Field> glf = grad(params.lap_f);
  std::vector<Field> gv = grad(vpF);
  rep.cone_margin = 1e300;
  double x[kMaxDim];
  const Point& x0 = params.x0;
  for (std::int64_t s = 0; s < g.spatial_nodes(); ++s) {
    g.node_point(s, x);
    double m = 0.0;
    for (int a = 0; a < g.dim(); ++a)
      m += (glf[static_cast<std::size_t>(a)][s] * vpF[s] -
            params.lap_f[s] * gv[static_cast<std::size_t>(a)][s]) * (x[a] - x0[a]);
    rep.cone_margin = std::min(rep.cone_margin, m);
  }

  rep.in_set = rep.min_margin() >= 0.0;
  rep.interior = rep.min_margin() > params.interior_margin;
  return rep;
}

MembershipReport membership_slice(const Field& v0, const AdmissibleParams& params) {
  return membership_slice_impl(v0, params, params.R);
}

MembershipReport membership(const CoeffVector& B, const AdmissibleParams& params,
                            const TensorBasis& basis) {
  Field v0 = basis.synth_time_slice(B, 0);
  return membership_slice_impl(v0, params, params.R - B.norm());
}

}  // namespace carleman
