#pragma once

#include <string>

#include "carleman/basis.hpp"

namespace carleman {

// Data defining the admissible set: the bracket field laplacian f on the
// Omega closure, the t = 0 slice of the lifting F, the medium slack b and the
// coefficient-norm radius R.
struct AdmissibleParams {
  Field lap_f;  // spatial field on the Omega grid
  Field F0;     // F(., 0), spatial field on the Omega grid
  Point x0{};
  double b = 0.5;
  double R = 10.0;
  double interior_margin = 1e-10;  // strict-margin threshold for Int(G)
};

// A(v)(x) = lap f(x) / (v + F)(x, 0); guard on positive denominator.
// v0 is the t = 0 slice of v.
Field a_of(const Field& v0, const AdmissibleParams& params);

// Pointwise coefficient recovery c = lap f / (w + F)(., 0), clamped to
// [1, 1+b] afterwards.
struct RecoveredCoefficient {
  Field c;
  std::int64_t clamped_nodes = 0;
};
RecoveredCoefficient recover_c_pointwise(const Field& w0, const AdmissibleParams& params);

// Set-membership report. All four margins are concave functions of B (the
// cone condition is evaluated on its product form, which is affine in the
// coefficients), so membership is exactly preserved under convex
// combinations; Int(G) is "all margins strictly positive".
struct MembershipReport {
  double norm_margin = 0.0;   // R - |B|
  double lower_margin = 0.0;  // min over nodes of (v+F)(x,0) - (1+b)^{-1} lap f
  double upper_margin = 0.0;  // min over nodes of lap f - (v+F)(x,0)
  double cone_margin = 0.0;   // min over nodes of the monotonicity product form
  bool in_set = false;
  bool interior = false;
  double min_margin() const;
  std::string table() const;  // four-line table with margins
};

MembershipReport membership(const CoeffVector& B, const AdmissibleParams& params,
                            const TensorBasis& basis);

// Same report for an explicit t = 0 slice (used for grid fields that are not
// in the span; the norm condition is then not applicable and reported as R).
MembershipReport membership_slice(const Field& v0, const AdmissibleParams& params);

}  // namespace carleman
