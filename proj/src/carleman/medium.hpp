#pragma once

#include <memory>
#include <string>

#include "carleman/geometry.hpp"

namespace carleman {

// Analytic coefficient families. All shipped families keep the radial
// monotonicity (grad c, x - x0) >= 0 on the closure of Omega by placing their
// variation on the far flank of the domain as seen from x0, and decay back to
// a constant away from Omega so the exterior is flat up to negligible tails.
class MediumProfile {
 public:
  virtual ~MediumProfile() = default;
  virtual double value(const double* x) const = 0;
  virtual std::string describe() const = 0;
};

struct FlankBump {
  double amp = 0.25;
  double center = 1.8;  // along the ray coordinate (x - x0) . e_hat
  double width = 0.45;
};

std::unique_ptr<MediumProfile> make_constant_medium(double value);
// base is the exterior constant the bumps decay to (the b_bar of the spec).
std::unique_ptr<MediumProfile> make_flank_bump_medium(const Geometry& geom, double base,
                                                      const FlankBump& b);
std::unique_ptr<MediumProfile> make_two_flank_bump_medium(const Geometry& geom, double base,
                                                          const FlankBump& b1,
                                                          const FlankBump& b2);

struct MediumCheck {
  bool bounds_ok = true;      // 1 <= c <= 1+b everywhere
  bool exterior_ok = true;    // c constant (= b_bar) beyond the clearance
  bool cone_ok = true;        // (grad c, x - x0) >= 0 at Omega closure nodes
  double min_bound_margin = 0.0;
  double max_exterior_dev = 0.0;
  double min_cone_margin = 0.0;
  bool ok() const { return bounds_ok && exterior_ok && cone_ok; }
};

struct MediumSpec {
  Field c;  // spatial field on the solver grid (nt = 1)
  double b = 0.5;
  double b_bar = 1.0;
  double exterior_clearance = 1.5;  // distance from Omega beyond which c must be flat
  double exterior_tol = 1e-3;
  double cone_tol = 1e-10;

  MediumCheck validate(const Geometry& geom) const;
};

MediumSpec sample_medium(const MediumProfile& profile, const Grid& spatial_grid, double b,
                         double b_bar);

struct InitialCheck {
  bool support_ok = true;   // f vanishes outside omega_prime
  bool laplacian_ok = true; // laplacian f >= xi on Omega closure (when xi > 0)
  double max_support_leak = 0.0;
  double min_laplacian = 0.0;
  bool ok() const { return support_ok && laplacian_ok; }
};

// Initial pressure f with its analytic Laplacian on the Omega grid.
struct InitialData {
  Field f;            // spatial, on the solver grid
  Field lap_f_omega;  // spatial, on the Omega grid (analytic samples)
  double xi = 0.0;    // positive lower bound of laplacian f on Omega closure; 0 = unclaimed
  Box omega_prime;    // support box

  InitialCheck validate(const Geometry& geom) const;
};

// f = (q0 + q2 |x - x_center|^2) * plateau(x): plateau == 1 on a margin
// around Omega closure, 0 outside omega_prime. Laplacian f == 2 dim q2 = xi
// exactly on the closure of Omega.
InitialData make_quadratic_plateau_initial(const Geometry& geom, const Grid& spatial_grid,
                                           const Grid& omega_grid, double xi, double q0,
                                           double plateau_margin, double support_margin);

// f = amp exp(-sharp |x - center|^2); no positivity claim on laplacian f.
InitialData make_gaussian_initial(const Geometry& geom, const Grid& spatial_grid,
                                  const Grid& omega_grid, double amp, double sharp,
                                  const Point& center);

}  // namespace carleman
