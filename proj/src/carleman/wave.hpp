#pragma once

#include "carleman/geometry.hpp"
#include "carleman/medium.hpp"

namespace carleman {

// Solver grid: the Omega grid extended on every side by enough cells that
// nothing emitted from the initial support can reach the outer boundary
// within [0, T] at unit maximal speed, so the free-space Cauchy problem is
// reproduced exactly and no artificial reflections occur.
Grid make_enlarged_grid(const Geometry& geom, const Grid& omega_grid, double support_margin);

// Explicit leapfrog for c(x) u_tt = laplacian u, u(x,0) = f, u_t(x,0) = 0 on
// the grid of medium.c; first step via the Taylor half-step
// u^1 = u^0 + (ht^2/2) laplacian_h f / c. Returns u on that grid over [0, T].
Field solve_wave(const MediumSpec& medium, const InitialData& initial, const Geometry& geom,
                 const Grid& solver_grid, int nt, bool enforce_invariants = true);

// Restriction of a space-time field to the Omega grid block.
Field restrict_to_omega(const Field& u, const Geometry& geom, const Grid& omega_grid);

// Discrete energy 1/2 int (c u_t^2 + |grad u|^2) dx at time index it.
double discrete_energy(const Field& u, const Field& c, int it);

// One face of the lateral boundary: tangential nodes (row-major over the
// remaining spatial axes) x time.
struct FaceTrace {
  int axis = 0;
  int side = 0;  // 0: lo face (outward normal -e_axis), 1: hi face (+e_axis)
  std::int64_t tangential_nodes = 1;
  int nt = 1;
  std::vector<double> v;

  double& at(std::int64_t tau, int it) { return v[static_cast<std::size_t>(tau * nt + it)]; }
  double at(std::int64_t tau, int it) const { return v[static_cast<std::size_t>(tau * nt + it)]; }
};

struct BoundaryRecord {
  std::vector<FaceTrace> s;  // Dirichlet trace per face
  std::vector<FaceTrace> p;  // outward normal derivative per face
  double noise_level = 0.0;
};

// Maps a face-tangential index to the spatial index of the omega grid.
std::int64_t face_to_spatial(const Grid& omega_grid, int axis, int side, std::int64_t tau);
std::int64_t face_node_count(const Grid& omega_grid, int axis);

// s = u at the boundary nodes of Omega, p = centered normal difference using
// the exterior neighbors available on the solver grid.
BoundaryRecord extract_boundary(const Field& u, const Geometry& geom, const Grid& omega_grid);

// Multiplicative uniform noise: s <- s (1 + delta z), p <- p (1 + delta z'),
// z, z' i.i.d. uniform on [-1,1] from the seed. delta = 0 returns the record
// bit-exactly.
BoundaryRecord add_noise(const BoundaryRecord& record, double delta, std::uint64_t seed);

}  // namespace carleman
