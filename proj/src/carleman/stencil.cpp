#include "carleman/stencil.hpp"

#include "carleman/parallel.hpp"

namespace carleman {

namespace {

// One line of n samples at (base, base+step, ...). Writes the derivative of
// the requested order into out along the same line.
void diff_line(const double* v, double* out, std::int64_t base, std::int64_t step,
               int n, double h, int order, bool even_reflect) {
  auto V = [&](int i) { return v[base + step * i]; };
  auto O = [&](int i) -> double& { return out[base + step * i]; };
  if (order == 2) {
    double h2 = h * h;
    O(0) = even_reflect ? 2.0 * (V(1) - V(0)) / h2
                        : (2.0 * V(0) - 5.0 * V(1) + 4.0 * V(2) - V(3)) / h2;
    for (int i = 1; i < n - 1; ++i) O(i) = (V(i - 1) - 2.0 * V(i) + V(i + 1)) / h2;
    O(n - 1) = (2.0 * V(n - 1) - 5.0 * V(n - 2) + 4.0 * V(n - 3) - V(n - 4)) / h2;
  } else {
    double h2 = 2.0 * h;
    O(0) = even_reflect ? 0.0 : (-3.0 * V(0) + 4.0 * V(1) - V(2)) / h2;
    for (int i = 1; i < n - 1; ++i) O(i) = (V(i + 1) - V(i - 1)) / h2;
    O(n - 1) = (3.0 * V(n - 1) - 4.0 * V(n - 2) + V(n - 3)) / h2;
  }
}

// axis >= 0: spatial axis; axis == -1: time.
Field diff_axis(const Field& f, int axis, int order) {
  const Grid& g = f.grid();
  Field out(g);
  const double* v = f.values().data();
  double* o = out.values().data();

  if (axis < 0) {
    const int n = g.nt();
    require(n >= 5, ErrorCode::GRID_TOO_SMALL, "need nt >= 5 for time stencils");
    parallel_for_slabs(g.spatial_nodes(), [&](std::int64_t b, std::int64_t e, int) {
      for (std::int64_t s = b; s < e; ++s)
        diff_line(v, o, s * n, 1, n, g.ht(), order, /*even_reflect=*/true);
    });
    return out;
  }

  const int n = g.nx(axis);
  require(n >= 5, ErrorCode::GRID_TOO_SMALL, "need nx >= 5 for spatial stencils");
  const std::int64_t q = g.spatial_stride(axis);
  const std::int64_t nt = g.nt();
  const std::int64_t step = q * nt;
  const std::int64_t p_count = g.spatial_nodes() / (q * n);
  const std::int64_t lines = p_count * q * nt;
  parallel_for_slabs(lines, [&](std::int64_t b, std::int64_t e, int) {
    for (std::int64_t l = b; l < e; ++l) {
      std::int64_t it = l % nt;
      std::int64_t rest = l / nt;
      std::int64_t iq = rest % q;
      std::int64_t ip = rest / q;
      std::int64_t base = (ip * n * q + iq) * nt + it;
      diff_line(v, o, base, step, n, g.hx(axis), order, /*even_reflect=*/false);
    }
  });
  return out;
}

}  // namespace

void diff_series(const double* v, double* out, int n, double h, int order,
                 bool even_reflect_at_zero) {
  require(n >= 5, ErrorCode::GRID_TOO_SMALL, "need at least 5 samples for line stencils");
  diff_line(v, out, 0, 1, n, h, order, even_reflect_at_zero);
}

Field dtt(const Field& f) { return diff_axis(f, -1, 2); }

Field dt(const Field& f) { return diff_axis(f, -1, 1); }

Field dxx(const Field& f, int axis) { return diff_axis(f, axis, 2); }

Field dx(const Field& f, int axis) { return diff_axis(f, axis, 1); }

Field laplacian(const Field& f) {
  Field out = dxx(f, 0);
  for (int a = 1; a < f.grid().dim(); ++a) out += dxx(f, a);
  return out;
}

std::vector<Field> grad(const Field& f) {
  std::vector<Field> out;
  out.reserve(f.grid().dim());
  for (int a = 0; a < f.grid().dim(); ++a) out.push_back(dx(f, a));
  return out;
}

}  // namespace carleman
