#include "carleman/bspline.hpp"

#include <algorithm>
#include <cmath>

namespace carleman {

Spline1D::Spline1D(double a, double b, int degree, int n_interior)
    : a_(a), b_(b), p_(degree), n_interior_(n_interior) {
  require(b > a, ErrorCode::CONFIG_ERROR, "spline interval is degenerate");
  require(degree >= 1, ErrorCode::CONFIG_ERROR, "spline degree must be >= 1");
  require(n_interior >= 0, ErrorCode::CONFIG_ERROR, "negative interior knot count");
  n_basis_ = n_interior_ + p_ + 1;
  double gap = (b - a) / (n_interior_ + 1);
  knots_.reserve(static_cast<std::size_t>(n_basis_ + p_ + 1));
  for (int i = 0; i <= p_; ++i) knots_.push_back(a);
  for (int i = 1; i <= n_interior_; ++i) knots_.push_back(a + gap * i);
  for (int i = 0; i <= p_; ++i) knots_.push_back(b);
}

int Spline1D::find_span(double x) const {
  const int n = n_basis_ - 1;
  if (x >= knots_[static_cast<std::size_t>(n + 1)]) return n;
  if (x <= knots_[static_cast<std::size_t>(p_)]) return p_;
  int lo = p_, hi = n + 1, mid = (lo + hi) / 2;
  while (x < knots_[static_cast<std::size_t>(mid)] ||
         x >= knots_[static_cast<std::size_t>(mid + 1)]) {
    if (x < knots_[static_cast<std::size_t>(mid)]) hi = mid;
    else lo = mid;
    mid = (lo + hi) / 2;
  }
  return mid;
}

// The Piegl-Tiller derivative algorithm; rows above the degree are zero.
void Spline1D::eval_span(double x, int span, int max_order, double* ders) const {
  const int p = p_;
  const int row = p + 1;
  const double* U = knots_.data();
  std::vector<double> ndu(static_cast<std::size_t>(row * row));
  std::vector<double> left(static_cast<std::size_t>(row)), right(static_cast<std::size_t>(row));
  std::vector<double> a(static_cast<std::size_t>(2 * row));

  auto NDU = [&](int i, int j) -> double& { return ndu[static_cast<std::size_t>(i * row + j)]; };
  NDU(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[static_cast<std::size_t>(j)] = x - U[span + 1 - j];
    right[static_cast<std::size_t>(j)] = U[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      NDU(j, r) = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
      double temp = NDU(r, j - 1) / NDU(j, r);
      NDU(r, j) = saved + right[static_cast<std::size_t>(r + 1)] * temp;
      saved = left[static_cast<std::size_t>(j - r)] * temp;
    }
    NDU(j, j) = saved;
  }

  for (int k = 0; k <= max_order; ++k)
    for (int j = 0; j <= p; ++j) ders[k * row + j] = 0.0;
  for (int j = 0; j <= p; ++j) ders[0 * row + j] = NDU(j, p);

  const int nder = std::min(max_order, p);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0] = 1.0;
    for (int k = 1; k <= nder; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[static_cast<std::size_t>(s2 * row)] = a[static_cast<std::size_t>(s1 * row)] / NDU(pk + 1, rk);
        d = a[static_cast<std::size_t>(s2 * row)] * NDU(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[static_cast<std::size_t>(s2 * row + j)] =
            (a[static_cast<std::size_t>(s1 * row + j)] -
             a[static_cast<std::size_t>(s1 * row + j - 1)]) / NDU(pk + 1, rk + j);
        d += a[static_cast<std::size_t>(s2 * row + j)] * NDU(rk + j, pk);
      }
      if (r <= pk) {
        a[static_cast<std::size_t>(s2 * row + k)] =
            -a[static_cast<std::size_t>(s1 * row + k - 1)] / NDU(pk + 1, r);
        d += a[static_cast<std::size_t>(s2 * row + k)] * NDU(r, pk);
      }
      ders[k * row + r] = d;
      std::swap(s1, s2);
    }
  }

  double factor = p;
  for (int k = 1; k <= nder; ++k) {
    for (int j = 0; j <= p; ++j) ders[k * row + j] *= factor;
    factor *= (p - k);
  }
}

double Spline1D::eval(int i, double x, int der) const {
  if (x < knot(i) || x > knot(i + p_ + 1)) return 0.0;
  int span = find_span(x);
  if (i < span - p_ || i > span) return 0.0;
  std::vector<double> ders(static_cast<std::size_t>((der + 1) * (p_ + 1)));
  eval_span(x, span, der, ders.data());
  return ders[static_cast<std::size_t>(der * (p_ + 1) + (i - (span - p_)))];
}

GaussRule gauss_rule(int n) {
  GaussRule r;
  switch (n) {
    case 1: r.x = {0.0}; r.w = {2.0}; break;
    case 2: {
      double a = 1.0 / std::sqrt(3.0);
      r.x = {-a, a}; r.w = {1.0, 1.0};
      break;
    }
    case 3: {
      double a = std::sqrt(3.0 / 5.0);
      r.x = {-a, 0.0, a}; r.w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    }
    case 4: {
      double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      r.x = {-b, -a, a, b}; r.w = {wb, wa, wa, wb};
      break;
    }
    case 5: {
      double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
      double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      r.x = {-b, -a, 0.0, a, b}; r.w = {wb, wa, 128.0 / 225.0, wa, wb};
      break;
    }
    case 6: {
      r.x = {-0.9324695142031520278123016, -0.6612093864662645136613996,
             -0.2386191860831969086305017, 0.2386191860831969086305017,
             0.6612093864662645136613996, 0.9324695142031520278123016};
      r.w = {0.1713244923791703450402961, 0.3607615730481386075698335,
             0.4679139345726910473898703, 0.4679139345726910473898703,
             0.3607615730481386075698335, 0.1713244923791703450402961};
      break;
    }
    case 7: {
      r.x = {-0.9491079123427585245261897, -0.7415311855993944398638648,
             -0.4058451513773971669066064, 0.0,
             0.4058451513773971669066064, 0.7415311855993944398638648,
             0.9491079123427585245261897};
      r.w = {0.1294849661688696932706114, 0.2797053914892766679014678,
             0.3818300505051189449503698, 0.4179591836734693877551020,
             0.3818300505051189449503698, 0.2797053914892766679014678,
             0.1294849661688696932706114};
      break;
    }
    case 8: {
      r.x = {-0.9602898564975362316835609, -0.7966664774136267395915539,
             -0.5255324099163289858177390, -0.1834346424956498049394761,
             0.1834346424956498049394761, 0.5255324099163289858177390,
             0.7966664774136267395915539, 0.9602898564975362316835609};
      r.w = {0.1012285362903762591525314, 0.2223810344533744705443560,
             0.3137066458778872873379622, 0.3626837833783619829651504,
             0.3626837833783619829651504, 0.3137066458778872873379622,
             0.2223810344533744705443560, 0.1012285362903762591525314};
      break;
    }
    default:
      fail(ErrorCode::CONFIG_ERROR, "gauss rule supports up to 8 points");
  }
  return r;
}

AxisBasis::AxisBasis(double a, double b, int degree, int count, Kind kind)
    : kind_(kind), count_(count),
      spline_(a, b, degree,
              kind == Kind::SpatialZeroPair ? count + 3 - degree : count - degree) {
  require(count >= 1, ErrorCode::CONFIG_ERROR, "axis basis needs at least one function");
  if (kind == Kind::SpatialZeroPair)
    require(count + 3 - degree >= 0, ErrorCode::CONFIG_ERROR,
            "spatial axis needs count >= degree - 3");
  else
    require(count - degree >= 0, ErrorCode::CONFIG_ERROR, "time axis needs count >= degree");
}

double AxisBasis::eval(int i, double x, int der) const {
  if (kind_ == Kind::SpatialZeroPair) return spline_.eval(i + 2, x, der);
  if (i == 0) return spline_.eval(0, x, der) + spline_.eval(1, x, der);
  return spline_.eval(i + 1, x, der);
}

std::pair<double, double> AxisBasis::support(int i) const {
  if (kind_ == Kind::SpatialZeroPair)
    return {spline_.support_lo(i + 2), spline_.support_hi(i + 2)};
  if (i == 0) return {spline_.support_lo(0), spline_.support_hi(1)};
  return {spline_.support_lo(i + 1), spline_.support_hi(i + 1)};
}

std::pair<int, int> AxisBasis::node_window(int i, int n, double lo, double h) const {
  auto [slo, shi] = support(i);
  int first = static_cast<int>(std::ceil((slo - lo) / h - 1e-9));
  int last = static_cast<int>(std::floor((shi - lo) / h + 1e-9));
  first = std::max(first, 0);
  last = std::min(last, n - 1);
  return {first, last};
}

Eigen::MatrixXd AxisBasis::gram(int order) const {
  const int p = spline_.degree();
  GaussRule gr = gauss_rule(std::min(p + 1, 8));
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(count_, count_);
  std::vector<double> vals(static_cast<std::size_t>(count_));
  for (int s = 0; s < spline_.n_spans(); ++s) {
    double lo = spline_.span_lo(s), hi = spline_.span_hi(s);
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t q = 0; q < gr.x.size(); ++q) {
      double x = mid + half * gr.x[q];
      double w = half * gr.w[q];
      for (int i = 0; i < count_; ++i) vals[static_cast<std::size_t>(i)] = eval(i, x, order);
      for (int i = 0; i < count_; ++i) {
        double vi = vals[static_cast<std::size_t>(i)];
        if (vi == 0.0) continue;
        for (int j = i; j < count_; ++j) G(i, j) += w * vi * vals[static_cast<std::size_t>(j)];
      }
    }
  }
  for (int i = 0; i < count_; ++i)
    for (int j = 0; j < i; ++j) G(i, j) = G(j, i);
  return G;
}

}  // namespace carleman
