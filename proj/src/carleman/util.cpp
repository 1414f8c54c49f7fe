#include "carleman/util.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

namespace carleman {

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::uint64_t derive_seed(std::uint64_t master, const std::string& tag, std::uint64_t index) {
  std::uint64_t h = fnv1a64(tag);
  h ^= master + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  h ^= index + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  // splitmix64 finalizer
  h += 0x9e3779b97f4a7c15ull;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
  return h ^ (h >> 31);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit out;
  const std::size_t n = x.size();
  if (n < 2) return out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) {
    out.intercept = sy / n;
    return out;
  }
  out.slope = (n * sxy - sx * sy) / denom;
  out.intercept = (sy - out.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - (out.intercept + out.slope * x[i]);
    ss += r * r;
  }
  out.rms_residual = std::sqrt(ss / n);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace carleman
