#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace carleman {

// C^3 polynomial step: 0 for x <= 0, 1 for x >= 1, three vanishing
// derivatives at both ends.
inline double smoothstep3(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double x2 = x * x;
  return x2 * x2 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)));
}

// Cutoff chi(rho): 1 at rho = 0 with chi'(0) = 0, identically 0 for
// rho >= ell, C^3 across both ends.
inline double cutoff_chi(double rho, double ell) {
  return smoothstep3(1.0 - rho / ell);
}

// Plateau over [lo_in, hi_in], falling to 0 outside [lo_out, hi_out].
inline double plateau(double x, double lo_out, double lo_in, double hi_in, double hi_out) {
  if (x < lo_in) return smoothstep3((x - lo_out) / (lo_in - lo_out));
  if (x > hi_in) return smoothstep3((hi_out - x) / (hi_out - hi_in));
  return 1.0;
}

// Deterministic uniform draws decoupled from libstdc++ distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  double symmetric() { return 2.0 * uniform01() - 1.0; }  // uniform on [-1,1]
  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Seed for sample `index` of a named experiment, derived from the master seed.
std::uint64_t derive_seed(std::uint64_t master, const std::string& tag, std::uint64_t index);

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64(const std::string& s);

// Least-squares line y ~ a + b x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

std::string format_double(double v);  // round-trip %.17g

}  // namespace carleman
