#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace sgsteer {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Raised when adaptive quadrature exhausts its subdivision budget.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureSpec {
  double lower = -1.0;
  double upper = 1.0;
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int max_subdivisions = 2000;

  /// Throws std::invalid_argument unless lower < upper, tolerances > 0 and
  /// max_subdivisions >= 1.
  void validate() const;
};

struct QuadratureResult {
  Complex value;
  double error_estimate = 0.0;
  int subdivisions = 0;
};

using ComplexIntegrand = std::function<Complex(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) integration of a complex-valued
/// integrand. The interval with the largest error estimate is bisected until
/// the summed estimate drops below max(abs_tol, rel_tol * |value|).
///
/// Throws QuadratureError if the budget is exhausted, or if the integrand
/// returns a non-finite value.
QuadratureResult integrate_complex_detailed(const ComplexIntegrand& f, const QuadratureSpec& spec);

inline Complex integrate_complex(const ComplexIntegrand& f, const QuadratureSpec& spec) {
  return integrate_complex_detailed(f, spec).value;
}

/// Real-valued convenience wrapper.
double integrate_real(const std::function<double(double)>& f, const QuadratureSpec& spec);

/// Number of effective standard deviations kept when truncating an infinite
/// Gaussian domain.
inline constexpr double kGaussianTailSigmas = 12.0;

/// Window [center - 12 sd, center + 12 sd] with the default tolerances.
QuadratureSpec gaussian_window(double center, double std_dev);

/// Window spanning two Gaussian windows.
QuadratureSpec gaussian_window(double center_a, double center_b, double std_dev);

/// g(z) = exp(-inverse_width (z - center)^2 + i phase_slope z), up to a
/// positive normalisation constant chosen so that the integral of |g|^2 is 1.
struct Gaussian1D {
  Complex center;
  Complex inverse_width;
  double phase_slope = 0.0;
};

/// Closed form of the integral of exp(-a z^2 + beta z + gamma) over the real
/// line, Re(a) > 0.
Complex gaussian_integral(Complex a, Complex beta, Complex gamma);

/// <g1|g2> for unit-normalised Gaussians. Throws std::domain_error if either
/// inverse width has non-positive real part.
Complex gaussian_overlap_analytic(const Gaussian1D& g1, const Gaussian1D& g2);

/// Counter-based SplitMix64 stream.
///
/// The n-th draw (n = 1, 2, ...) of stream (seed, stream_id) is
///   mix(base + n * 0x9E3779B97F4A7C15)
/// with base = mix(seed ^ mix(stream_id + 0x9E3779B97F4A7C15)) and mix the
/// SplitMix64 finaliser
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z =  z ^ (z >> 31)
/// All arithmetic is modulo 2^64. Uniform doubles take the top 53 bits.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

inline double rng_uniform(RngStream& stream) { return stream.uniform(); }

}  // namespace sgsteer
