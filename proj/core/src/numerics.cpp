#include "sgsteer/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

namespace sgsteer {

namespace {

// Gauss-Kronrod 7/15 abscissae on [0, 1); odd indices are shared with the
// 7-point Gauss rule, index 7 is the midpoint.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  Complex value;
  double error;

  bool operator<(const Segment& other) const { return error < other.error; }
};

Complex checked(const ComplexIntegrand& f, double x) {
  const Complex v = f(x);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw QuadratureError("integrand is not finite at x = " + std::to_string(x));
  }
  return v;
}

Segment gauss_kronrod(const ComplexIntegrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const Complex fc = checked(f, center);
  Complex kronrod = fc * kWgk[7];
  Complex gauss = fc * kWg[3];

  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const Complex sum = checked(f, center - dx) + checked(f, center + dx);
    kronrod += sum * kWgk[j];
    if (j % 2 == 1) gauss += sum * kWg[j / 2];
  }

  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(std::isfinite(lower) && std::isfinite(upper) && lower < upper)) {
    throw std::invalid_argument("QuadratureSpec: require finite lower < upper");
  }
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
  }
  if (max_subdivisions < 1) {
    throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
  }
}

QuadratureResult integrate_complex_detailed(const ComplexIntegrand& f, const QuadratureSpec& spec) {
  spec.validate();

  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod(f, spec.lower, spec.upper);
  Complex total = first.value;
  double error = first.error;
  heap.push(first);

  int subdivisions = 0;
  auto converged = [&] { return error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

  while (!converged()) {
    if (subdivisions >= spec.max_subdivisions) {
      throw QuadratureError("integrate_complex: no convergence after " +
                            std::to_string(subdivisions) + " subdivisions (error estimate " +
                            std::to_string(error) + ")");
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left = gauss_kronrod(f, worst.a, mid);
    Segment right = gauss_kronrod(f, mid, worst.b);

    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;

    // Running sums drift; resum once the estimate gets close to the target.
    if (converged()) {
      total = Complex{};
      error = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        total += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
    }
  }
  return {total, error, subdivisions};
}

double integrate_real(const std::function<double(double)>& f, const QuadratureSpec& spec) {
  return integrate_complex([&f](double x) { return Complex{f(x), 0.0}; }, spec).real();
}

QuadratureSpec gaussian_window(double center, double std_dev) {
  QuadratureSpec spec;
  spec.lower = center - kGaussianTailSigmas * std_dev;
  spec.upper = center + kGaussianTailSigmas * std_dev;
  return spec;
}

QuadratureSpec gaussian_window(double center_a, double center_b, double std_dev) {
  QuadratureSpec spec;
  spec.lower = std::min(center_a, center_b) - kGaussianTailSigmas * std_dev;
  spec.upper = std::max(center_a, center_b) + kGaussianTailSigmas * std_dev;
  return spec;
}

Complex gaussian_integral(Complex a, Complex beta, Complex gamma) {
  if (!(a.real() > 0.0)) {
    throw std::domain_error("gaussian_integral: Re(a) must be positive");
  }
  return std::sqrt(std::numbers::pi / a) * std::exp(beta * beta / (4.0 * a) + gamma);
}

namespace {

// log of the integral of conj(g1) g2 with both normalisation constants set to 1.
Complex log_raw_overlap(const Gaussian1D& g1, const Gaussian1D& g2) {
  const Complex w1 = std::conj(g1.inverse_width);
  const Complex c1 = std::conj(g1.center);
  const Complex& w2 = g2.inverse_width;
  const Complex& c2 = g2.center;

  const Complex a = w1 + w2;
  const Complex beta = 2.0 * w1 * c1 + 2.0 * w2 * c2 + kI * (g2.phase_slope - g1.phase_slope);
  const Complex gamma = -w1 * c1 * c1 - w2 * c2 * c2;
  return 0.5 * std::log(std::numbers::pi / a) + beta * beta / (4.0 * a) + gamma;
}

void require_normalisable(const Gaussian1D& g) {
  if (!(g.inverse_width.real() > 0.0) || !std::isfinite(g.inverse_width.imag()) ||
      !std::isfinite(g.center.real()) || !std::isfinite(g.center.imag()) ||
      !std::isfinite(g.phase_slope)) {
    throw std::domain_error("gaussian_overlap_analytic: Gaussian is not normalisable");
  }
}

}  // namespace

Complex gaussian_overlap_analytic(const Gaussian1D& g1, const Gaussian1D& g2) {
  require_normalisable(g1);
  require_normalisable(g2);
  const double log_norm1 = log_raw_overlap(g1, g1).real();
  const double log_norm2 = log_raw_overlap(g2, g2).real();
  return std::exp(log_raw_overlap(g1, g2) - 0.5 * (log_norm1 + log_norm2));
}

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t RngStream::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), base_(mix(seed ^ mix(stream_id + kGolden))) {}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix(base_ + counter_ * kGolden);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sgsteer
