#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's numerics.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double ln2 = 0.69314718055994530942;

// Composite Simpson rule with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Intensity of the collective coherence of a Gaussian detuning
// distribution of FWHM `fwhm_hz`, at time t, by direct quadrature.
inline double gaussian_line_intensity(double fwhm_hz, double t) {
  const double sigma = fwhm_hz / (2.0 * std::sqrt(2.0 * ln2));
  auto g = [&](double d) { return std::exp(-0.5 * d * d / (sigma * sigma)); };
  const double lim = 10.0 * sigma;
  const double norm = simpson(g, -lim, lim, 20000);
  const double re =
      simpson([&](double d) { return g(d) * std::cos(2.0 * pi * d * t); }, -lim, lim, 20000);
  const double im =
      simpson([&](double d) { return g(d) * std::sin(2.0 * pi * d * t); }, -lim, lim, 20000);
  return (re * re + im * im) / (norm * norm);
}

// Plain long-double sum of w exp(-i 2 pi d t) / sum w.
inline std::complex<double> dephasing(const std::vector<double>& d, const std::vector<double>& w,
                                      double t) {
  long double re = 0, im = 0, total = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const long double ph = -2.0L * static_cast<long double>(pi) * d[i] * t;
    re += w[i] * std::cos(ph);
    im += w[i] * std::sin(ph);
    total += w[i];
  }
  return {static_cast<double>(re / total), static_cast<double>(im / total)};
}

// Closed-form two-level AFC efficiency of square teeth of optical depth d
// and finesse F on a background d0.
inline double square_comb_efficiency(double d, double finesse, double d0) {
  const double de = d / finesse;
  const double x = pi / finesse;
  return de * de * std::exp(-de) * std::pow(std::sin(x) / x, 2) * std::exp(-d0);
}

struct Vec3 {
  double u, v, w;
};

// Resonant-frame Bloch equations for a sech pulse with tanh chirp, brute
// force RK4 with `steps` steps over [t0 - dur/2, t0 + dur/2].
// rabi in rad/s, chirp and detuning in Hz.
inline Vec3 chs_bloch(double rabi, double duration, double chirp_hz, double detuning_hz,
                      double phase, Vec3 r, int steps) {
  const double beta = 10.6 / duration;
  const double mu = pi * chirp_hz / beta;
  auto f = [&](double t, const Vec3& x) {
    const double om = rabi / std::cosh(beta * t);
    const double chirp = mu * beta * std::tanh(beta * t);  // rad/s
    const double d = 2.0 * pi * detuning_hz - chirp;
    const double ox = om * std::cos(phase), oy = om * std::sin(phase);
    return Vec3{-d * x.v - oy * x.w, d * x.u + ox * x.w, -ox * x.v + oy * x.u};
  };
  const double a = -0.5 * duration;
  const double h = duration / steps;
  for (int n = 0; n < steps; ++n) {
    const double t = a + n * h;
    const Vec3 k1 = f(t, r);
    const Vec3 k2 = f(t + h / 2, {r.u + h / 2 * k1.u, r.v + h / 2 * k1.v, r.w + h / 2 * k1.w});
    const Vec3 k3 = f(t + h / 2, {r.u + h / 2 * k2.u, r.v + h / 2 * k2.v, r.w + h / 2 * k2.w});
    const Vec3 k4 = f(t + h, {r.u + h * k3.u, r.v + h * k3.v, r.w + h * k3.w});
    r.u += h / 6 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u);
    r.v += h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
    r.w += h / 6 * (k1.w + 2 * k2.w + 2 * k3.w + k4.w);
  }
  return r;
}

// Hand-evaluated rate map: every level loses r_k p_k to the excited
// state, which decays back with the branching weights.
inline std::vector<double> rate_map(std::vector<double> p, const std::vector<double>& r,
                                    const std::vector<double>& branching) {
  double excited = 0.0;
  for (int k = 0; k < 3; ++k) {
    excited += r[k] * p[k];
    p[k] -= r[k] * p[k];
  }
  for (int k = 0; k < 3; ++k) p[k] += branching[k] * excited;
  return p;
}

// Seeded generator for property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
};

}  // namespace oracle
