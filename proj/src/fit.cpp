#include "memsim/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include "memsim/errors.hpp"
#include "memsim/format.hpp"

namespace memsim {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kMaxIterations = 200;
constexpr double kRelativeStep = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

using Evaluate = std::function<void(const VectorXd& p, VectorXd& r, MatrixXd& jac)>;

struct LmOutcome {
  VectorXd params;
  double ssr{0.0};
  bool converged{false};
  int iterations{0};
};

// Damped Gauss-Newton with Marquardt's diagonal scaling.
LmOutcome levenberg_marquardt(const Evaluate& evaluate, VectorXd p) {
  VectorXd r;
  MatrixXd jac;
  evaluate(p, r, jac);
  double ssr = r.squaredNorm();
  double lambda = 1e-3;
  LmOutcome out;
  for (int it = 1; it <= kMaxIterations; ++it) {
    out.iterations = it;
    if (ssr == 0.0) {
      out.converged = true;
      break;
    }
    const MatrixXd a = jac.transpose() * jac;
    const VectorXd g = jac.transpose() * r;
    bool accepted = false;
    while (!accepted && lambda < 1e16) {
      MatrixXd damped = a;
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        damped(i, i) += lambda * std::max(a(i, i), 1e-300);
      const VectorXd step = damped.ldlt().solve(-g);
      const VectorXd trial = p + step;
      VectorXd r_trial;
      MatrixXd jac_trial;
      evaluate(trial, r_trial, jac_trial);
      const double ssr_trial = r_trial.squaredNorm();
      if (std::isfinite(ssr_trial) && ssr_trial <= ssr) {
        bool small = true;
        for (Eigen::Index i = 0; i < p.size(); ++i)
          if (std::abs(step[i]) > kRelativeStep * (std::abs(p[i]) + kRelativeStep))
            small = false;
        p = trial;
        r = std::move(r_trial);
        jac = std::move(jac_trial);
        ssr = ssr_trial;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (small) out.converged = true;
      } else {
        lambda *= 10.0;
      }
    }
    // No downhill step at any damping: a numerical minimum.
    if (!accepted) out.converged = true;
    if (out.converged) break;
  }
  out.params = p;
  out.ssr = ssr;
  return out;
}

// 1-sigma errors from s^2 (J^T J)^-1; directions the data do not constrain
// get an infinite error.
VectorXd standard_errors(const MatrixXd& jac, double ssr) {
  const auto m = jac.rows();
  const auto n = jac.cols();
  const double s2 = m > n ? ssr / static_cast<double>(m - n) : 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(jac, Eigen::ComputeThinV);
  const VectorXd sv = svd.singularValues();
  const MatrixXd v = svd.matrixV();
  const double cutoff = 1e-12 * (sv.size() > 0 ? sv[0] : 0.0);
  VectorXd var = VectorXd::Zero(n);
  VectorXd out(n);
  std::vector<bool> unconstrained(static_cast<std::size_t>(n), false);
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (sv[k] > cutoff)
        var[i] += v(i, k) * v(i, k) / (sv[k] * sv[k]);
      else if (std::abs(v(i, k)) > 1e-8)
        unconstrained[static_cast<std::size_t>(i)] = true;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    out[i] = unconstrained[static_cast<std::size_t>(i)] ? kInf : std::sqrt(s2 * var[i]);
  return out;
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ConfigError(std::string(what) + ": input lengths differ");
}

// ln(y) = intercept + slope x by ordinary least squares; y0 = exp(intercept)
// and the time constant is -factor / slope.
FitResult log_linear_decay(std::span<const double> x, std::span<const double> y,
                           double factor, const std::string& amplitude_name,
                           const std::string& time_name, const char* what) {
  require_same_size(x.size(), y.size(), what);
  if (x.size() < 3) throw ConfigError(std::string(what) + ": need at least 3 points");
  for (double v : y)
    if (!(v > 0.0)) throw DomainError(std::string(what) + ": values must be positive");

  const auto m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    ly[i] = std::log(y[i]);
    mx += x[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError(std::string(what) + ": abscissae are all equal");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = ly[i] - (intercept + slope * x[i]);
    ssr += e * e;
  }
  const double s2 = ssr / (m - 2.0);
  const double se_slope = std::sqrt(s2 / sxx);
  const double se_intercept = std::sqrt(s2 * (1.0 / m + mx * mx / sxx));

  FitResult fit;
  fit.iterations = 1;
  fit.residual_norm = std::sqrt(ssr);
  const double y0 = std::exp(intercept);
  fit.params[amplitude_name] = y0;
  fit.std_errors[amplitude_name] = y0 * se_intercept;
  if (slope < 0.0) {
    fit.params[time_name] = -factor / slope;
    fit.std_errors[time_name] = factor * se_slope / (slope * slope);
    fit.converged = true;
  } else {
    fit.params[time_name] = kInf;
    fit.std_errors[time_name] = kInf;
    fit.converged = false;
    fit.warnings.push_back("no decay: infinite " + time_name);
  }
  return fit;
}

}  // namespace

FitResult fit_sinusoid(std::span<const double> phases,
                       std::span<const double> intensities) {
  require_same_size(phases.size(), intensities.size(), "fit_sinusoid");
  const auto m = static_cast<Eigen::Index>(phases.size());
  if (m < 6) throw ConfigError("fit_sinusoid: need at least 6 points");
  const auto [pmin, pmax] = std::minmax_element(phases.begin(), phases.end());
  if (*pmax - *pmin < 1.5 * std::numbers::pi - 1e-12)
    throw ConfigError("fit_sinusoid: phases must span at least 1.5 pi");

  // Seed from the first Fourier component: I = a + b sin(phi) + c cos(phi).
  MatrixXd design(m, 3);
  VectorXd data(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = std::sin(phases[i]);
    design(i, 2) = std::cos(phases[i]);
    data[i] = intensities[i];
  }
  const VectorXd abc = design.colPivHouseholderQr().solve(data);
  double i_max = 2.0 * abc[0];
  double vis = 0.0;
  double phi1 = 0.0;
  if (abc[0] > 0.0) {
    vis = std::hypot(abc[1], abc[2]) / abc[0];
    phi1 = std::atan2(abc[2], abc[1]);
  } else {
    i_max = 2.0 * data.cwiseAbs().mean();
  }
  const double theta0 = std::asin(std::sqrt(std::clamp(vis, 0.0, 1.0)));

  // Fit in (I_max, theta, phi1) with V = sin^2(theta).
  const Evaluate eval = [&](const VectorXd& p, VectorXd& r, MatrixXd& jac) {
    const double v = std::sin(p[1]) * std::sin(p[1]);
    r.resize(m);
    jac.resize(m, 3);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double s = std::sin(phases[i] + p[2]);
      const double c = std::cos(phases[i] + p[2]);
      r[i] = 0.5 * p[0] * (1.0 + v * s) - data[i];
      jac(i, 0) = 0.5 * (1.0 + v * s);
      jac(i, 1) = 0.5 * p[0] * s * std::sin(2.0 * p[1]);
      jac(i, 2) = 0.5 * p[0] * v * c;
    }
  };
  const LmOutcome lm = levenberg_marquardt(eval, VectorXd{{i_max, theta0, phi1}});

  i_max = lm.params[0];
  vis = std::sin(lm.params[1]) * std::sin(lm.params[1]);
  phi1 = std::remainder(lm.params[2], 2.0 * std::numbers::pi);

  // Errors in the natural parameters.
  MatrixXd jac(m, 3);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = std::sin(phases[i] + phi1);
    jac(i, 0) = 0.5 * (1.0 + vis * s);
    jac(i, 1) = 0.5 * i_max * s;
    jac(i, 2) = 0.5 * i_max * vis * std::cos(phases[i] + phi1);
  }
  const VectorXd se = standard_errors(jac, lm.ssr);

  FitResult fit;
  fit.params = {{"I_max", i_max}, {"V", vis}, {"phi1", phi1}};
  fit.std_errors = {{"I_max", se[0]}, {"V", se[1]}, {"phi1", se[2]}};
  fit.residual_norm = std::sqrt(lm.ssr);
  fit.converged = lm.converged;
  fit.iterations = lm.iterations;
  if (!lm.converged) fit.warnings.push_back("iteration limit reached");
  return fit;
}

FitResult fit_exp_decay(std::span<const double> times,
                        std::span<const double> amplitudes) {
  return log_linear_decay(times, amplitudes, 2.0, "A0", "T2", "fit_exp_decay");
}

FitResult fit_rose_decay(std::span<const double> taus,
                         std::span<const double> efficiencies) {
  return log_linear_decay(taus, efficiencies, 4.0, "eta0", "T2eff", "fit_rose_decay");
}

FitResult fit_gaussian_decay(std::span<const double> taus,
                             std::span<const double> amplitudes) {
  require_same_size(taus.size(), amplitudes.size(), "fit_gaussian_decay");
  // Log-linear in tau^2 for the seed.
  std::vector<double> tau2(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) tau2[i] = taus[i] * taus[i];
  FitResult seed = log_linear_decay(tau2, amplitudes, 1.0, "A0", "inv", "fit_gaussian_decay");
  if (!seed.converged) {
    FitResult fit;
    fit.params = {{"A0", seed["A0"]}, {"T2star", kInf}};
    fit.std_errors = {{"A0", seed.error("A0")}, {"T2star", kInf}};
    fit.residual_norm = seed.residual_norm;
    fit.warnings.push_back("no decay: infinite T2star");
    return fit;
  }
  const double t_scale = std::sqrt(seed["inv"]);
  const auto m = static_cast<Eigen::Index>(taus.size());

  // Time in units of the seed T2star.
  const Evaluate eval = [&](const VectorXd& p, VectorXd& r, MatrixXd& jac) {
    r.resize(m);
    jac.resize(m, 2);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double x = taus[i] / t_scale / p[1];
      const double e = std::exp(-x * x);
      r[i] = p[0] * e - amplitudes[i];
      jac(i, 0) = e;
      jac(i, 1) = p[0] * e * 2.0 * x * x / p[1];
    }
  };
  const LmOutcome lm = levenberg_marquardt(eval, VectorXd{{seed["A0"], 1.0}});
  VectorXd r;
  MatrixXd jac;
  eval(lm.params, r, jac);
  const VectorXd se = standard_errors(jac, lm.ssr);

  FitResult fit;
  fit.params = {{"A0", lm.params[0]}, {"T2star", lm.params[1] * t_scale}};
  fit.std_errors = {{"A0", se[0]}, {"T2star", se[1] * t_scale}};
  fit.residual_norm = std::sqrt(lm.ssr);
  fit.converged = lm.converged;
  fit.iterations = lm.iterations;
  return fit;
}

FitResult fit_gaussian_profile(const AbsorptionProfile& profile) {
  profile.validate();
  const auto& grid = profile.grid;
  const auto m = static_cast<Eigen::Index>(grid.size());
  if (m < 7) throw ConfigError("fit_gaussian_profile: need at least 7 points");

  double total = 0.0, first = 0.0, peak = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double w = profile.od[static_cast<std::size_t>(i)];
    total += w;
    first += w * grid.at(static_cast<std::size_t>(i));
    peak = std::max(peak, w);
  }
  FitResult fit;
  if (!(total > 0.0)) {
    fit.warnings.push_back("empty profile");
    fit.params = {{"peak_od", 0.0}, {"center", 0.0}, {"fwhm", 0.0}};
    fit.std_errors = {{"peak_od", kInf}, {"center", kInf}, {"fwhm", kInf}};
    return fit;
  }
  const double center0 = first / total;
  double second = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double d = grid.at(static_cast<std::size_t>(i)) - center0;
    second += profile.od[static_cast<std::size_t>(i)] * d * d;
  }
  const double sigma0 = std::sqrt(second / total);
  const double fwhm0 = 2.0 * std::sqrt(2.0 * std::numbers::ln2) * sigma0;
  if (fwhm0 < 3.0 * grid.step()) {
    fit.params = {{"peak_od", peak}, {"center", center0}, {"fwhm", fwhm0}};
    fit.std_errors = {{"peak_od", kInf}, {"center", kInf}, {"fwhm", kInf}};
    fit.warnings.push_back("profile narrower than 3 bins: resolution limited");
    return fit;
  }

  // Detuning measured from the moment centre in units of the moment FWHM.
  const double k = 4.0 * std::numbers::ln2;
  const Evaluate eval = [&](const VectorXd& p, VectorXd& r, MatrixXd& jac) {
    r.resize(m);
    jac.resize(m, 3);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double x = (grid.at(static_cast<std::size_t>(i)) - center0) / fwhm0;
      const double u = (x - p[1]) / p[2];
      const double e = std::exp(-k * u * u);
      r[i] = p[0] * e - profile.od[static_cast<std::size_t>(i)];
      jac(i, 0) = e;
      jac(i, 1) = p[0] * e * 2.0 * k * u / p[2];
      jac(i, 2) = p[0] * e * 2.0 * k * u * u / p[2];
    }
  };
  const LmOutcome lm = levenberg_marquardt(eval, VectorXd{{peak, 0.0, 1.0}});
  VectorXd r;
  MatrixXd jac;
  eval(lm.params, r, jac);
  const VectorXd se = standard_errors(jac, lm.ssr);

  const double fwhm = std::abs(lm.params[2]) * fwhm0;
  fit.params = {{"peak_od", lm.params[0]},
                {"center", center0 + lm.params[1] * fwhm0},
                {"fwhm", fwhm}};
  fit.std_errors = {{"peak_od", se[0]}, {"center", se[1] * fwhm0}, {"fwhm", se[2] * fwhm0}};
  fit.residual_norm = std::sqrt(lm.ssr);
  fit.converged = lm.converged;
  fit.iterations = lm.iterations;
  if (fwhm < 3.0 * grid.step()) {
    fit.converged = false;
    fit.warnings.push_back("profile narrower than 3 bins: resolution limited");
  }
  if (grid.span() < fwhm) fit.warnings.push_back("grid spans less than one FWHM");
  return fit;
}

void write_fit_report(std::ostream& out, const FitResult& fit) {
  for (const auto& [name, value] : fit.params)
    out << "param." << name << '=' << format_double(value) << '\n';
  for (const auto& [name, value] : fit.std_errors)
    out << "stderr." << name << '=' << format_double(value) << '\n';
  out << "residual=" << format_double(fit.residual_norm) << '\n';
  out << "converged=" << (fit.converged ? "true" : "false") << '\n';
}

FitResult read_fit_report(std::istream& in) {
  FitResult fit;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("fit report: malformed line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key.rfind("param.", 0) == 0)
      fit.params[key.substr(6)] = std::stod(value);
    else if (key.rfind("stderr.", 0) == 0)
      fit.std_errors[key.substr(7)] = std::stod(value);
    else if (key == "residual")
      fit.residual_norm = std::stod(value);
    else if (key == "converged")
      fit.converged = value == "true";
    else
      throw ConfigError("fit report: unknown key '" + key + "'");
  }
  return fit;
}

}  // namespace memsim
