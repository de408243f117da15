#include "mrplan/gp.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "mrplan/error.hpp"

namespace mrplan {

namespace {

constexpr int kSpdRetries = 3;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::MatrixXd unit_kernel_matrix(std::span<const double> x, double length_scale) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd e(n, n);
  const double inv = 1.0 / (2.0 * length_scale * length_scale);
  for (Eigen::Index i = 0; i < n; ++i) {
    e(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double d = x[i] - x[j];
      e(i, j) = e(j, i) = std::exp(-d * d * inv);
    }
  }
  return e;
}

// LML given the unit-variance SE matrix; -inf when the covariance is not SPD.
double lml_from_unit(const Eigen::MatrixXd& unit, const Eigen::VectorXd& y, double signal_var, double noise_var) {
  const auto n = unit.rows();
  Eigen::MatrixXd k = signal_var * unit;
  k.diagonal().array() += noise_var;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return kNegInf;
  const Eigen::VectorXd alpha = llt.solve(y);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double v = -0.5 * y.dot(alpha) - 0.5 * log_det - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  return std::isfinite(v) ? v : kNegInf;
}

// Spectral form of the unit SE matrix: with E = Q diag(λ) Qᵀ, every
// ς_f² E + ς_n² I shares Q, so the LML for any variance pair costs O(n).
struct UnitSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd projected_sq;  // (Qᵀ y)²

  UnitSpectrum(const Eigen::MatrixXd& unit, const Eigen::VectorXd& y) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(unit);
    eigenvalues = es.eigenvalues();
    projected_sq = (es.eigenvectors().transpose() * y).array().square();
  }

  double lml(double signal_var, double noise_var) const {
    const auto n = eigenvalues.size();
    double fit = 0.0, log_det = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = signal_var * eigenvalues(i) + noise_var;
      if (!(d > 0.0)) return kNegInf;
      fit += projected_sq(i) / d;
      log_det += std::log(d);
    }
    const double v = -0.5 * fit - 0.5 * log_det - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    return std::isfinite(v) ? v : kNegInf;
  }
};

Eigen::VectorXd to_vector(std::span<const double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

}  // namespace

bool Hyperparams::valid() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  return ok(length_scale) && ok(signal_var) && ok(noise_var);
}

double kernel(double a, double b, const Hyperparams& theta) {
  const double d = a - b;
  return theta.signal_var * std::exp(-0.5 * d * d / (theta.length_scale * theta.length_scale));
}

GpModel::GpModel(Hyperparams theta) : theta_(theta), noise_used_(theta.noise_var) {
  if (!theta_.valid()) throw Error("GP hyperparameters must be finite and strictly positive");
}

GpModel::GpModel(std::vector<double> inputs, std::vector<double> targets, Hyperparams theta)
    : x_(std::move(inputs)), y_(std::move(targets)), theta_(theta), noise_used_(theta.noise_var) {
  if (!theta_.valid()) throw Error("GP hyperparameters must be finite and strictly positive");
  if (x_.size() != y_.size()) throw Error("GP inputs and targets differ in length");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) throw Error("GP training data must be finite");
  }
  factorize();
}

void GpModel::factorize() {
  if (x_.empty()) return;
  const Eigen::MatrixXd unit = unit_kernel_matrix(x_, theta_.length_scale);
  double noise = theta_.noise_var;
  for (int attempt = 0; attempt <= kSpdRetries; ++attempt) {
    Eigen::MatrixXd k = theta_.signal_var * unit;
    k.diagonal().array() += noise;
    llt_.compute(k);
    if (llt_.info() == Eigen::Success) {
      noise_used_ = noise;
      alpha_ = llt_.solve(to_vector(y_));
      return;
    }
    noise *= 2.0;
  }
  throw Error("GP covariance is not positive definite after " + std::to_string(kSpdRetries) + " noise doublings");
}

Prediction GpModel::predict(double query) const {
  if (x_.empty()) return {0.0, theta_.signal_var};
  const auto n = static_cast<Eigen::Index>(x_.size());
  Eigen::VectorXd ks(n);
  for (Eigen::Index i = 0; i < n; ++i) ks(i) = kernel(query, x_[i], theta_);
  const double mean = ks.dot(alpha_);
  const Eigen::VectorXd v = llt_.matrixL().solve(ks);
  const double var = std::max(0.0, theta_.signal_var - v.squaredNorm());
  return {mean, var};
}

std::vector<Prediction> GpModel::posterior(std::span<const double> queries) const {
  std::vector<Prediction> out;
  out.reserve(queries.size());
  for (double q : queries) out.push_back(predict(q));
  return out;
}

GpModel add_observation(const GpModel& model, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) throw Error("GP observation must be finite");
  auto xs = model.inputs();
  auto ys = model.targets();
  xs.push_back(x);
  ys.push_back(y);
  return GpModel(std::move(xs), std::move(ys), model.theta());
}

double log_marginal_likelihood(std::span<const double> inputs, std::span<const double> targets,
                               const Hyperparams& theta) {
  if (inputs.size() != targets.size() || inputs.empty()) {
    throw Error("log marginal likelihood needs equal-length, non-empty inputs and targets");
  }
  if (!theta.valid()) throw Error("GP hyperparameters must be finite and strictly positive");
  const double v =
      lml_from_unit(unit_kernel_matrix(inputs, theta.length_scale), to_vector(targets), theta.signal_var,
                    theta.noise_var);
  if (!std::isfinite(v)) throw Error("GP covariance is not positive definite");
  return v;
}

std::vector<double> log_grid(double lo, double hi, int steps) {
  std::vector<double> g;
  if (steps <= 1) {
    g.push_back(std::sqrt(lo * hi));
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < steps; ++i) g.push_back(std::exp(a + (b - a) * i / (steps - 1)));
  return g;
}

FitResult fit_hyperparams(std::span<const double> inputs, std::span<const double> targets, const HyperBounds& bounds) {
  if (inputs.size() != targets.size()) throw Error("hyperparameter fit: inputs and targets differ in length");
  if (inputs.size() < 3) throw Error("hyperparameter fit needs at least 3 observations");

  FitResult res;
  const double n = static_cast<double>(inputs.size());
  double mean = 0.0;
  for (double v : inputs) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : inputs) var += (v - mean) * (v - mean);
  var /= n;
  const double scale = var > 1e-24 ? std::sqrt(var) : 1.0;
  res.input_mean = mean;
  res.input_scale = scale;

  // Variance bounds are relative to the targets' second moment; the prior
  // mean stays at zero.
  double second = 0.0;
  for (double v : targets) second += v * v;
  second /= n;
  const double out_scale = second > 1e-24 ? second : 1.0;
  res.output_scale = out_scale;

  std::vector<double> xs(inputs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = (inputs[i] - mean) / scale;
  const Eigen::VectorXd y = to_vector(targets);

  const auto ls = log_grid(bounds.length_lo, bounds.length_hi, bounds.length_steps);
  const auto sf = log_grid(bounds.signal_lo * out_scale, bounds.signal_hi * out_scale, bounds.signal_steps);
  const auto sn = log_grid(bounds.noise_lo * out_scale, bounds.noise_hi * out_scale, bounds.noise_steps);

  // Standardized-space search in log coordinates: p = (log ℓ, log ς_f², log ς_n²).
  double best = kNegInf;
  std::array<double, 3> best_p{std::log(ls[0]), std::log(sf[0]), std::log(sn[0])};
  std::array<std::size_t, 3> best_idx{0, 0, 0};
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const UnitSpectrum spectrum(unit_kernel_matrix(xs, ls[i]), y);
    for (std::size_t j = 0; j < sf.size(); ++j) {
      for (std::size_t k = 0; k < sn.size(); ++k) {
        const double v = spectrum.lml(sf[j], sn[k]);
        if (v > best) {
          best = v;
          best_p = {std::log(ls[i]), std::log(sf[j]), std::log(sn[k])};
          best_idx = {i, j, k};
        }
      }
    }
  }
  if (!std::isfinite(best)) throw Error("hyperparameter fit: no grid vertex yields a positive definite covariance");

  // Length-scale probes need a fresh matrix; variance probes reuse the
  // spectrum of the current best length scale.
  auto eval = [&](const std::array<double, 3>& p) {
    const Eigen::MatrixXd unit = unit_kernel_matrix(xs, std::exp(p[0]));
    return lml_from_unit(unit, y, std::exp(p[1]), std::exp(p[2]));
  };
  std::optional<UnitSpectrum> spectrum;

  const std::array<const std::vector<double>*, 3> axes{&ls, &sf, &sn};
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < bounds.refine_sweeps; ++sweep) {
    for (int d = 0; d < 3; ++d) {
      const auto& axis = *axes[d];
      if (axis.size() < 2) continue;
      // Bracket between the grid neighbours of the best vertex.
      const std::size_t i = best_idx[d];
      double a = std::log(axis[i == 0 ? 0 : i - 1]);
      double b = std::log(axis[std::min(i + 1, axis.size() - 1)]);
      auto probe = best_p;
      if (d > 0 && !spectrum) spectrum.emplace(unit_kernel_matrix(xs, std::exp(best_p[0])), y);
      auto f = [&](double t) {
        probe[d] = t;
        return d == 0 ? eval(probe) : spectrum->lml(std::exp(probe[1]), std::exp(probe[2]));
      };
      double c = b - golden * (b - a);
      double e = a + golden * (b - a);
      double fc = f(c), fe = f(e);
      for (int it = 0; it < bounds.golden_iters; ++it) {
        if (fc > fe) {
          b = e;
          e = c;
          fe = fc;
          c = b - golden * (b - a);
          fc = f(c);
        } else {
          a = c;
          c = e;
          fc = fe;
          e = a + golden * (b - a);
          fe = f(e);
        }
      }
      const double t = fc > fe ? c : e;
      const double ft = std::max(fc, fe);
      if (ft > best) {
        best = ft;
        best_p[d] = t;
        if (d == 0) spectrum.reset();
      }
    }
  }

  res.theta = {std::exp(best_p[0]) * scale, std::exp(best_p[1]), std::exp(best_p[2])};
  // Report the likelihood through the same Cholesky route as log_marginal_likelihood.
  res.lml = lml_from_unit(unit_kernel_matrix(xs, std::exp(best_p[0])), y, res.theta.signal_var, res.theta.noise_var);
  if (!std::isfinite(res.lml)) res.lml = best;
  return res;
}

nlohmann::json to_json(const Hyperparams& theta) {
  return {{"length_scale", theta.length_scale}, {"signal_var", theta.signal_var}, {"noise_var", theta.noise_var}};
}

Hyperparams hyperparams_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("hyperparameters must be a JSON object");
  Hyperparams t;
  for (const char* key : {"length_scale", "signal_var", "noise_var"}) {
    if (!j.contains(key) || !j[key].is_number()) throw Error(std::string("hyperparameters lack numeric '") + key + "'");
  }
  t.length_scale = j["length_scale"].get<double>();
  t.signal_var = j["signal_var"].get<double>();
  t.noise_var = j["noise_var"].get<double>();
  if (!t.valid()) throw Error("hyperparameters must be finite and strictly positive");
  return t;
}

nlohmann::json to_json(const GpModel& model) {
  return {{"X", model.inputs()}, {"y", model.targets()}, {"theta", to_json(model.theta())}};
}

GpModel gp_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("X") || !j.contains("y") || !j.contains("theta")) {
    throw Error("GP model JSON needs X, y and theta");
  }
  try {
    return GpModel(j["X"].get<std::vector<double>>(), j["y"].get<std::vector<double>>(),
                   hyperparams_from_json(j["theta"]));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("GP model JSON is malformed: ") + e.what());
  }
}

}  // namespace mrplan
