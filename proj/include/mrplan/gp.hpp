#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace mrplan {

// Squared-exponential kernel hyperparameters, in the units of the raw inputs.
struct Hyperparams {
  double length_scale = 1.0;
  double signal_var = 1.0;
  double noise_var = 1e-2;

  bool valid() const;
  bool operator==(const Hyperparams&) const = default;
};

// Search box for hyperparameter fitting. The length scale is expressed for
// standardized inputs (zero mean, unit variance); the two variances are
// relative to the mean squared target.
struct HyperBounds {
  double length_lo = 1e-2, length_hi = 1e2;
  double signal_lo = 1e-4, signal_hi = 1e2;
  double noise_lo = 1e-6, noise_hi = 1e0;
  int length_steps = 12;
  int signal_steps = 12;
  int noise_steps = 8;
  int refine_sweeps = 2;
  int golden_iters = 24;
};

// ς_f² exp(-|a - b|² / (2ℓ²)). Observation noise is not part of the kernel;
// it enters only on the diagonal of the training covariance.
double kernel(double a, double b, const Hyperparams& theta);

struct Prediction {
  double mean = 0.0;
  double var = 0.0;
};

// Exact zero-mean GP regression over scalar inputs. Value type: the
// factorization of K(X,X) + ς_n² I is rebuilt on construction.
class GpModel {
public:
  explicit GpModel(Hyperparams theta = {});
  GpModel(std::vector<double> inputs, std::vector<double> targets, Hyperparams theta);

  const std::vector<double>& inputs() const { return x_; }
  const std::vector<double>& targets() const { return y_; }
  const Hyperparams& theta() const { return theta_; }
  std::size_t size() const { return x_.size(); }
  bool empty() const { return x_.empty(); }
  // Diagonal noise actually used; exceeds theta().noise_var only after an SPD retry.
  double noise_used() const { return noise_used_; }

  Prediction predict(double query) const;
  std::vector<Prediction> posterior(std::span<const double> queries) const;
  double mean(double query) const { return predict(query).mean; }

private:
  void factorize();

  std::vector<double> x_;
  std::vector<double> y_;
  Hyperparams theta_;
  double noise_used_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
};

// Appends (x, y) and refactorizes. Hyperparameters are left untouched.
GpModel add_observation(const GpModel& model, double x, double y);

// -½ yᵀ K⁻¹ y - ½ log|K| - (n/2) log 2π with K = K(X,X) + ς_n² I.
double log_marginal_likelihood(std::span<const double> inputs, std::span<const double> targets,
                               const Hyperparams& theta);

struct FitResult {
  Hyperparams theta;  // raw-input units
  double lml = 0.0;
  double input_mean = 0.0;
  double input_scale = 1.0;
  double output_scale = 1.0;  // mean squared target (1 when all targets are zero)
};

// Log-space grid search over the bounds followed by coordinate-wise
// golden-section refinement, maximizing the log marginal likelihood of the
// standardized problem. Needs at least three observations.
FitResult fit_hyperparams(std::span<const double> inputs, std::span<const double> targets,
                          const HyperBounds& bounds = {});

// Log-spaced grid vertices used by fit_hyperparams along one axis.
std::vector<double> log_grid(double lo, double hi, int steps);

nlohmann::json to_json(const Hyperparams& theta);
Hyperparams hyperparams_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GpModel& model);
GpModel gp_from_json(const nlohmann::json& j);

}  // namespace mrplan
