#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace concrete {

enum class Activation { Relu, Tanh };

Activation parse_activation(const std::string& name);
std::string to_string(Activation a);

/// Fully connected network with one scalar output and identity output
/// activation. Layer l maps (N x in) activations to (N x out) through
/// A * W^T + b, with W stored as (out x in).
class Mlp {
 public:
  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
  };

  Mlp() = default;

  /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static Mlp initialize(int inputs, const std::vector<int>& hidden, Activation activation, std::uint64_t seed);

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;

  /// Backpropagates dLoss/dPrediction (one entry per row of x) to every
  /// parameter.
  Gradients backward(const Eigen::MatrixXd& x, const Eigen::VectorXd& dloss_dpred) const;

  /// Pre-activations of every hidden layer, for kink checks on ReLU nets.
  std::vector<Eigen::MatrixXd> hidden_preactivations(const Eigen::MatrixXd& x) const;

  // Flat parameter view (layer by layer, weights column-major then biases).
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);
  static Eigen::VectorXd flatten(const Gradients& g);

  int inputs() const { return weights_.empty() ? 0 : static_cast<int>(weights_.front().cols()); }
  std::vector<int> layer_sizes() const;
  Activation activation() const { return activation_; }
  bool all_finite() const;

  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

 private:
  friend class AdamOptimizer;

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, std::vector<Eigen::MatrixXd>* pre,
                          std::vector<Eigen::MatrixXd>* post) const;

  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
  Activation activation_ = Activation::Relu;
};

/// Adam with bias-corrected first/second moments.
class AdamOptimizer {
 public:
  AdamOptimizer(const Mlp& net, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8);

  void step(Mlp& net, const Mlp::Gradients& g);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  Mlp::Gradients m_, v_;
};

/// Loss breakdown. For the plain network `physics` is 0 and `data` is the
/// RMSE; for the physics-informed objective total = data + weight * physics.
struct LossTerms {
  double data = 0;
  double physics = 0;
  double total = 0;
};

/// Training objective. Mse trains on mean squared error (same minimizer as
/// RMSE). Pinn trains on RMSE(truth, pred) + weight * RMSE(anchor, pred),
/// where anchor holds the physical-law prediction for each row; both square
/// roots are evaluated as sqrt(x + 1e-12).
struct Objective {
  enum class Kind { Mse, Pinn } kind = Kind::Mse;
  double physics_weight = 1.0;

  static Objective mse() { return {}; }
  static Objective pinn(double weight = 1.0) { return {Kind::Pinn, weight}; }
};

inline constexpr double kRootEpsilon = 1e-12;

/// Reporting values: `data`, `physics` are plain RMSEs (no epsilon).
LossTerms evaluate_loss(const Objective& obj, const Eigen::VectorXd& pred, const Eigen::VectorXd& truth,
                        const Eigen::VectorXd* anchor);

/// Scalar that training minimizes, and its gradient w.r.t. pred.
double training_loss(const Objective& obj, const Eigen::VectorXd& pred, const Eigen::VectorXd& truth,
                     const Eigen::VectorXd* anchor, Eigen::VectorXd* grad);

struct DnnParams {
  int epochs = 100;
  double validation_split = 0.05;
  double learning_rate = 0.01;
  int batch_size = 32;  // 0 means full batch
  std::vector<int> hidden = {64, 32};
  Activation activation = Activation::Relu;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  LossTerms train;
  std::optional<LossTerms> validation;
};

struct TrainedMlp {
  Mlp net;
  std::vector<EpochRecord> history;
};

/// Trains on (x, y). The last floor-complement of `validation_split` rows
/// are held out for monitoring only (the rows are used in the order given).
/// `anchor` is required for the Pinn objective and ignored otherwise.
/// Throws "DivergedLoss" if a loss or parameter becomes non-finite.
TrainedMlp train_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd* anchor,
                     const DnnParams& params, const Objective& objective);

/// Number of rows kept for training when `n` rows are split.
Eigen::Index training_rows(Eigen::Index n, double validation_split);

}  // namespace concrete
