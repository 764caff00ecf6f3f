#include "concrete/mlp.hpp"

#include <cmath>
#include <numeric>

#include "concrete/error.hpp"
#include "concrete/random.hpp"

namespace concrete {

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  throw Error("InvalidHyperparameter", "unknown activation '" + name + "'");
}

std::string to_string(Activation a) { return a == Activation::Relu ? "relu" : "tanh"; }

namespace {

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::Relu) return z.cwiseMax(0.0);
  return z.array().tanh().matrix();
}

// Derivative of the activation given pre-activation z and its output h.
Eigen::ArrayXXd activation_slope(const Eigen::MatrixXd& z, const Eigen::MatrixXd& h, Activation a) {
  if (a == Activation::Relu) return (z.array() > 0).cast<double>();
  return 1.0 - h.array().square();
}

}  // namespace

Mlp Mlp::initialize(int inputs, const std::vector<int>& hidden, Activation activation, std::uint64_t seed) {
  if (inputs < 1) throw Error("InvalidHyperparameter", "network needs at least one input");
  Mlp net;
  net.activation_ = activation;
  Rng rng(seed);
  int fan_in = inputs;
  std::vector<int> widths = hidden;
  widths.push_back(1);
  for (int fan_out : widths) {
    if (fan_out < 1) throw Error("InvalidHyperparameter", "layer widths must be >= 1");
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.uniform(-limit, limit);
    net.weights_.push_back(std::move(w));
    net.biases_.push_back(Eigen::VectorXd::Zero(fan_out));
    fan_in = fan_out;
  }
  return net;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, std::vector<Eigen::MatrixXd>* pre,
                             std::vector<Eigen::MatrixXd>* post) const {
  if (x.cols() != inputs()) throw Error("ColumnMismatch", "network input width differs from fit");
  Eigen::MatrixXd a = x;
  if (post) post->push_back(a);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = (a * weights_[l].transpose()).rowwise() + biases_[l].transpose();
    const bool output = l + 1 == weights_.size();
    a = output ? z : activate(z, activation_);
    if (pre) pre->push_back(std::move(z));
    if (post) post->push_back(a);
  }
  return a;
}

Eigen::VectorXd Mlp::predict(const Eigen::MatrixXd& x) const {
  if (weights_.empty()) throw Error("NotFitted", "network has no layers");
  return forward(x, nullptr, nullptr).col(0);
}

std::vector<Eigen::MatrixXd> Mlp::hidden_preactivations(const Eigen::MatrixXd& x) const {
  std::vector<Eigen::MatrixXd> pre;
  forward(x, &pre, nullptr);
  pre.pop_back();
  return pre;
}

Mlp::Gradients Mlp::backward(const Eigen::MatrixXd& x, const Eigen::VectorXd& dloss_dpred) const {
  std::vector<Eigen::MatrixXd> pre, post;
  forward(x, &pre, &post);
  if (dloss_dpred.size() != x.rows()) throw Error("LengthMismatch", "gradient length differs from row count");

  const std::size_t layers = weights_.size();
  Gradients g;
  g.weights.resize(layers);
  g.biases.resize(layers);
  Eigen::MatrixXd delta = dloss_dpred;  // dL/dz of the output layer, N x 1
  for (std::size_t l = layers; l-- > 0;) {
    g.weights[l] = delta.transpose() * post[l];
    g.biases[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    const Eigen::MatrixXd upstream = delta * weights_[l];
    delta = (upstream.array() * activation_slope(pre[l - 1], post[l], activation_)).matrix();
  }
  return g;
}

Eigen::VectorXd Mlp::parameters() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
  Eigen::VectorXd flat(n);
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    flat.segment(k, weights_[l].size()) = weights_[l].reshaped();
    k += weights_[l].size();
    flat.segment(k, biases_[l].size()) = biases_[l];
    k += biases_[l].size();
  }
  return flat;
}

void Mlp::set_parameters(const Eigen::VectorXd& flat) {
  if (flat.size() != parameters().size()) throw Error("LengthMismatch", "parameter vector has the wrong size");
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    weights_[l].reshaped() = flat.segment(k, weights_[l].size());
    k += weights_[l].size();
    biases_[l] = flat.segment(k, biases_[l].size());
    k += biases_[l].size();
  }
}

Eigen::VectorXd Mlp::flatten(const Gradients& g) {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < g.weights.size(); ++l) n += g.weights[l].size() + g.biases[l].size();
  Eigen::VectorXd flat(n);
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    flat.segment(k, g.weights[l].size()) = g.weights[l].reshaped();
    k += g.weights[l].size();
    flat.segment(k, g.biases[l].size()) = g.biases[l];
    k += g.biases[l].size();
  }
  return flat;
}

std::vector<int> Mlp::layer_sizes() const {
  std::vector<int> sizes;
  if (weights_.empty()) return sizes;
  sizes.push_back(inputs());
  for (const auto& w : weights_) sizes.push_back(static_cast<int>(w.rows()));
  return sizes;
}

bool Mlp::all_finite() const {
  for (std::size_t l = 0; l < weights_.size(); ++l)
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  return true;
}

AdamOptimizer::AdamOptimizer(const Mlp& net, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  for (std::size_t l = 0; l < net.weights_.size(); ++l) {
    m_.weights.push_back(Eigen::MatrixXd::Zero(net.weights_[l].rows(), net.weights_[l].cols()));
    m_.biases.push_back(Eigen::VectorXd::Zero(net.biases_[l].size()));
  }
  v_ = m_;
}

void AdamOptimizer::step(Mlp& net, const Mlp::Gradients& g) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto update = [&](auto& param, auto& m, auto& v, const auto& grad) {
    m = beta1_ * m + (1.0 - beta1_) * grad;
    v = beta2_ * v + (1.0 - beta2_) * grad.cwiseProduct(grad);
    param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  };
  for (std::size_t l = 0; l < net.weights_.size(); ++l) {
    update(net.weights_[l], m_.weights[l], v_.weights[l], g.weights[l]);
    update(net.biases_[l], m_.biases[l], v_.biases[l], g.biases[l]);
  }
}

LossTerms evaluate_loss(const Objective& obj, const Eigen::VectorXd& pred, const Eigen::VectorXd& truth,
                        const Eigen::VectorXd* anchor) {
  if (pred.size() != truth.size()) throw Error("LengthMismatch", "loss: prediction and truth differ in length");
  if (pred.size() == 0) throw Error("EmptyVector", "loss: empty input");
  const auto n = static_cast<double>(pred.size());
  LossTerms t;
  t.data = std::sqrt((pred - truth).squaredNorm() / n);
  if (obj.kind == Objective::Kind::Pinn) {
    if (!anchor || anchor->size() != pred.size()) throw Error("LengthMismatch", "loss: anchor length differs");
    t.physics = std::sqrt((pred - *anchor).squaredNorm() / n);
  }
  t.total = t.data + obj.physics_weight * t.physics;
  return t;
}

double training_loss(const Objective& obj, const Eigen::VectorXd& pred, const Eigen::VectorXd& truth,
                     const Eigen::VectorXd* anchor, Eigen::VectorXd* grad) {
  const auto n = static_cast<double>(pred.size());
  const Eigen::VectorXd r = pred - truth;
  if (obj.kind == Objective::Kind::Mse) {
    if (grad) *grad = 2.0 / n * r;
    return r.squaredNorm() / n;
  }
  if (!anchor || anchor->size() != pred.size()) throw Error("LengthMismatch", "loss: anchor length differs");
  const Eigen::VectorXd q = pred - *anchor;
  const double data = std::sqrt(r.squaredNorm() / n + kRootEpsilon);
  const double physics = std::sqrt(q.squaredNorm() / n + kRootEpsilon);
  if (grad) *grad = r / (n * data) + obj.physics_weight * q / (n * physics);
  return data + obj.physics_weight * physics;
}

Eigen::Index training_rows(Eigen::Index n, double validation_split) {
  return static_cast<Eigen::Index>(std::floor(static_cast<double>(n) * (1.0 - validation_split)));
}

TrainedMlp train_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd* anchor,
                     const DnnParams& params, const Objective& objective) {
  if (x.rows() != y.size()) throw Error("LengthMismatch", "train_mlp: rows and targets differ");
  if (objective.kind == Objective::Kind::Pinn && (!anchor || anchor->size() != y.size()))
    throw Error("LengthMismatch", "train_mlp: physics anchor missing or wrong length");
  if (params.epochs < 0 || params.batch_size < 0 || !(params.learning_rate > 0))
    throw Error("InvalidHyperparameter", "epochs, batch_size must be >= 0 and learning_rate > 0");
  if (!(params.validation_split >= 0 && params.validation_split < 1))
    throw Error("InvalidHyperparameter", "validation_split must lie in [0, 1)");

  const Eigen::Index n_train = training_rows(x.rows(), params.validation_split);
  const Eigen::Index n_val = x.rows() - n_train;
  if (n_train < 1 || (params.validation_split > 0 && n_val < 1))
    throw Error("TooFewRecords", "train_mlp: not enough rows for the validation split");

  const Eigen::MatrixXd x_train = x.topRows(n_train);
  const Eigen::VectorXd y_train = y.head(n_train);
  const Eigen::MatrixXd x_val = x.bottomRows(n_val);
  const Eigen::VectorXd y_val = y.tail(n_val);
  Eigen::VectorXd a_train, a_val;
  if (anchor) {
    a_train = anchor->head(n_train);
    a_val = anchor->tail(n_val);
  }
  const Eigen::VectorXd* anchor_train = anchor ? &a_train : nullptr;
  const Eigen::VectorXd* anchor_val = anchor ? &a_val : nullptr;

  TrainedMlp out;
  out.net = Mlp::initialize(static_cast<int>(x.cols()), params.hidden, params.activation, params.seed);
  AdamOptimizer adam(out.net, params.learning_rate);
  Rng batch_rng = Rng::stream(params.seed, 1);

  const Eigen::Index batch = params.batch_size == 0 ? n_train : std::min<Eigen::Index>(params.batch_size, n_train);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  for (int epoch = 1; epoch <= params.epochs; ++epoch) {
    if (batch < n_train) batch_rng.shuffle(order);
    for (Eigen::Index start = 0; start < n_train; start += batch) {
      const Eigen::Index len = std::min(batch, n_train - start);
      Eigen::MatrixXd xb(len, x.cols());
      Eigen::VectorXd yb(len), ab(anchor ? len : 0);
      for (Eigen::Index k = 0; k < len; ++k) {
        const auto r = order[static_cast<std::size_t>(start + k)];
        xb.row(k) = x_train.row(r);
        yb(k) = y_train(r);
        if (anchor) ab(k) = a_train(r);
      }
      Eigen::VectorXd grad;
      const double loss = training_loss(objective, out.net.predict(xb), yb, anchor ? &ab : nullptr, &grad);
      if (!std::isfinite(loss)) throw Error("DivergedLoss", "loss became non-finite at epoch " + std::to_string(epoch));
      adam.step(out.net, out.net.backward(xb, grad));
    }
    if (!out.net.all_finite())
      throw Error("DivergedLoss", "parameters became non-finite at epoch " + std::to_string(epoch));

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train = evaluate_loss(objective, out.net.predict(x_train), y_train, anchor_train);
    if (n_val > 0) rec.validation = evaluate_loss(objective, out.net.predict(x_val), y_val, anchor_val);
    if (!std::isfinite(rec.train.total))
      throw Error("DivergedLoss", "loss became non-finite at epoch " + std::to_string(epoch));
    out.history.push_back(rec);
  }
  return out;
}

}  // namespace concrete
