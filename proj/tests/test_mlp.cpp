#include <doctest.h>

#include "concrete/error.hpp"
#include "concrete/linear.hpp"
#include "concrete/metrics.hpp"
#include "concrete/mlp.hpp"
#include "support.hpp"

using namespace concrete;
using doctest::Approx;

namespace {

struct Problem {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd anchor;
};

Problem tiny_problem(std::uint64_t seed, Eigen::Index rows = 6) {
  Rng rng(seed);
  Problem p;
  p.x = testing::uniform_matrix(rows, 2, rng, -1, 1);
  p.y.resize(rows);
  p.anchor.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    p.y(i) = rng.uniform(-2, 2);
    p.anchor(i) = rng.uniform(-2, 2);
  }
  return p;
}

double loss_at(Mlp net, const Eigen::VectorXd& theta, const Problem& p, const Objective& obj) {
  net.set_parameters(theta);
  return training_loss(obj, net.predict(p.x), p.y, &p.anchor, nullptr);
}

double min_abs_preactivation(const Mlp& net, const Eigen::MatrixXd& x) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& z : net.hidden_preactivations(x)) m = std::min(m, z.cwiseAbs().minCoeff());
  return m;
}

// Central differences with h = 1e-5 against backprop on a 2-4-1 network.
void check_gradient(Activation act, const Objective& obj) {
  const double h = 1e-5;
  int networks = 0;
  for (std::uint64_t seed = 0; networks < 10; ++seed) {
    const Problem p = tiny_problem(100 + seed);
    Mlp net = Mlp::initialize(2, {4}, act, seed);
    net.set_parameters(net.parameters() + 0.1 * Eigen::VectorXd::Ones(net.parameters().size()));
    // A ReLU kink inside the stencil would make the difference quotient
    // meaningless; such draws are skipped and counted.
    if (act == Activation::Relu && min_abs_preactivation(net, p.x) < 1e-3) continue;
    ++networks;

    Eigen::VectorXd dpred;
    training_loss(obj, net.predict(p.x), p.y, &p.anchor, &dpred);
    const Eigen::VectorXd analytic = Mlp::flatten(net.backward(p.x, dpred));
    const Eigen::VectorXd theta = net.parameters();
    REQUIRE_EQ(analytic.size(), theta.size());
    REQUIRE_EQ(theta.size(), 2 * 4 + 4 + 4 + 1);
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      Eigen::VectorXd up = theta, down = theta;
      up(k) += h;
      down(k) -= h;
      const double numeric = (loss_at(net, up, p, obj) - loss_at(net, down, p, obj)) / (2 * h);
      const double scale = std::max({std::abs(numeric), std::abs(analytic(k)), 1e-6});
      CHECK_LT(std::abs(numeric - analytic(k)) / scale, 1e-4);
    }
  }
}

}  // namespace

TEST_CASE("gradient check: mse objective") {
  check_gradient(Activation::Relu, Objective::mse());
  check_gradient(Activation::Tanh, Objective::mse());
}

TEST_CASE("gradient check: physics-informed objective") {
  check_gradient(Activation::Relu, Objective::pinn(1.0));
  check_gradient(Activation::Tanh, Objective::pinn(1.0));
  check_gradient(Activation::Tanh, Objective::pinn(0.3));
}

TEST_CASE("gradient check: deeper network") {
  const Problem p = tiny_problem(5, 9);
  Mlp net = Mlp::initialize(2, {5, 3}, Activation::Tanh, 4);
  Eigen::VectorXd dpred;
  training_loss(Objective::pinn(2.0), net.predict(p.x), p.y, &p.anchor, &dpred);
  const Eigen::VectorXd analytic = Mlp::flatten(net.backward(p.x, dpred));
  const Eigen::VectorXd theta = net.parameters();
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    Eigen::VectorXd up = theta, down = theta;
    up(k) += 1e-5;
    down(k) -= 1e-5;
    const double numeric =
        (loss_at(net, up, p, Objective::pinn(2.0)) - loss_at(net, down, p, Objective::pinn(2.0))) / 2e-5;
    CHECK_LT(std::abs(numeric - analytic(k)) / std::max({std::abs(numeric), std::abs(analytic(k)), 1e-6}), 1e-4);
  }
}

TEST_CASE("loss terms") {
  Eigen::VectorXd truth(2), pred(2), anchor(2);
  truth << 0, 0;
  pred << 3, 4;
  anchor << 3, 4;
  const LossTerms plain = evaluate_loss(Objective::mse(), pred, truth, nullptr);
  CHECK_EQ(plain.data, Approx(std::sqrt(12.5)));
  CHECK_EQ(plain.physics, 0.0);
  CHECK_EQ(plain.total, plain.data);

  const LossTerms agree = evaluate_loss(Objective::pinn(), pred, truth, &anchor);
  CHECK_EQ(agree.physics, 0.0);
  CHECK_EQ(agree.total, agree.data);

  anchor << 0, 0;
  const LossTerms both = evaluate_loss(Objective::pinn(0.5), pred, truth, &anchor);
  CHECK_EQ(both.total, Approx(1.5 * std::sqrt(12.5)));

  CHECK_EQ(training_loss(Objective::mse(), pred, truth, nullptr, nullptr), Approx(12.5));
  CHECK_ERROR_CODE(evaluate_loss(Objective::pinn(), pred, truth, nullptr), "LengthMismatch");
  CHECK_ERROR_CODE(evaluate_loss(Objective::mse(), pred, Eigen::VectorXd(3), nullptr), "LengthMismatch");
}

TEST_CASE("initialization") {
  const Mlp a = Mlp::initialize(8, {64, 32}, Activation::Relu, 3);
  const Mlp b = Mlp::initialize(8, {64, 32}, Activation::Relu, 3);
  CHECK_EQ(a.parameters(), b.parameters());
  CHECK_NE(a.parameters(), Mlp::initialize(8, {64, 32}, Activation::Relu, 4).parameters());
  CHECK_EQ(a.layer_sizes(), std::vector<int>{8, 64, 32, 1});
  CHECK_EQ(a.parameters().size(), 8 * 64 + 64 + 64 * 32 + 32 + 32 + 1);
  const int fan[] = {8, 64, 32, 1};
  for (std::size_t l = 0; l < a.weights().size(); ++l) {
    const double limit = std::sqrt(6.0 / (fan[l] + fan[l + 1]));
    CHECK_LE(a.weights()[l].cwiseAbs().maxCoeff(), limit);
    CHECK_GT(a.weights()[l].cwiseAbs().maxCoeff(), 0.5 * limit);
    CHECK_EQ(a.biases()[l], Eigen::VectorXd::Zero(fan[l + 1]));
  }
  CHECK_ERROR_CODE(Mlp::initialize(0, {4}, Activation::Relu, 0), "InvalidHyperparameter");
  CHECK_ERROR_CODE(Mlp::initialize(2, {0}, Activation::Relu, 0), "InvalidHyperparameter");
  CHECK_ERROR_CODE(a.predict(Eigen::MatrixXd(2, 3)), "ColumnMismatch");
  CHECK_ERROR_CODE(parse_activation("gelu"), "InvalidHyperparameter");
  CHECK_EQ(parse_activation("tanh"), Activation::Tanh);
}

TEST_CASE("adam first step moves every parameter by the learning rate") {
  Mlp net = Mlp::initialize(2, {3}, Activation::Tanh, 1);
  const Eigen::VectorXd before = net.parameters();
  Mlp::Gradients g = net.backward(Eigen::MatrixXd::Ones(1, 2), Eigen::VectorXd::Ones(1));
  for (auto& w : g.weights) w.setConstant(0.37);
  for (auto& b : g.biases) b.setConstant(-2.0);
  AdamOptimizer adam(net, 0.01);
  adam.step(net, g);
  // m_hat = g and v_hat = g^2 after one step, so the update is lr * sign(g).
  const Eigen::VectorXd delta = net.parameters() - before;
  const Eigen::VectorXd grad = Mlp::flatten(g);
  for (Eigen::Index k = 0; k < delta.size(); ++k)
    CHECK_EQ(delta(k), Approx(-0.01 * (grad(k) > 0 ? 1 : -1)).epsilon(1e-6));
  CHECK_EQ(adam.steps(), 1);
}

TEST_CASE("training") {
  Rng rng(42);
  const Eigen::MatrixXd x = testing::uniform_matrix(200, 3, rng, -1, 1);
  Eigen::VectorXd y(200);
  for (Eigen::Index i = 0; i < 200; ++i) y(i) = 2 * x(i, 0) - x(i, 1) + 0.5 * x(i, 2) + 1;
  const double linear_rmse = rmse(y, fit_linear(x, y).predict(x));

  DnnParams params;
  const TrainedMlp fitted = train_mlp(x, y, nullptr, params, Objective::mse());
  CHECK_EQ(fitted.history.size(), 100);
  CHECK(fitted.net.all_finite());
  CHECK_LT(rmse(y, fitted.net.predict(x)), linear_rmse + 0.5);
  CHECK(fitted.history.back().validation.has_value());
  CHECK_LT(fitted.history.back().train.data, fitted.history.front().train.data);

  const TrainedMlp again = train_mlp(x, y, nullptr, params, Objective::mse());
  CHECK_EQ(again.net.parameters(), fitted.net.parameters());

  params.epochs = 0;
  const TrainedMlp idle = train_mlp(x, y, nullptr, params, Objective::mse());
  CHECK(idle.history.empty());
  CHECK_EQ(idle.net.parameters(), Mlp::initialize(3, params.hidden, params.activation, params.seed).parameters());

  params.epochs = 5;
  params.batch_size = 0;
  CHECK_EQ(train_mlp(x, y, nullptr, params, Objective::mse()).history.size(), 5);
}

TEST_CASE("validation rows are the trailing rows") {
  CHECK_EQ(training_rows(100, 0.05), 95);
  CHECK_EQ(training_rows(21, 0.05), 19);
  CHECK_EQ(training_rows(20, 0.05), 19);
  CHECK_EQ(training_rows(10, 0.0), 10);

  Rng rng(1);
  const Eigen::MatrixXd x = testing::uniform_matrix(40, 2, rng);
  Eigen::VectorXd y = x.col(0);
  DnnParams params;
  params.epochs = 2;
  const TrainedMlp a = train_mlp(x, y, nullptr, params, Objective::mse());
  // Changing only the held-out targets leaves the fitted weights unchanged.
  y.tail(2).setConstant(1e3);
  const TrainedMlp b = train_mlp(x, y, nullptr, params, Objective::mse());
  CHECK_EQ(a.net.parameters(), b.net.parameters());
  CHECK_NE(a.history.back().validation->data, b.history.back().validation->data);
}

TEST_CASE("training errors") {
  Rng rng(1);
  const Eigen::MatrixXd x = testing::uniform_matrix(30, 2, rng);
  const Eigen::VectorXd y = x.col(0);
  DnnParams params;
  CHECK_ERROR_CODE(train_mlp(x, y.head(10), nullptr, params, Objective::mse()), "LengthMismatch");
  CHECK_ERROR_CODE(train_mlp(x, y, nullptr, params, Objective::pinn()), "LengthMismatch");
  CHECK_ERROR_CODE(train_mlp(x.topRows(1), y.head(1), nullptr, params, Objective::mse()), "TooFewRecords");
  params.learning_rate = 0;
  CHECK_ERROR_CODE(train_mlp(x, y, nullptr, params, Objective::mse()), "InvalidHyperparameter");
  params.learning_rate = 0.01;
  params.validation_split = 1.0;
  CHECK_ERROR_CODE(train_mlp(x, y, nullptr, params, Objective::mse()), "InvalidHyperparameter");

  params.validation_split = 0.05;
  Eigen::MatrixXd huge = x;
  huge.col(0).setConstant(1e300);
  CHECK_ERROR_CODE(train_mlp(huge, y, nullptr, params, Objective::mse()), "DivergedLoss");
}
