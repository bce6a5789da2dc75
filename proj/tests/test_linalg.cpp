#include "doctest.h"

#include <random>

#include <Eigen/Dense>

#include "csc/linalg.hpp"

using namespace csc;

namespace {

Eigen::MatrixXd random_spd(int dim, std::mt19937& rng, double shift = 0.5) {
  std::normal_distribution<double> dist;
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = dist(rng);
  return a * a.transpose() + shift * Eigen::MatrixXd::Identity(dim, dim);
}

LinearMap as_map(const Eigen::MatrixXd& a) {
  return LinearMap{a.rows(), [a](const Eigen::VectorXd& v) { return a * v; }};
}

}  // namespace

TEST_CASE("conjugate gradient matches a dense solve") {
  std::mt19937 rng(31);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 10 + trial;
    const Eigen::MatrixXd a = random_spd(dim, rng);
    Eigen::VectorXd b(dim);
    for (int i = 0; i < dim; ++i) b[i] = dist(rng);
    double residual = 1.0;
    const Eigen::VectorXd x = conjugate_gradient(as_map(a), b, 1e-12, 10 * dim, &residual);
    CHECK(residual < 1e-10);
    CHECK((x - a.ldlt().solve(b)).norm() < 1e-8 * b.norm());
  }
}

TEST_CASE("conjugate gradient reports the residual when capped") {
  std::mt19937 rng(32);
  const Eigen::MatrixXd a = random_spd(40, rng, 1e-3);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(40);
  double residual = 0.0;
  conjugate_gradient(as_map(a), b, 1e-14, 2, &residual);
  CHECK(residual > 0.0);
}

TEST_CASE("conjugate gradient rejects indefinite systems") {
  Eigen::MatrixXd a = -Eigen::MatrixXd::Identity(4, 4);
  CHECK_THROWS_AS(conjugate_gradient(as_map(a), Eigen::VectorXd::Ones(4), 1e-10, 10),
                  NumericalFailure);
}

TEST_CASE("power method estimates the top eigenvalue") {
  std::mt19937 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd a = random_spd(15, rng);
    const double truth =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues().maxCoeff();
    const double est = power_method(as_map(a), 300, 5u + trial);
    CHECK(est == doctest::Approx(truth).epsilon(1e-6));
  }
  // Deterministic for a fixed seed.
  const Eigen::MatrixXd a = random_spd(8, rng);
  CHECK(power_method(as_map(a), 50, 9u) == power_method(as_map(a), 50, 9u));
}
