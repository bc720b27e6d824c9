#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "swing/regress.hpp"

namespace swing {
namespace {

Eigen::MatrixXd uniform_samples(int n, int dims, unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-1.0, 3.0);
  Eigen::MatrixXd xs(n, dims);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dims; ++d) xs(i, d) = u(g);
  }
  return xs;
}

TEST(LocalBasis, ReproducesAffineFunctions) {
  const Eigen::MatrixXd xs = uniform_samples(600, 2, 1);
  Eigen::VectorXd ys(600);
  for (int i = 0; i < 600; ++i) ys(i) = 2.5 - 1.5 * xs(i, 0) + 0.25 * xs(i, 1);
  const auto est = fit(xs, ys, {4, 3}, {1, 1});
  for (int i = 0; i < 600; i += 37) EXPECT_NEAR(est.evaluate(Eigen::VectorXd(xs.row(i).transpose())), ys(i), 1e-12);
  const double out[2] = {10.0, -7.0};
  EXPECT_NEAR(est.evaluate(out), 2.5 - 15.0 - 1.75, 1e-10);  // edge leaves extend affinely
  Eigen::VectorXd c = Eigen::VectorXd::Constant(600, 4.0);
  const auto flat = fit(xs, c, {4, 3}, {1, 1});
  for (double v : flat.coef) EXPECT_TRUE(std::abs(v) < 1e-12 || std::abs(v - 4.0) < 1e-12);
}

TEST(LocalBasis, TwoCellHandLeastSquares) {
  Eigen::MatrixXd xs(6, 1);
  xs << 1, 2, 3, 4, 5, 6;
  const double y[6] = {1, 2, 6, 10, 10, 13};
  const LocalBasis b(xs, {2}, {0});
  ASSERT_EQ(b.leaves(), 2);
  const auto coef = b.fit(y);
  EXPECT_DOUBLE_EQ(coef[0], 3.0);
  EXPECT_DOUBLE_EQ(coef[1], 11.0);
  // Affine per cell: the left cell {1,2,3} fits 1, 2, 6 with slope 2.5.
  const LocalBasis a(xs, {2}, {1});
  const auto ca = a.fit(y);
  const double x = 1.0;
  EXPECT_NEAR(a.evaluate(ca.data(), &x), 3.0 - 2.5, 1e-12);
}

TEST(LocalBasis, EqualCountSequentialPartition) {
  const Eigen::MatrixXd xs = uniform_samples(1200, 2, 2);
  const LocalBasis b(xs, {3, 4}, {1, 1});
  ASSERT_EQ(b.leaves(), 12);
  for (int l = 0; l < 12; ++l) EXPECT_EQ(b.leaf_size(l), 100);
  for (std::size_t i = 0; i < b.samples(); ++i) {
    EXPECT_EQ(b.leaf_of(Eigen::VectorXd(xs.row(static_cast<Eigen::Index>(i)).transpose()).data()), b.sample_leaf(i));
  }
}

TEST(LocalBasis, ResidualOrthogonalToLeafBasis) {
  const Eigen::MatrixXd xs = uniform_samples(500, 2, 3);
  std::vector<double> y(500);
  for (int i = 0; i < 500; ++i) y[static_cast<std::size_t>(i)] = std::sin(xs(i, 0)) * std::exp(xs(i, 1) / 3.0);
  const LocalBasis b(xs, {3, 2}, {1, 1});
  const auto coef = b.fit(y.data());
  std::vector<Eigen::Vector3d> dot(static_cast<std::size_t>(b.leaves()), Eigen::Vector3d::Zero());
  for (std::size_t i = 0; i < 500; ++i) {
    const double r = y[i] - b.evaluate_sample(coef.data(), i);
    const auto l = static_cast<std::size_t>(b.sample_leaf(i));
    dot[l] += r * Eigen::Vector3d(1.0, xs(static_cast<Eigen::Index>(i), 0), xs(static_cast<Eigen::Index>(i), 1));
  }
  for (const auto& d : dot) EXPECT_LT(d.norm(), 1e-10);
}

TEST(LocalBasis, DropsConstantDimensions) {
  Eigen::MatrixXd xs = uniform_samples(100, 2, 4);
  xs.col(1).setConstant(7.0);
  const LocalBasis b(xs, {2, 3}, {1, 1});
  EXPECT_EQ(b.leaves(), 2);
  for (int l = 0; l < b.leaves(); ++l) EXPECT_EQ(b.leaf_basis_size(l), 2);
}

TEST(LocalBasis, StridedAndWeightedFits) {
  const Eigen::MatrixXd xs = uniform_samples(80, 1, 5);
  std::vector<double> y(160), w(80), yw(80), plain(80);
  for (std::size_t i = 0; i < 80; ++i) {
    plain[i] = xs(static_cast<Eigen::Index>(i), 0) * xs(static_cast<Eigen::Index>(i), 0);
    y[2 * i] = plain[i];
    w[i] = 1.0 + static_cast<double>(i % 3);
    yw[i] = plain[i] * w[i];
  }
  const LocalBasis b(xs, {3}, {1});
  EXPECT_EQ(b.fit(y.data(), 2), b.fit(plain.data()));
  std::vector<double> c(static_cast<std::size_t>(b.coefficient_count()));
  b.fit_weighted_into(plain.data(), w.data(), c.data());
  const auto direct = b.fit(yw.data());
  for (std::size_t k = 0; k < c.size(); ++k) EXPECT_NEAR(c[k], direct[k], 1e-12);
}

// E[X Z | X] = X for Z lognormal with unit mean independent of X.
TEST(LocalBasis, LognormalConditionalExpectation) {
  const int n = 40000;
  std::mt19937_64 g(6);
  std::normal_distribution<double> z;
  Eigen::MatrixXd xs(n, 1);
  Eigen::VectorXd ys(n);
  for (int i = 0; i < n; ++i) {
    xs(i, 0) = std::exp(0.3 * z(g));
    ys(i) = xs(i, 0) * std::exp(0.5 * z(g) - 0.125);
  }
  const auto est = fit(xs, ys, {8}, {1});
  for (double x : {0.7, 0.9, 1.0, 1.2, 1.5}) EXPECT_NEAR(est.evaluate(&x), x, 0.04) << x;
}

TEST(LocalBasis, SaveLoadRoundTrip) {
  const Eigen::MatrixXd xs = uniform_samples(300, 3, 7);
  std::vector<double> y(300);
  for (std::size_t i = 0; i < 300; ++i) y[i] = xs(static_cast<Eigen::Index>(i), 2) - xs(static_cast<Eigen::Index>(i), 0);
  const LocalBasis b(xs, {3, 2, 2}, {1, 1, 0});
  const auto coef = b.fit(y.data());
  std::stringstream s;
  b.save(s);
  const auto back = LocalBasis::load(s);
  for (Eigen::Index i = 0; i < 300; i += 11) {
    const Eigen::VectorXd x = xs.row(i).transpose();
    EXPECT_EQ(back->evaluate(coef.data(), x.data()), b.evaluate(coef.data(), x.data()));
  }
}

TEST(LocalBasis, RejectsTooFewSamples) {
  const Eigen::MatrixXd xs = uniform_samples(10, 2, 8);
  EXPECT_THROW(LocalBasis(xs, {3, 2}, {1, 1}), std::invalid_argument);
  EXPECT_THROW(LocalBasis(xs, {3}, {1, 1}), std::invalid_argument);
}

TEST(RegressorSpec, NamesAndValidation) {
  for (auto k : {RegressorKind::SpotOnly, RegressorKind::SpotAndIndex, RegressorKind::SpotIndexPartial}) {
    EXPECT_EQ(regressor_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(regressor_kind_from_string("spline"), std::invalid_argument);
  RegressorSpec r;
  r.degree = {2, 1, 1};
  EXPECT_THROW(r.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace swing
