#include <gtest/gtest.h>

#include <random>

#include "gekrig/errors.hpp"
#include "gekrig/pls.hpp"

using namespace gekrig;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix M(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) M(i, j) = g(rng);
  return M;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::Io;
}

}  // namespace

TEST(Pls, ScoresAreOrthogonal) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix X = random_matrix(30, 6, seed);
    const Vector y = random_matrix(30, 1, seed + 100).col(0) + X.col(0);
    const PlsDecomposition p = fit_pls(X, y, 4);
    const Matrix G = p.scores.transpose() * p.scores;
    for (Eigen::Index a = 0; a < G.rows(); ++a)
      for (Eigen::Index b = 0; b < a; ++b)
        EXPECT_LT(std::abs(G(a, b)) / std::sqrt(G(a, a) * G(b, b)), 1e-8);
  }
}

TEST(Pls, FullRankMatchesLeastSquares) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix X = random_matrix(12, 5, seed);
    const Vector y = random_matrix(12, 1, seed + 7).col(0);
    const PlsDecomposition p = fit_pls(X, y, 5);
    Matrix A(12, 6);
    A << Vector::Ones(12), X;
    const Vector beta = A.colPivHouseholderQr().solve(y);
    const Matrix Xt = random_matrix(8, 5, seed + 50);
    Matrix At(8, 6);
    At << Vector::Ones(8), Xt;
    const Vector expected = At * beta;
    EXPECT_LT((p.predict(Xt) - expected).cwiseAbs().maxCoeff(), 1e-8 * (1.0 + expected.cwiseAbs().maxCoeff()));
  }
}

TEST(Pls, ScoresComeFromRotations) {
  const Matrix X = random_matrix(20, 4, 3);
  const Vector y = X * Vector::LinSpaced(4, 1.0, 2.0) + random_matrix(20, 1, 4).col(0);
  const PlsDecomposition p = fit_pls(X, y, 3);
  const Matrix Xc = X.rowwise() - X.colwise().mean();
  EXPECT_LT((Xc * p.rotations - p.scores).cwiseAbs().maxCoeff(), 1e-10);
  for (Eigen::Index l = 0; l < 3; ++l) {
    EXPECT_NEAR(p.weights.col(l).norm(), 1.0, 1e-12);
    Eigen::Index k = 0;
    while (std::abs(p.weights(k, l)) <= 1e-12) ++k;
    EXPECT_GT(p.weights(k, l), 0.0);
  }
}

TEST(Pls, SingleInputRecoversSlope) {
  Matrix X(4, 1);
  X << 0, 1, 2, 3;
  const Vector y = (Vector(4) << 1, 3, 5, 7).finished();
  const PlsDecomposition p = fit_pls(X, y, 1);
  EXPECT_DOUBLE_EQ(p.weights(0, 0), 1.0);
  EXPECT_NEAR(p.rotations(0, 0) * p.y_loadings[0], 2.0, 1e-12);
}

TEST(Pls, Errors) {
  const Matrix X = random_matrix(6, 3, 1);
  EXPECT_EQ(code_of([&] { fit_pls(X, Vector::Ones(6), 1); }), ErrorCode::DegenerateResponse);
  EXPECT_EQ(code_of([&] { fit_pls(X, X.col(0), 0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { fit_pls(X, X.col(0), 4); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { fit_pls(Matrix::Ones(6, 3), X.col(0), 1); }), ErrorCode::InvalidArgument);
}

TEST(Pls, TruncatesOnExactlyLinearResponse) {
  // Symmetric axis cloud: X_c^T X_c is a multiple of I, so one component
  // captures a linear response exactly.
  Matrix X = Matrix::Zero(9, 4);
  for (Eigen::Index j = 0; j < 4; ++j) {
    X(1 + 2 * j, j) = 1e-3;
    X(2 + 2 * j, j) = -1e-3;
  }
  const Vector y = X * (Vector(4) << 0.5, -1.0, 2.0, 0.0).finished();
  EXPECT_EQ(code_of([&] { fit_pls(X, y, 3); }), ErrorCode::DegenerateResponse);
  const PlsDecomposition p = fit_pls_truncating(X, y, 3);
  EXPECT_EQ(p.components(), 1);
  EXPECT_LT((p.predict(X) - y).cwiseAbs().maxCoeff(), 1e-15);
}
