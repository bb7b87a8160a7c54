#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gekrig/errors.hpp"
#include "gekrig/kernels.hpp"

using namespace gekrig;

namespace {

Vector uniform_vec(std::mt19937_64& rng, Eigen::Index d, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(d);
  for (auto& x : v) x = u(rng);
  return v;
}

Matrix uniform_mat(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double lo = 0.0, double hi = 1.0) {
  Matrix M(r, c);
  for (Eigen::Index i = 0; i < r; ++i) M.row(i) = uniform_vec(rng, c, lo, hi).transpose();
  return M;
}

}  // namespace

TEST(Correlate, GaussianValue) {
  const KernelSpec s = KernelSpec::sq_exp((Vector(2) << 1.0, 2.0).finished());
  const Vector x = Vector::Zero(2), xp = (Vector(2) << 1.0, 0.5).finished();
  EXPECT_DOUBLE_EQ(correlate(s, x, xp), std::exp(-1.5));
  EXPECT_DOUBLE_EQ(correlate(s, x, x), 1.0);
  EXPECT_DOUBLE_EQ(correlate(s, x, xp), correlate(s, xp, x));
}

TEST(Correlate, ProjectedKernelsMatchEffectiveWeights) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index d = 2 + k % 7, h = 1 + k % 3;
    const Matrix C = uniform_mat(rng, d, h, -1.0, 1.0);
    const Vector theta = uniform_vec(rng, h, 0.01, 5.0);
    for (const KernelSpec& s : {KernelSpec::kpls(theta, C), KernelSpec::gekpls(theta, C.cwiseAbs())}) {
      const KernelSpec eta = KernelSpec::sq_exp(s.effective_weights());
      const Vector x = uniform_vec(rng, d), xp = uniform_vec(rng, d);
      EXPECT_NEAR(correlate(s, x, xp), correlate(eta, x, xp), 1e-12);
    }
  }
}

TEST(Correlate, EffectiveWeightsAreSquaredCoefficientSums) {
  Matrix C(2, 2);
  C << 1.0, 2.0, -3.0, 0.5;
  const KernelSpec s = KernelSpec::kpls((Vector(2) << 0.1, 1.0).finished(), C);
  EXPECT_NEAR(s.effective_weights()[0], 0.1 * 1.0 + 1.0 * 4.0, 1e-15);
  EXPECT_NEAR(s.effective_weights()[1], 0.1 * 9.0 + 1.0 * 0.25, 1e-15);
  EXPECT_EQ(s.feature_map(), C.cwiseAbs2());
}

TEST(Correlate, GradientBlocksMatchFiniteDifferences) {
  std::mt19937_64 rng(5);
  const double h = 1e-5;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index d = 1 + k % 5;
    const KernelSpec s = KernelSpec::sq_exp(uniform_vec(rng, d, 0.1, 3.0));
    const Vector x = uniform_vec(rng, d), xp = uniform_vec(rng, d);
    const GradBlocks g = correlate_grad_blocks(s, x, xp);
    const double scale = 1.0;  // r <= 1 bounds every block entry's natural size
    for (Eigen::Index a = 0; a < d; ++a) {
      Vector xa = x, xb = x;
      xa[a] += h;
      xb[a] -= h;
      const double fd1 = (correlate(s, xa, xp) - correlate(s, xb, xp)) / (2 * h);
      EXPECT_NEAR(g.d_first[a], fd1, 1e-5 * (scale + std::abs(fd1)));
      Vector pa = xp, pb = xp;
      pa[a] += h;
      pb[a] -= h;
      const double fd2 = (correlate(s, x, pa) - correlate(s, x, pb)) / (2 * h);
      EXPECT_NEAR(g.d_second[a], fd2, 1e-5 * (scale + std::abs(fd2)));
      for (Eigen::Index b = 0; b < d; ++b) {
        const double hh = 1e-4;
        auto r = [&](double sa, double sb) {
          Vector u = x, v = xp;
          u[a] += sa;
          v[b] += sb;
          return correlate(s, u, v);
        };
        const double fdx = (r(hh, hh) - r(hh, -hh) - r(-hh, hh) + r(-hh, -hh)) / (4 * hh * hh);
        EXPECT_NEAR(g.d_cross(a, b), fdx, 1e-5 * (scale + std::abs(fdx))) << "a=" << a << " b=" << b;
      }
    }
  }
}

TEST(Correlate, StrictBlocksDropTheDiagonalTerm) {
  const KernelSpec s = KernelSpec::sq_exp((Vector(3) << 0.5, 1.0, 2.0).finished());
  const Vector x = (Vector(3) << 0.1, 0.2, 0.3).finished(), xp = (Vector(3) << 0.4, 0.1, 0.9).finished();
  const GradBlocks a = correlate_grad_blocks(s, x, xp, DerivativeConvention::Analytic);
  const GradBlocks p = correlate_grad_blocks(s, x, xp, DerivativeConvention::StrictPaperBlocks);
  const double r = correlate(s, x, xp);
  const Matrix diff = a.d_cross - p.d_cross;
  EXPECT_LT((diff - Matrix((2.0 * r * s.theta).asDiagonal())).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(a.d_first, p.d_first);
}

TEST(Correlate, InvalidKernels) {
  for (const auto& f : std::vector<std::function<void()>>{
           [] { KernelSpec::sq_exp((Vector(2) << 1.0, -1.0).finished()).validate(); },
           [] { KernelSpec::sq_exp((Vector(1) << NAN).finished()).validate(); },
           [] { KernelSpec::sq_exp(Vector::Ones(2), -1e-3).validate(); },
           [] { KernelSpec::kpls(Vector::Ones(2), Matrix::Ones(3, 1)).validate(); }}) {
    try {
      f();
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidKernel);
    }
  }
}

TEST(Factorize, NuggetLadderEscalates) {
  Matrix pts(3, 1);
  pts << 0.2, 0.2 + 1e-9, 0.7;
  const Matrix R = correlation_matrix(KernelSpec::sq_exp(Vector::Ones(1)), pts);
  const CorrelationMatrix c = factorize(R, 0.0);
  EXPECT_GE(c.nugget_used, 1e-10);
  EXPECT_LE(c.nugget_used, 1e-4);
  const Matrix Rn = R + c.nugget_used * Matrix::Identity(3, 3);
  EXPECT_LT((c.chol.reconstructedMatrix() - Rn).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(c.logdet, std::log(Rn.determinant()), 1e-8);
}

TEST(Factorize, TinyNuggetJumpsToLadderStart) {
  // Smallest eigenvalue -1e-12: fails below the first rung, passes at it.
  Matrix R(2, 2);
  R << 1.0, 1.0 + 1e-12, 1.0 + 1e-12, 1.0;
  EXPECT_EQ(factorize(R, kMachineNugget).nugget_used, 1e-10);
  const CorrelationMatrix ok = factorize(Matrix::Identity(2, 2), kMachineNugget);
  EXPECT_EQ(ok.nugget_used, kMachineNugget);
}

TEST(Factorize, IndefiniteMatrixIsIllConditioned) {
  Matrix R(2, 2);
  R << 1.0, 2.0, 2.0, 1.0;
  try {
    factorize(R, 1e-10);
    FAIL();
  } catch (const ConditioningError& e) {
    EXPECT_EQ(e.code(), ErrorCode::IllConditioned);
    EXPECT_TRUE(std::isinf(e.condition_estimate()) || e.condition_estimate() > 1.0);
  }
}

TEST(Factorize, FixedNuggetUsesExactValue) {
  const CorrelationMatrix c = factorize_fixed(Matrix::Identity(3, 3), 1e-6);
  EXPECT_EQ(c.nugget_used, 1e-6);
  EXPECT_NEAR(c.logdet, 3.0 * std::log(1.0 + 1e-6), 1e-15);
}

TEST(PairwiseFeatures, ReproducesCorrelationMatrices) {
  std::mt19937_64 rng(9);
  const Matrix X = uniform_mat(rng, 15, 4);
  const Vector theta = uniform_vec(rng, 4, 0.1, 4.0);
  const PairwiseFeatures pf(X, Matrix::Identity(4, 4));
  EXPECT_EQ(pf.num_pairs(), 15 * 14 / 2);
  EXPECT_EQ(pf.pair_index(0, 1), 0);
  EXPECT_EQ(pf.pair_index(13, 14), pf.num_pairs() - 1);
  EXPECT_LT((pf.correlation(theta) - correlation_matrix(KernelSpec::sq_exp(theta), X)).cwiseAbs().maxCoeff(), 1e-13);

  const Matrix C = uniform_mat(rng, 4, 2, -1.0, 1.0);
  const KernelSpec k = KernelSpec::kpls(theta.head(2), C);
  const PairwiseFeatures pk(X, k.feature_map());
  EXPECT_LT((pk.correlation(theta.head(2)) - correlation_matrix(k, X)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(DirectGek, MatrixLayout) {
  std::mt19937_64 rng(3);
  const Eigen::Index n = 4, d = 3;
  const Matrix X = uniform_mat(rng, n, d);
  const KernelSpec s = KernelSpec::sq_exp(uniform_vec(rng, d, 0.5, 2.0));
  const Matrix R = direct_gek_matrix(s, X);
  ASSERT_EQ(R.rows(), n * (d + 1));
  EXPECT_LT((R - R.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const GradBlocks g = correlate_grad_blocks(s, X.row(i).transpose(), X.row(j).transpose());
      EXPECT_DOUBLE_EQ(R(i, j), correlate(s, X.row(i).transpose(), X.row(j).transpose()));
      for (Eigen::Index k = 0; k < d; ++k) {
        EXPECT_NEAR(R(i, n + j * d + k), g.d_second[k], 1e-14);
        for (Eigen::Index l = 0; l < d; ++l) EXPECT_NEAR(R(n + i * d + k, n + j * d + l), g.d_cross(k, l), 1e-14);
      }
    }
  const Vector r = correlate_vec_gek(s, X.row(1).transpose(), X);
  EXPECT_LT((r - R.row(1).transpose()).cwiseAbs().maxCoeff(), 1e-14);
}
