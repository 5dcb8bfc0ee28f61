#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "xxz/dense.hpp"
#include "xxz/zcharge_mpo.hpp"
#include "zcharge_oracle.hpp"

using namespace xxz;
using xxz::test::kron_word;

namespace {

const std::vector<std::pair<int, int>> kResonances = {{1, 2}, {1, 3}, {2, 3}, {1, 4}, {3, 4},
                                                      {1, 5}, {2, 5}, {3, 5}, {4, 5}};

Eigen::MatrixXcd ladder_pair(const std::string& a, const std::string& b) {
  return Complex(0.0, 1.0) * (kron_word(a) - kron_word(b));
}

}  // namespace

TEST(Resonance, Validation) {
  EXPECT_THROW(ResonantAnisotropy(2, 4), InvalidResonance);
  EXPECT_THROW(ResonantAnisotropy(1, 1), InvalidResonance);
  EXPECT_THROW(ResonantAnisotropy(0, 3), InvalidResonance);
  EXPECT_EQ(ResonantAnisotropy(1, 3).delta(), 0.5);
  EXPECT_EQ(ResonantAnisotropy(1, 2).delta(), 0.0);
  EXPECT_NEAR(ResonantAnisotropy(2, 5).delta(), std::cos(2 * std::numbers::pi / 5), 1e-15);
}

TEST(Mpo, EntriesMatchExplicitMatrices) {
  for (auto [l, m] : kResonances) {
    ResonantAnisotropy res(l, m);
    auto mpo = build_mpo(res);
    ASSERT_EQ(mpo.a0.rows(), m + 1);
    auto plain = xxz::test::plain_mpo(res.phi(), m + 3);
    EXPECT_LT((mpo.a0 - plain.a0.topLeftCorner(m + 1, m + 1)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((mpo.aplus - plain.ap.topLeftCorner(m + 1, m + 1)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((mpo.aminus - plain.am.topLeftCorner(m + 1, m + 1)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Mpo, PrintedLowOrderDensities) {
  for (auto [l, m] : kResonances) {
    ResonantAnisotropy res(l, m);
    const double delta = res.delta();
    auto mpo = build_mpo(res);
    EXPECT_LT((embed(shift(density(mpo, 2), 1), 2) - ladder_pair("+-", "-+")).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((embed(shift(density(mpo, 3), 1), 3) - delta * ladder_pair("+0-", "-0+")).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::MatrixXcd q4 = delta * delta * ladder_pair("+00-", "-00+") +
                          2.0 * delta * (delta * delta - 1.0) * ladder_pair("++--", "--++");
    EXPECT_LT((embed(shift(density(mpo, 4), 1), 4) - q4).cwiseAbs().maxCoeff(), 1e-12) << l << "/" << m;
  }
}

TEST(Mpo, LowestDensityIsQuarterCurrent) {
  auto q2 = density(build_mpo(ResonantAnisotropy(1, 3)), 2);
  EXPECT_TRUE(approx_equal(q2, spin_current_density() * 0.25, 1e-15));
}

TEST(Mpo, SweepMatchesEnumeration) {
  for (auto [l, m] : kResonances) {
    auto dens = zcharge_densities(ResonantAnisotropy(l, m), 7);
    for (int d = 2; d <= 7; ++d) {
      EXPECT_LE(max_coefficient_distance(dens.by_order.at(d), xxz::test::brute_force_density(l, m, d)), 1e-12)
          << l << "/" << m << " d=" << d;
    }
  }
}

TEST(Mpo, DensitiesAreHermitianAndSpinFlipOdd) {
  auto dens = zcharge_densities(ResonantAnisotropy(2, 5), 8);
  for (const auto& [d, q] : dens.by_order) {
    EXPECT_TRUE(approx_equal(adjoint(q), q, 1e-14)) << d;
    EXPECT_TRUE(approx_equal(spin_flip(q), q * -1.0, 1e-14)) << d;
  }
}

TEST(Mpo, NormsThreeWays) {
  for (auto [l, m] : kResonances) {
    auto mpo = build_mpo(ResonantAnisotropy(l, m));
    auto ladders = ladder_densities(mpo, 8);
    auto transfer = hs_norms_squared_by_transfer(mpo, 8);
    for (int d = 2; d <= 8; ++d) {
      double explicit_norm = std::pow(hs_norm(to_local_operator(ladders[static_cast<std::size_t>(d - 2)])), 2);
      EXPECT_NEAR(hs_norm_squared(ladders[static_cast<std::size_t>(d - 2)]), explicit_norm, 1e-13);
      EXPECT_NEAR(transfer[static_cast<std::size_t>(d - 2)], explicit_norm, 1e-13);
    }
  }
}

TEST(Mpo, OperatorNormSpotCheck) {
  auto dens = zcharge_densities(ResonantAnisotropy(1, 3), 10);
  for (int d = 2; d <= 10; ++d) {
    const auto& q = dens.by_order.at(d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(embed(shift(q, 1), d), Eigen::EigenvaluesOnly);
    double op = eig.eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_GE(op, hs_norm(q) - 1e-12) << d;
    EXPECT_LE(op, coefficient_norm1(q) + 1e-12) << d;
  }
}

TEST(Boundary, DenseChainIdentity) {
  // [H_n, Q_n] = -2i z_1 + 2i z_n with dense matrices, d_max = n.
  const int n = 6;
  ResonantAnisotropy res(1, 3);
  Eigen::MatrixXcd h = xxz::test::dense_xxz(n, res.delta(), 0.0);
  Eigen::MatrixXcd q = xxz::test::dense_of(assemble_charge(res, n, n), n);
  Eigen::MatrixXcd expect = Complex(0.0, -2.0) * kron_word("z00000") + Complex(0.0, 2.0) * kron_word("00000z");
  EXPECT_LT((h * q - q * h - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Boundary, ResidualVanishesAtFullOrder) {
  for (auto [l, m] : {std::pair{1, 2}, {1, 3}, {2, 5}}) {
    auto r = boundary_residual(ResonantAnisotropy(l, m), 9, 9);
    EXPECT_LT(r.residual_norm, 1e-10);
  }
  EXPECT_LT(boundary_residual(ResonantAnisotropy(1, 2), 2, 2).residual_norm, 1e-12);
}

// Monotone only from d_max = m on; (1,3) rises between d_max = 2 and 3.
TEST(Boundary, HilbertSchmidtResidualDecreases) {
  const int n = 12;
  for (auto [l, m] : {std::pair{1, 3}, {2, 5}}) {
    ResonantAnisotropy res(l, m);
    double prev = 1e300;
    for (int d = m; d <= n; ++d) {
      double v = boundary_residual(res, d, n).residual_hs_norm;
      EXPECT_LE(v, prev + 1e-12) << l << "/" << m << " d=" << d;
      prev = v;
    }
    EXPECT_LT(prev, 1e-10);
    EXPECT_LT(boundary_residual(res, 10, n).residual_hs_norm, boundary_residual(res, 4, n).residual_hs_norm);
  }
}

TEST(Boundary, Preconditions) {
  EXPECT_THROW(assemble_charge(ResonantAnisotropy(1, 3), 8, 6), InvalidArgument);
  EXPECT_THROW(assemble_charge(ResonantAnisotropy(1, 3), 1, 6), InvalidArgument);
}

TEST(Decay, ResonantNormsDecay) {
  auto fit = norm_decay_fit(ResonantAnisotropy(1, 3), 20);
  EXPECT_GT(fit.xi, 0.0);
  EXPECT_GT(fit.gamma, 0.0);
  EXPECT_THROW(norm_decay_fit(ResonantAnisotropy(1, 3), 5), InvalidArgument);
}

TEST(Decay, RecoversSyntheticExponential) {
  std::vector<double> norms;
  for (int d = 2; d <= 12; ++d) norms.push_back(3.0 * std::exp(-0.7 * d));
  auto fit = fit_norm_decay(norms);
  EXPECT_NEAR(fit.gamma, 3.0, 1e-12);
  EXPECT_NEAR(fit.xi, 0.7, 1e-12);
  std::vector<double> flat{1.0, 0.0, 0.0};
  EXPECT_THROW(fit_norm_decay(flat), DegenerateFit);
}

TEST(Decay, MarginalPointsDoNotDecay) {
  for (int sign : {1, -1}) {
    auto dens = marginal_charge_densities(sign, 8);
    double phi = sign == 1 ? 0.0 : std::numbers::pi;
    for (const auto& [d, q] : dens) {
      EXPECT_NEAR(hs_norm(q), hs_norm(dens.at(2)), 1e-14);
      EXPECT_LE(max_coefficient_distance(q, xxz::test::brute_force_density_at(phi, d)), 1e-12) << d;
    }
  }
  EXPECT_THROW(marginal_charge_densities(0, 4), InvalidArgument);
}
