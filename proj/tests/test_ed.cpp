#include <cmath>
#include <cstdlib>
#include <random>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "oracle.hpp"
#include "xxz/ed/light_cone.hpp"

using namespace xxz;
using namespace xxz::ed;
using xxz::test::Mat;

namespace {

Mat gibbs(const Mat& h, double beta) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(h);
  Eigen::VectorXd w = (-beta * (eig.eigenvalues().array() - eig.eigenvalues().minCoeff())).exp();
  w /= w.sum();
  return eig.eigenvectors() * w.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
}

/// (1/n) Re tr(rho J e^{iHt} J e^{-iHt}) with a dense matrix exponential.
double dense_cn(const Mat& h, const Mat& j, const Mat& rho, double t, int n) {
  Mat u = (Complex(0.0, -t) * h).exp();
  Mat jt = u.adjoint() * j * u;
  return (rho * j * jt).trace().real() / n;
}

double spectral_norm(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

}  // namespace

TEST(Spectrum, TwoSites) {
  auto heis = diagonalize(2, {1.0, 0.0});
  Eigen::Vector4d e1(-3, 1, 1, 1);
  EXPECT_LT((heis.energies - e1).cwiseAbs().maxCoeff(), 1e-13);
  auto xx = diagonalize(2, {0.0, 0.0});
  Eigen::Vector4d e0(-2, 0, 0, 2);
  EXPECT_LT((xx.energies - e0).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_THROW(diagonalize(15, {0.5, 0.0}), SizeTooLarge);
  EXPECT_THROW(diagonalize(1, {0.5, 0.0}), SizeTooLarge);
}

TEST(Spectrum, MatchesDenseEigensolver) {
  const int n = 6;
  auto spec = diagonalize(n, {0.7, 0.3});
  Mat h = xxz::test::dense_xxz(n, 0.7, 0.3);
  EXPECT_LT((to_dense(to_blocks(chain_hamiltonian(n, {0.7, 0.3}), *spec.basis), *spec.basis) - h)
                .cwiseAbs()
                .maxCoeff(),
            1e-14);
  Eigen::SelfAdjointEigenSolver<Mat> eig(h, Eigen::EigenvaluesOnly);
  EXPECT_LT((spec.energies - eig.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((to_dense(spec.from_eigenbasis(spec.current), *spec.basis) - xxz::test::dense_current(n))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(Autocorrelation, InitialValue) {
  auto spec = diagonalize(2, {0.5, 0.0});
  EXPECT_NEAR(cn_of_t(spec, 0.0, 0.0), 4.0, 1e-13);
}

TEST(Autocorrelation, SpectralMatchesMatrixExponential) {
  for (auto [n, delta, chi, beta] : {std::tuple{4, 0.5, 0.0, 0.0}, {6, 0.3, 0.2, 0.8}, {7, 1.2, 0.0, 0.5}}) {
    auto spec = diagonalize(n, {delta, chi});
    Mat h = xxz::test::dense_xxz(n, delta, chi);
    Mat j = xxz::test::dense_current(n);
    Mat rho = gibbs(h, beta);
    for (double t : {0.0, 0.7, 3.1, 11.0, 20.0}) {
      EXPECT_NEAR(cn_of_t(spec, t, beta), dense_cn(h, j, rho, t, n), 1e-8) << n << " t=" << t;
    }
  }
}

TEST(Autocorrelation, FiniteWindowAverageMatchesQuadrature) {
  auto spec = diagonalize(5, {0.4, 0.0});
  const double t_max = 6.0;
  const int steps = 6000;
  double s = 0.0;
  for (int i = 0; i <= steps; ++i) {
    double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    s += w * cn_of_t(spec, t_max * i / steps, 0.3);
  }
  EXPECT_NEAR(finite_time_average(spec, 0.3, t_max), s / steps, 1e-6);
}

TEST(Autocorrelation, InfiniteTimeAverageIsCesaroLimit) {
  auto spec = diagonalize(5, {0.4, 0.1});
  double gap = 1e300;
  for (Eigen::Index i = 1; i < spec.energies.size(); ++i) {
    double d = spec.energies(i) - spec.energies(i - 1);
    if (d > spec.degeneracy_tol) gap = std::min(gap, d);
  }
  double t_max = 1e3 / gap;
  double cbar = time_averaged_autocorr(spec, 0.5);
  double scale = cn_of_t(spec, 0.0, 0.5);
  EXPECT_LT(std::abs(finite_time_average(spec, 0.5, t_max) - cbar), 10.0 * scale / (gap * t_max));
}

TEST(Autocorrelation, OpenChainCurrentIsTimeDerivative) {
  // J = i[H, P] with P = sum_x x z_x, so the infinite-time average vanishes.
  const int n = 6;
  Mat h = xxz::test::dense_xxz(n, 0.6, 0.0);
  LocalOperator p;
  for (int x = 1; x <= n; ++x) p.accumulate(PauliString::single(x, Pauli::Z), static_cast<double>(x));
  Mat pd = xxz::test::dense_of(p, n);
  EXPECT_LT((Complex(0.0, 1.0) * (h * pd - pd * h) - xxz::test::dense_current(n)).cwiseAbs().maxCoeff(), 1e-12);
  auto spec = diagonalize(8, {0.6, 0.0});
  EXPECT_LT(std::abs(time_averaged_autocorr(spec, 0.0)), 1e-12);
  EXPECT_LT(std::abs(time_averaged_autocorr(spec, 1.0)), 1e-12);
}

TEST(Autocorrelation, ConservedObservableKeepsItsWeight) {
  const int n = 6;
  auto spec = diagonalize(n, {0.5, 0.0});
  auto m = spec.to_eigenbasis(to_blocks(chain_magnetization(n), *spec.basis));
  // (1/n) <M^2> at infinite temperature is 1.
  EXPECT_NEAR(time_averaged_autocorr(spec, 0.0, m), 1.0, 1e-12);
}

TEST(Autocorrelation, TimeGrid) {
  auto g = time_grid(1.0, 0.1);
  ASSERT_EQ(g.size(), 11u);
  EXPECT_DOUBLE_EQ(g.back(), 1.0);
  auto spec = diagonalize(3, {0.5, 0.0});
  auto r = autocorrelation(spec, 0.2, g);
  EXPECT_EQ(r.cn_values.size(), g.size());
}

TEST(Suzuki, HoldsWithMagnetizationAndEnergy) {
  for (auto [n, delta, chi, beta] : {std::tuple{4, 0.5, 0.0, 0.0}, {6, 1.3, 0.4, 0.7}, {7, 0.2, 0.0, 2.0}}) {
    auto spec = diagonalize(n, {delta, chi});
    std::vector<LocalOperator> set{chain_magnetization(n), chain_hamiltonian(n, {delta, chi})};
    auto r = suzuki_finite_check(spec, set, beta);
    EXPECT_TRUE(r.holds);
    EXPECT_GE(r.lhs, r.rhs - 1e-8);
  }
}

TEST(Suzuki, RejectsNonConserved) {
  auto spec = diagonalize(5, {0.5, 0.0});
  std::vector<LocalOperator> set{chain_current(5)};
  EXPECT_THROW(suzuki_finite_check(spec, set, 0.5), NotConserved);
}

TEST(KuboMori, HighTemperatureLimit) {
  auto spec = diagonalize(6, {0.5, 0.0});
  auto r = kubo_mori_compare(spec, 1e-3, 10.0);
  EXPECT_LT(r.gap, 1e-6);
  auto finite = kubo_mori_compare(diagonalize(4, {0.5, 0.0}), 1.0, 10.0);
  EXPECT_TRUE(std::isfinite(finite.gap));
  EXPECT_GT(finite.gap, 0.0);
  EXPECT_THROW(kubo_mori_compare(spec, 0.0, 10.0), InvalidArgument);
}

TEST(KuboMori, GapShrinksWithTemperature) {
  auto spec = diagonalize(6, {0.5, 0.0});
  double g1 = kubo_mori_compare(spec, 0.1, 10.0).gap;
  double g2 = kubo_mori_compare(spec, 0.01, 10.0).gap;
  EXPECT_LT(g2, g1);
}

TEST(LightCone, CommutatorNormsMatchDense) {
  const int n = 6;
  auto spec = diagonalize(n, {0.5, 0.0});
  Mat h = xxz::test::dense_xxz(n, 0.5, 0.0);
  auto z1 = LocalOperator::term(PauliString::single(1, Pauli::Z));
  std::vector<double> times{0.0, 0.4, 1.3};
  std::vector<int> xs{0, 1, 3, 5};
  auto table = commutator_norm_table(spec, z1, z1, times, xs);
  Mat f = xxz::test::dense_of(z1, n);
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    Mat u = (Complex(0.0, -times[ti]) * h).exp();
    Mat ft = u.adjoint() * f * u;
    for (std::size_t xi = 0; xi < xs.size(); ++xi) {
      Mat g = xxz::test::dense_of(shift(z1, xs[xi]), n);
      EXPECT_NEAR(table[xi][ti], spectral_norm(ft * g - g * ft), 1e-10) << ti << "," << xi;
    }
  }
  for (std::size_t xi = 0; xi < xs.size(); ++xi) EXPECT_EQ(table[xi][0], 0.0);
}

TEST(LightCone, ClusteringMatchesDense) {
  const int n = 6;
  const double beta = 0.8;
  auto spec = diagonalize(n, {0.5, 0.0});
  Mat rho = gibbs(xxz::test::dense_xxz(n, 0.5, 0.0), beta);
  auto z1 = LocalOperator::term(PauliString::single(1, Pauli::Z));
  std::vector<int> xs{1, 2, 4};
  auto c = clustering_table(spec, z1, z1, beta, xs);
  Mat f = xxz::test::dense_of(z1, n);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Mat g = xxz::test::dense_of(shift(z1, xs[i]), n);
    Complex ref = (rho * f * g).trace() - (rho * f).trace() * (rho * g).trace();
    EXPECT_NEAR(c[i], std::abs(ref), 1e-12);
  }
}

TEST(LightCone, LanczosNormMatchesDense) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss;
  const int dim = 400;
  Mat a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
  Mat h = a + a.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> eig(h, Eigen::EigenvaluesOnly);
  double ref = eig.eigenvalues().cwiseAbs().maxCoeff();
  EXPECT_NEAR(hermitian_norm(h), ref, 1e-9 * ref);
}

TEST(LightCone, FitsOnSmallChain) {
  auto z1 = LocalOperator::term(PauliString::single(1, Pauli::Z));
  std::vector<double> times{0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<int> xs{1, 2, 3, 4, 5};
  auto fit = light_cone_scan(8, {0.5, 0.0}, z1, z1, 0.5, times, xs);
  EXPECT_GT(fit.fitted_v, 0.0);
  EXPECT_GT(fit.fitted_mu, 0.0);
  EXPECT_GT(fit.fitted_rho, 0.0);
  EXPECT_GT(fit.fitted_kappa, 0.0);
  EXPECT_THROW(light_cone_scan(13, {0.5, 0.0}, z1, z1, 0.5, times, xs), SizeTooLarge);
}

TEST(LightCone, ParallelTablesAreDeterministic) {
  auto spec = diagonalize(6, {0.5, 0.0});
  auto z1 = LocalOperator::term(PauliString::single(1, Pauli::Z));
  std::vector<double> times{0.3, 0.6, 0.9, 1.2};
  std::vector<int> xs{1, 2, 3};
  setenv("DRUDE_BOUND_THREADS", "1", 1);
  auto serial = commutator_norm_table(spec, z1, z1, times, xs);
  setenv("DRUDE_BOUND_THREADS", "3", 1);
  auto threaded = commutator_norm_table(spec, z1, z1, times, xs);
  unsetenv("DRUDE_BOUND_THREADS");
  EXPECT_EQ(serial, threaded);
}

TEST(Sweep, RowsAndGuards) {
  ResonantAnisotropy res(1, 3);
  std::vector<int> ns{4, 6, 8};
  auto rows = bound_vs_ed_sweep(res, ns, 12);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.bound, rows.front().bound);
    EXPECT_NEAR(r.four_dz, 2.25, 1e-14);
    EXPECT_LT(std::abs(r.cbar_n), 1e-12);
    EXPECT_GT(r.window_average, 0.0);
  }
  std::vector<int> big{14};
  EXPECT_THROW(bound_vs_ed_sweep(res, big, 12), SizeTooLarge);
}

TEST(Sweep, FreeFermionWindowAverageExceedsInteracting) {
  std::vector<int> ns{8};
  double free = bound_vs_ed_sweep(ResonantAnisotropy(1, 2), ns, 4).front().window_average;
  double inter = bound_vs_ed_sweep(ResonantAnisotropy(1, 3), ns, 4).front().window_average;
  EXPECT_GT(free, inter);
}
