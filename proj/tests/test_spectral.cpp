#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "freemax/spectral.hpp"
#include "freemax/stats.hpp"

using namespace freemax;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

namespace {

HermitianMatrix diag(std::vector<double> v) {
  MatrixXcd m = MatrixXcd::Zero(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m(i, i) = v[i];
  return HermitianMatrix(std::move(m));
}

double max_abs(const MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<double> spectrum(const HermitianMatrix& h) {
  const auto d = eig(h);
  return std::vector<double>(d.eigenvalues.data(), d.eigenvalues.data() + h.dim());
}

}  // namespace

TEST_CASE("HermitianMatrix validation") {
  MatrixXcd bad(2, 2);
  bad << 1.0, std::complex<double>(0, 1), std::complex<double>(0, 1), 2.0;
  CHECK_THROWS_AS(HermitianMatrix{bad}, std::invalid_argument);
  MatrixXcd good(2, 2);
  good << 1.0, std::complex<double>(0, 1), std::complex<double>(0, -1), 2.0;
  CHECK_NOTHROW(HermitianMatrix{good});
}

TEST_CASE("eig examples") {
  const auto d = eig(diag({3, 1}));
  CHECK(d.eigenvalues(0) == 3.0);
  CHECK(d.eigenvalues(1) == 1.0);
  CHECK(std::abs(d.eigenvectors(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(d.eigenvectors(1, 1)) == doctest::Approx(1.0).epsilon(1e-12));

  const auto di = eig(HermitianMatrix(MatrixXcd::Identity(5, 5)));
  for (int i = 0; i < 5; ++i) CHECK(di.eigenvalues(i) == 1.0);

  RngStream rng(31, 0);
  const HermitianMatrix m = rotate_diag({5, 1}, rng);
  const auto dm = eig(m);
  CHECK(dm.eigenvalues(0) == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(dm.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-9));

  // determinism
  const auto d2 = eig(m);
  CHECK(max_abs(d2.eigenvectors - dm.eigenvectors) == 0.0);
}

TEST_CASE("haar_unitary: unitarity, phases, moments") {
  RngStream rng(77, 0);
  const auto u1 = haar_unitary(1, rng);
  CHECK(std::abs(u1(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));

  for (int n : {2, 5, 16}) {
    const auto u = haar_unitary(n, rng);
    CHECK(max_abs(u.adjoint() * u - MatrixXcd::Identity(n, n)) <= 1e-10);
  }

  // E|U_11|^2 = 1/N: 1e4 draws at N=16, 3 sigma band (Beta(1,15) variance)
  const int n = 16, draws = 10000;
  double acc = 0, acc_left = 0, acc_right = 0;
  MatrixXcd v = haar_unitary(n, rng);  // fixed unitary for invariance checks
  for (int d = 0; d < draws; ++d) {
    RngStream s = split(1234, d);
    const auto u = haar_unitary(n, s);
    acc += std::norm(u(0, 0));
    acc_left += std::norm((v * u)(0, 0));
    acc_right += std::norm((u * v)(0, 0));
  }
  const double sigma = std::sqrt(15.0 / (256.0 * 17.0) / draws);
  CHECK(std::fabs(acc / draws - 1.0 / 16) <= 3 * sigma);
  // invariance under fixed left/right multiplication, same statistic
  CHECK(std::fabs(acc_left / draws - 1.0 / 16) <= 3 * sigma);
  CHECK(std::fabs(acc_right / draws - 1.0 / 16) <= 3 * sigma);
}

TEST_CASE("rotate_diag examples") {
  RngStream rng(5, 0);
  const HermitianMatrix c = rotate_diag({2.5, 2.5, 2.5}, rng);
  CHECK(max_abs(c.entries() - 2.5 * MatrixXcd::Identity(3, 3)) <= 1e-12);

  const std::vector<double> vals = {0.3, -1.2, 4.0, 0.3};
  const auto spec = spectrum(rotate_diag(vals, rng));
  std::vector<double> sorted = vals;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (std::size_t i = 0; i < vals.size(); ++i)
    CHECK(spec[i] == doctest::Approx(sorted[i]).epsilon(1e-9));

  const HermitianMatrix m = rotate_diag({1, 0}, rng);
  CHECK(std::fabs(m.entries().trace().real() - 1.0) <= 1e-10);
  CHECK(std::abs(m.entries().determinant()) <= 1e-10);
}

TEST_CASE("spectral_projector examples and ambiguous cuts") {
  const HermitianMatrix m = diag({3, 1});
  const auto p1 = spectral_projector(m, 2.0);
  CHECK(p1.rank() == 1);
  CHECK(std::abs(p1.columns()(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_projector(m, 0.0).rank() == 2);
  CHECK(spectral_projector(m, 4.0).rank() == 0);
  CHECK_THROWS_AS(spectral_projector(m, 1.0 + 1e-12), std::domain_error);
  CHECK_THROWS_AS(spectral_projector(m, 3.0), std::domain_error);
}

TEST_CASE("subspace_sum examples and rank maximality") {
  MatrixXcd e1 = MatrixXcd::Zero(2, 1), e2 = MatrixXcd::Zero(2, 1);
  e1(0, 0) = 1;
  e2(1, 0) = 1;
  const SubspaceBasis a{e1}, b{e2};
  CHECK(subspace_sum(a, b).rank() == 2);
  CHECK(subspace_sum(a, a).rank() == 1);
  CHECK_THROWS_AS(subspace_sum(a, SubspaceBasis(3)), std::invalid_argument);

  // independent Haar-random subspaces have maximal sum rank a.s.
  RngStream rng(99, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 7;
    const int p = 1 + int(rng.uniform() * n);
    const int q = 1 + int(rng.uniform() * n);
    const MatrixXcd u = haar_unitary(n, rng);
    const MatrixXcd v = haar_unitary(n, rng);
    const SubspaceBasis sa{MatrixXcd(u.leftCols(p))};
    const SubspaceBasis sb{MatrixXcd(v.leftCols(q))};
    CHECK(subspace_sum(sa, sb).rank() == std::min(n, p + q));
  }
}

TEST_CASE("spectral_max examples") {
  const HermitianMatrix r = spectral_max(diag({1, 0}), diag({0, 1}));
  CHECK(max_abs(r.entries() - MatrixXcd::Identity(2, 2)) <= 1e-10);

  const HermitianMatrix c = spectral_max(diag({3, 1}), diag({2, 0}));
  MatrixXcd want(2, 2);
  want << 3, 0, 0, 1;
  CHECK(max_abs(c.entries() - want) <= 1e-10);

  RngStream rng(17, 0);
  for (int trial = 0; trial < 200; ++trial) {
    RngStream s = split(17, trial);
    const auto a = rotate_diag({5, 1}, s);
    const auto b = rotate_diag({4, 3}, s);
    const auto spec = spectrum(spectral_max(a, b));
    CHECK(spec[0] == doctest::Approx(5.0).epsilon(1e-8));
    CHECK(spec[1] == doctest::Approx(4.0).epsilon(1e-8));
  }
}

TEST_CASE("spectral_max: lattice and genericity properties") {
  for (int trial = 0; trial < 60; ++trial) {
    RngStream s = split(4242, trial);
    const int n = 2 + trial % 4;
    std::vector<double> va(n), vb(n), vc(n);
    for (auto& x : va) x = 4 * s.uniform();
    for (auto& x : vb) x = 4 * s.uniform();
    for (auto& x : vc) x = 4 * s.uniform();
    const auto a = rotate_diag(va, s);
    const auto b = rotate_diag(vb, s);
    const auto c = rotate_diag(vc, s);

    // idempotent
    CHECK(max_abs(spectral_max(a, a).entries() - a.entries()) <= 1e-8);
    // commutative
    CHECK(max_abs(spectral_max(a, b).entries() - spectral_max(b, a).entries()) <= 1e-8);

    // associative: compare spectra and generic spectral projectors
    const auto ab_c = spectral_max(spectral_max(a, b), c);
    const auto a_bc = spectral_max(a, spectral_max(b, c));
    const auto s1 = spectrum(ab_c), s2 = spectrum(a_bc);
    for (int i = 0; i < n; ++i) CHECK(std::fabs(s1[i] - s2[i]) <= 1e-7);
    const double t = 2.0 + 1e-3;  // generic cut for continuous spectra
    const auto p1 = spectral_projector(ab_c, t).projector();
    const auto p2 = spectral_projector(a_bc, t).projector();
    CHECK(max_abs(p1 - p2) <= 1e-7);

    // dominance: ordered spectrum of a v b dominates that of a entrywise
    const auto ab = spectral_max(a, b);
    const auto sab = spectrum(ab), saa = spectrum(a);
    for (int i = 0; i < n; ++i) CHECK(sab[i] >= saa[i] - 1e-10);

    // genericity: spectrum(a v b) equals the top-n of the merged spectra
    std::vector<double> merged = va;
    merged.insert(merged.end(), vb.begin(), vb.end());
    const auto top = top_n_merge(merged, n);
    for (int i = 0; i < n; ++i) CHECK(std::fabs(sab[i] - top[i]) <= 1e-8);

    // unitary equivariance
    const MatrixXcd u = haar_unitary(n, s);
    const HermitianMatrix ua(0.5 * (u * a.entries() * u.adjoint() +
                                    (u * a.entries() * u.adjoint()).adjoint().eval()));
    const HermitianMatrix ub(0.5 * (u * b.entries() * u.adjoint() +
                                    (u * b.entries() * u.adjoint()).adjoint().eval()));
    const MatrixXcd lhs = spectral_max(ua, ub).entries();
    const MatrixXcd rhs = u * ab.entries() * u.adjoint();
    CHECK(max_abs(lhs - rhs) <= 1e-8);

    // defining property: chi_(t,inf)(a v b) projects onto Im chi(a) + Im chi(b)
    const auto pab = spectral_projector(ab, t);
    const auto psum = subspace_sum(spectral_projector(a, t), spectral_projector(b, t));
    CHECK(pab.rank() == psum.rank());
    CHECK(max_abs(pab.projector() - psum.projector()) <= 1e-7);
  }
}

TEST_CASE("empirical_spectral_law examples") {
  const Cdf one = empirical_spectral_law(diag({2.5, 2.5, 2.5}));
  CHECK(one.eval(2.5) == 1.0);
  CHECK(one.eval(2.4999) == 0.0);

  const Cdf steps = empirical_spectral_law(diag({0.25, 0.5, 0.75, 1.0}));
  CHECK(steps.eval(0.5) == 0.5);
  CHECK(steps.eval(0.75) == 0.75);

  // Eq-(2) form: ESL(a v b) = (ESL(a) + ESL(b) - 1)^+ for independent
  // rotated matrices with distinct spectra
  RngStream s = split(6060, 3);
  const int n = 6;
  std::vector<double> va(n), vb(n);
  for (auto& x : va) x = s.uniform() * 3;
  for (auto& x : vb) x = s.uniform() * 3;
  const auto a = rotate_diag(va, s);
  const auto b = rotate_diag(vb, s);
  const Cdf lhs = empirical_spectral_law(spectral_max(a, b));
  const Cdf rhs = free_max_conv(empirical_spectral_law(a), empirical_spectral_law(b));
  // compare at midpoints between merged eigenvalues (robust to 1e-9 jitter)
  std::vector<double> pts = va;
  pts.insert(pts.end(), vb.begin(), vb.end());
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double mid = 0.5 * (pts[i] + pts[i + 1]);
    CHECK(lhs.eval(mid) == doctest::Approx(rhs.eval(mid)).epsilon(1e-12));
  }
}

TEST_CASE("top_n_merge examples and oracle") {
  CHECK(top_n_merge({1, 5, 3}, 2) == std::vector<double>{5, 3});
  CHECK(top_n_merge({2, 2, 2}, 2) == std::vector<double>{2, 2});
  CHECK(top_n_merge({1, 2}, 2) == std::vector<double>{2, 1});
  CHECK_THROWS_AS(top_n_merge({1.0}, 2), std::domain_error);

  RngStream rng(808, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t len = 1 + std::size_t(rng.uniform() * 200);
    const std::size_t n = 1 + std::size_t(rng.uniform() * double(len));
    std::vector<double> v(len);
    for (auto& x : v) x = std::floor(rng.uniform() * 40) / 7.0;  // force ties
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    sorted.resize(n);
    CHECK(top_n_merge(v, n) == sorted);
  }
  // the large-n path against the same oracle
  std::vector<double> big(500);
  for (auto& x : big) x = rng.uniform();
  auto sorted = big;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  sorted.resize(100);
  CHECK(top_n_merge(big, 100) == sorted);
}

TEST_CASE("hermitian csv round trip") {
  RngStream rng(2222, 0);
  const HermitianMatrix m = rotate_diag({1.5, -0.25, 3.75}, rng);
  write_hermitian_csv("/tmp/freemax_test_herm.csv", m);
  const HermitianMatrix r = read_hermitian_csv("/tmp/freemax_test_herm.csv");
  REQUIRE(r.dim() == 3);
  CHECK(max_abs(r.entries() - m.entries()) == 0.0);  // shortest round-trip format
  CHECK_THROWS(read_hermitian_csv("/nonexistent/file.csv"));
}
