#include "freemax/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "freemax/csvio.hpp"

namespace freemax {

namespace {

constexpr double kHermitianTol = 1e-12;

void check(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

double degeneracy_tolerance(double max_abs_eigenvalue) {
  return 1e-8 * (1.0 + max_abs_eigenvalue);
}

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
  check(m_.rows() == m_.cols() && m_.rows() >= 1, "hermitian: need square, dim >= 1");
  check(m_.allFinite(), "hermitian: entries must be finite");
  const double asym = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  check(asym <= kHermitianTol, "hermitian: matrix is not self-adjoint within 1e-12");
}

SubspaceBasis::SubspaceBasis(int ambient_dim) : ambient_(ambient_dim) {
  check(ambient_dim >= 1, "subspace: ambient dim >= 1");
  q_.resize(ambient_, 0);
}

SubspaceBasis::SubspaceBasis(Eigen::MatrixXcd cols)
    : ambient_(int(cols.rows())), q_(std::move(cols)) {
  check(ambient_ >= 1 && q_.cols() <= q_.rows(), "subspace: bad shape");
  if (q_.cols() > 0) {
    const Eigen::MatrixXcd gram = q_.adjoint() * q_;
    const double err =
        (gram - Eigen::MatrixXcd::Identity(q_.cols(), q_.cols())).cwiseAbs().maxCoeff();
    check(err <= 1e-10, "subspace: columns are not orthonormal");
  }
}

Eigen::MatrixXcd SubspaceBasis::projector() const {
  if (rank() == 0) return Eigen::MatrixXcd::Zero(ambient_, ambient_);
  return q_ * q_.adjoint();
}

SpectralDecomposition eig(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.entries());
  if (solver.info() != Eigen::Success) throw std::runtime_error("eig: solver failed");
  const int n = h.dim();
  SpectralDecomposition d;
  d.eigenvalues = solver.eigenvalues().reverse();
  d.eigenvectors = solver.eigenvectors().rowwise().reverse();
  // contract checks
  const double vv =
      (d.eigenvectors.adjoint() * d.eigenvectors - Eigen::MatrixXcd::Identity(n, n))
          .cwiseAbs()
          .maxCoeff();
  if (vv > 1e-10) throw std::runtime_error("eig: eigenvectors not orthonormal");
  const Eigen::MatrixXcd rec =
      d.eigenvectors * d.eigenvalues.asDiagonal() * d.eigenvectors.adjoint();
  const double scale = 1.0 + h.entries().cwiseAbs().maxCoeff();
  if ((rec - h.entries()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw std::runtime_error("eig: reconstruction failed");
  return d;
}

Eigen::MatrixXcd haar_unitary(int n, RngStream& rng) {
  check(n >= 1, "haar_unitary: need n >= 1");
  Eigen::MatrixXcd g(n, n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto [re, im] = rng.normal_pair();
      g(i, j) = std::complex<double>(re * inv_sqrt2, im * inv_sqrt2);
    }
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd u = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const std::complex<double> d = r(j, j);
    const double a = std::abs(d);
    const std::complex<double> phase = a > 0 ? d / a : std::complex<double>(1, 0);
    u.col(j) *= phase;
  }
  return u;
}

HermitianMatrix rotate_diag(const std::vector<double>& values, RngStream& rng) {
  check(!values.empty(), "rotate_diag: need values");
  for (double v : values) check(std::isfinite(v), "rotate_diag: values must be finite");
  const int n = int(values.size());
  const Eigen::MatrixXcd u = haar_unitary(n, rng);
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = values[i];
  Eigen::MatrixXcd m = u * d.asDiagonal() * u.adjoint();
  m = 0.5 * (m + m.adjoint().eval());
  return HermitianMatrix(std::move(m));
}

SubspaceBasis spectral_projector(const HermitianMatrix& h, double t) {
  const SpectralDecomposition d = eig(h);
  const double tau = degeneracy_tolerance(d.eigenvalues.cwiseAbs().maxCoeff());
  int r = 0;
  for (int i = 0; i < h.dim(); ++i) {
    if (std::fabs(d.eigenvalues(i) - t) <= tau)
      throw std::domain_error("spectral_projector: cut is within tolerance of an eigenvalue");
    if (d.eigenvalues(i) > t) ++r;
  }
  if (r == 0) return SubspaceBasis(h.dim());
  return SubspaceBasis(Eigen::MatrixXcd(d.eigenvectors.leftCols(r)));
}

SubspaceBasis subspace_sum(const SubspaceBasis& a, const SubspaceBasis& b) {
  check(a.ambient_dim() == b.ambient_dim(), "subspace_sum: ambient dimensions differ");
  const int n = a.ambient_dim();
  const int cols = a.rank() + b.rank();
  if (cols == 0) return SubspaceBasis(n);
  Eigen::MatrixXcd c(n, cols);
  if (a.rank()) c.leftCols(a.rank()) = a.columns();
  if (b.rank()) c.rightCols(b.rank()) = b.columns();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(c, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0) return SubspaceBasis(n);
  const double thresh = 1e-8 * sv(0);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > thresh) ++rank;
  if (rank == 0) return SubspaceBasis(n);
  return SubspaceBasis(Eigen::MatrixXcd(svd.matrixU().leftCols(rank)));
}

HermitianMatrix spectral_max(const HermitianMatrix& a, const HermitianMatrix& b) {
  check(a.dim() == b.dim(), "spectral_max: dimensions differ");
  const int n = a.dim();
  const SpectralDecomposition da = eig(a);
  const SpectralDecomposition db = eig(b);

  struct Entry {
    double value;
    int source;  // 0 = a, 1 = b
    int col;
  };
  std::vector<Entry> all;
  all.reserve(2 * n);
  for (int i = 0; i < n; ++i) all.push_back({da.eigenvalues(i), 0, i});
  for (int i = 0; i < n; ++i) all.push_back({db.eigenvalues(i), 1, i});
  std::sort(all.begin(), all.end(),
            [](const Entry& x, const Entry& y) { return x.value > y.value; });
  const double tau = degeneracy_tolerance(
      std::max(std::fabs(all.front().value), std::fabs(all.back().value)));

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  SubspaceBasis prev(n);
  Eigen::MatrixXcd prev_proj = Eigen::MatrixXcd::Zero(n, n);
  std::size_t i = 0;
  while (i < all.size()) {
    // one level: all merged eigenvalues within tau of their predecessor
    std::size_t j = i;
    double sum = 0.0;
    int ca = 0, cb = 0;
    while (j < all.size() && (j == i || all[j - 1].value - all[j].value <= tau)) {
      sum += all[j].value;
      (all[j].source == 0 ? ca : cb)++;
      ++j;
    }
    const double level = sum / double(j - i);
    Eigen::MatrixXcd cols_a(n, ca), cols_b(n, cb);
    ca = cb = 0;
    for (std::size_t t = i; t < j; ++t) {
      if (all[t].source == 0)
        cols_a.col(ca++) = da.eigenvectors.col(all[t].col);
      else
        cols_b.col(cb++) = db.eigenvectors.col(all[t].col);
    }
    SubspaceBasis cur = prev;
    if (ca) cur = subspace_sum(cur, SubspaceBasis(std::move(cols_a)));
    if (cb) cur = subspace_sum(cur, SubspaceBasis(std::move(cols_b)));
    if (cur.rank() > prev.rank()) {
      const Eigen::MatrixXcd proj = cur.projector();
      m += level * (proj - prev_proj);
      prev_proj = proj;
    }
    prev = cur;
    i = j;
  }
  m = 0.5 * (m + m.adjoint().eval());
  return HermitianMatrix(std::move(m));
}

Cdf empirical_spectral_law(const HermitianMatrix& h) {
  const SpectralDecomposition d = eig(h);
  return empirical_cdf(std::vector<double>(d.eigenvalues.data(),
                                           d.eigenvalues.data() + h.dim()));
}

std::vector<double> top_n_merge(const std::vector<double>& values, std::size_t n) {
  if (values.size() < n) throw std::domain_error("top_n_merge: fewer values than n");
  if (n == 0) return {};
  if (n <= 64) {
    // selection scan; cheap when n is small relative to the input
    std::vector<double> top(n, -std::numeric_limits<double>::infinity());
    for (double v : values) {
      if (v > top[n - 1]) {
        std::size_t k = n - 1;
        while (k > 0 && v > top[k - 1]) {
          top[k] = top[k - 1];
          --k;
        }
        top[k] = v;
      }
    }
    return top;
  }
  std::vector<double> top(values);
  std::nth_element(top.begin(), top.begin() + (n - 1), top.end(), std::greater<>());
  top.resize(n);
  std::sort(top.begin(), top.end(), std::greater<>());
  return top;
}

void write_hermitian_csv(const std::string& path, const HermitianMatrix& h) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  const int n = h.dim();
  f << "# hermitian N=" << n << '\n';
  for (int block = 0; block < 2; ++block)
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const auto& z = h.entries()(i, j);
        f << csv::format(block == 0 ? z.real() : z.imag()) << (j + 1 < n ? "," : "");
      }
      f << '\n';
    }
}

HermitianMatrix read_hermitian_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("# hermitian N=", 0) != 0)
    throw std::runtime_error("hermitian csv: bad header in " + path);
  const int n = std::stoi(line.substr(14));
  check(n >= 1, "hermitian csv: bad dimension");
  Eigen::MatrixXd re(n, n), im(n, n);
  for (int block = 0; block < 2; ++block)
    for (int i = 0; i < n; ++i) {
      if (!std::getline(f, line)) throw std::runtime_error("hermitian csv: truncated");
      std::stringstream ss(line);
      std::string cell;
      for (int j = 0; j < n; ++j) {
        if (!std::getline(ss, cell, ',')) throw std::runtime_error("hermitian csv: short row");
        (block == 0 ? re : im)(i, j) = std::stod(cell);
      }
    }
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = std::complex<double>(re(i, j), im(i, j));
  return HermitianMatrix(std::move(m));
}

}  // namespace freemax
