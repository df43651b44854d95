#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "freemax/cdf.hpp"
#include "freemax/rng.hpp"

namespace freemax {

// Dense N x N complex self-adjoint matrix. Construction validates
// Hermitianity (1e-12 absolute entrywise) and finiteness; instances are
// immutable afterwards.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(Eigen::MatrixXcd m);
  int dim() const { return int(m_.rows()); }
  const Eigen::MatrixXcd& entries() const { return m_; }

 private:
  Eigen::MatrixXcd m_;
};

// Eigenvalues in decreasing order; column j of eigenvectors pairs with
// eigenvalue j.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
};

// Orthonormal columns spanning a subspace of C^N (possibly none).
class SubspaceBasis {
 public:
  explicit SubspaceBasis(int ambient_dim);       // the zero subspace
  explicit SubspaceBasis(Eigen::MatrixXcd cols);  // validates orthonormality
  int ambient_dim() const { return ambient_; }
  int rank() const { return int(q_.cols()); }
  const Eigen::MatrixXcd& columns() const { return q_; }
  Eigen::MatrixXcd projector() const;  // Q Q^*

 private:
  int ambient_;
  Eigen::MatrixXcd q_;
};

// eigenvalue dedup / cut tolerance: 1e-8 * (1 + max |eigenvalue|)
double degeneracy_tolerance(double max_abs_eigenvalue);

SpectralDecomposition eig(const HermitianMatrix& h);

// Exact Haar measure: QR of a complex Ginibre matrix with the phase
// convention that makes the R diagonal real positive.
Eigen::MatrixXcd haar_unitary(int n, RngStream& rng);

// U diag(values) U^* for a fresh Haar U; the spectrum is the given multiset.
HermitianMatrix rotate_diag(const std::vector<double>& values, RngStream& rng);

// Orthonormal basis of the span of eigenvectors with eigenvalue > t.
// Refuses cuts within the degeneracy tolerance of an eigenvalue.
SubspaceBasis spectral_projector(const HermitianMatrix& h, double t);

// Orthonormal basis of Im(a) + Im(b); rank by singular-value threshold.
SubspaceBasis subspace_sum(const SubspaceBasis& a, const SubspaceBasis& b);

// The least upper bound in the spectral order: merge the two spectra into
// descending levels, accumulate nested sums of eigenspaces, and rebuild from
// the increments.
HermitianMatrix spectral_max(const HermitianMatrix& a, const HermitianMatrix& b);

Cdf empirical_spectral_law(const HermitianMatrix& h);

// The n largest entries, ranked decreasing, ties kept by multiplicity.
std::vector<double> top_n_merge(const std::vector<double>& values, std::size_t n);

// Debug/fixture CSV: header `# hermitian N=<dim>`, then 2N x N reals
// (real block stacked on imaginary block), row-major.
void write_hermitian_csv(const std::string& path, const HermitianMatrix& h);
HermitianMatrix read_hermitian_csv(const std::string& path);

}  // namespace freemax
