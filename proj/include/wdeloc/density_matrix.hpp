#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wdeloc/error.hpp"

namespace wdeloc {

/// Validation tolerances for density matrices.  The defaults are the strict
/// construction-time values; propagation code passes relaxed ones because a
/// fixed-step integrator accumulates small trace and positivity drift.
struct Tolerances {
  double hermitian = 1e-12;
  double trace = 1e-12;
  double psd_floor = 1e-10;  // smallest eigenvalue must be >= -psd_floor
};

/// Normalized state vector in the single-excitation site basis.
class PureState {
 public:
  explicit PureState(Eigen::VectorXcd amplitudes);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

  /// |i> in an n-mode system.
  static PureState basis_state(int n, int i);

  /// Uniform-amplitude W state over modes [offset, offset+size) of an
  /// n-mode system; block_w(n, 0, n) is the full |W_n>.
  static PureState block_w(int n, int offset, int size);

 private:
  Eigen::VectorXcd amplitudes_;
};

/// Hermitian, unit-trace, positive-semidefinite matrix on the
/// single-excitation subspace.  Immutable once constructed; every public
/// operation is a pure function, so values can be shared across threads.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd entries,
                         const Tolerances& tol = Tolerances{});

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return entries_; }
  std::complex<double> operator()(int i, int j) const { return entries_(i, j); }

  /// Site populations (real diagonal, clamped to [0, 1]).
  Eigen::VectorXd populations() const;

  static DensityMatrix maximally_mixed(int n);

 private:
  Eigen::MatrixXcd entries_;
};

/// Tr(rho^2), computed as the squared Frobenius norm.  In [1/n, 1]; equals 1
/// iff the state is pure.
double purity(const DensityMatrix& rho);

/// Statistical moment of order k: sum_j (rho_jj)^k over the stored site
/// basis.  M_1 = 1; M_2 is the inverse participation ratio.
double moment(const DensityMatrix& rho, int k);

/// Outer product |psi><psi|.
DensityMatrix from_pure(const PureState& psi);

/// Convex combination sum_i w_i rho_i.
DensityMatrix mix(const std::vector<DensityMatrix>& states,
                  const std::vector<double>& weights);

}  // namespace wdeloc
