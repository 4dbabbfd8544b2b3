#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "wdeloc/density_matrix.hpp"

namespace wdeloc {

/// Real symmetric site Hamiltonian in cm^-1.
struct SiteHamiltonian {
  Eigen::MatrixXd matrix;

  explicit SiteHamiltonian(Eigen::MatrixXd m);
  int dim() const { return static_cast<int>(matrix.rows()); }
};

/// The 6-site ring with alternating 12500/12000 cm^-1 site energies and
/// 300 cm^-1 nearest-neighbor coupling (periodic).
SiteHamiltonian ring_hamiltonian();

/// Ohmic Drude bath.  All fields strictly positive; energies in cm^-1,
/// temperature in K.
struct BathSpec {
  double reorganization_energy = 300.0;
  double cutoff = 150.0;
  double temperature = 77.0;
};

/// J(w) = 2 E_r w_c w / (pi (w_c^2 + w^2)), in cm^-1.  Peaks at w = w_c
/// with value E_r / pi.
double spectral_density(double omega, const BathSpec& bath);

/// Bose-Einstein occupation 1/(e^{beta w} - 1); the same expression is used
/// for negative w (giving a negative value).  w = 0 is a caller error.
double thermal_occupation(double omega, double temperature);

/// gamma(w) = 2 pi J(|w|) |N(-w)| converted to fs^-1.  At w = 0 the finite
/// pure-dephasing limit 2 pi (2 E_r / pi w_c) k_B T is used.
double rate_gamma(double omega, const BathSpec& bath);

struct GapGroup {
  double omega = 0.0;                     // representative gap, cm^-1
  std::vector<std::pair<int, int>> pairs; // (k, k') with e_k' - e_k = omega
};

/// Eigendecomposition of the site Hamiltonian plus the frequency-grouped
/// Lindblad operators A_n(w) = sum_{e_k'-e_k=w} a_n(k) a_n(k') |k><k'|,
/// stored in the site basis.
struct ExcitonDecomposition {
  Eigen::VectorXd energies;      // ascending, cm^-1
  Eigen::MatrixXd coefficients;  // column k = site coefficients of exciton k
  std::vector<GapGroup> gaps;    // all gaps: negative, zero, positive
  bool merged_distinct_gaps = false;  // grouping merged analytically distinct gaps

  /// A_n(w) for gap group g and site n.
  const Eigen::MatrixXd& site_operator(int site, int gap_index) const {
    return site_ops.at(gap_index).at(site);
  }

  std::vector<std::vector<Eigen::MatrixXd>> site_ops;  // [gap][site]
};

ExcitonDecomposition lindblad_operators(const SiteHamiltonian& h,
                                        double gap_tol = 1e-6);

/// Secular dissipator with independent site fluctuations,
/// D(rho) = sum_w gamma(w) sum_n [A_n rho A_n^dag - 1/2 {A_n^dag A_n, rho}],
/// precomputed as an n^2 x n^2 superoperator on column-major vec(rho).
struct Dissipator {
  int dim = 0;
  Eigen::MatrixXcd superop;
};

Dissipator build_dissipator(const ExcitonDecomposition& decomp,
                            const BathSpec& bath, double coupling_scale = 1.0);

Eigen::MatrixXcd apply_dissipator(const Dissipator& d,
                                  const Eigen::MatrixXcd& rho);

/// Full generator -i[H, .] + D in fs^-1.
struct Liouvillian {
  int dim = 0;
  Eigen::MatrixXcd superop;
};

Liouvillian build_liouvillian(const SiteHamiltonian& h, const Dissipator& d);

enum class StepMethod { Rk4, MatrixExp };

struct PropagateOptions {
  double dt_fs = 1.0;
  long steps = 10000;
  long stride = 10;  // snapshot every `stride` steps
  StepMethod method = StepMethod::Rk4;
};

/// Snapshots of a fixed-step integration.  Trace is never renormalized;
/// the drift |Tr rho - 1| is kept per snapshot as a diagnostic.
struct Trajectory {
  std::vector<double> times_fs;
  std::vector<DensityMatrix> states;
  std::vector<double> trace_error;
};

Trajectory propagate(const DensityMatrix& rho0, const SiteHamiltonian& h,
                     const Dissipator& d, const PropagateOptions& options);

/// Normalized delocalization time series: E_k(rho(t)) / tau_k(W_n).
struct EkSeries {
  int dim = 0;
  std::vector<double> times_fs;
  Eigen::MatrixXd e;  // row = snapshot, column = k - 2
  std::vector<double> purity;
  std::vector<double> trace_error;
};

EkSeries ek_trajectory(const Trajectory& trajectory);

/// Gibbs state of the Hamiltonian at the given temperature (site basis).
DensityMatrix gibbs_state(const SiteHamiltonian& h, double temperature);

}  // namespace wdeloc
