#include "wdeloc/dynamics.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "wdeloc/refstate.hpp"
#include "wdeloc/units.hpp"

namespace wdeloc {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_bath(const BathSpec& bath) {
  if (bath.reorganization_energy <= 0.0 || bath.cutoff <= 0.0 ||
      bath.temperature <= 0.0) {
    throw Error(ErrorKind::MalformedInput,
                "bath parameters must be strictly positive");
  }
}

// Column-major vec(rho) convention: vec(A rho B) = (B^T kron A) vec(rho).
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

SiteHamiltonian::SiteHamiltonian(Eigen::MatrixXd m) : matrix(std::move(m)) {
  if (matrix.rows() < 2 || matrix.rows() != matrix.cols()) {
    throw Error(ErrorKind::MalformedInput, "Hamiltonian must be square, n >= 2");
  }
  const double defect = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  if (defect > 1e-12) {
    throw Error(ErrorKind::NonHermitian, "site Hamiltonian must be symmetric",
                defect);
  }
}

SiteHamiltonian ring_hamiltonian() {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 6; ++i) {
    h(i, i) = (i % 2 == 0) ? 12500.0 : 12000.0;
    const int j = (i + 1) % 6;
    h(i, j) = 300.0;
    h(j, i) = 300.0;
  }
  return SiteHamiltonian(std::move(h));
}

double spectral_density(double omega, const BathSpec& bath) {
  check_bath(bath);
  if (omega < 0.0) {
    throw Error(ErrorKind::NegativeFrequency,
                "spectral density is defined for omega >= 0");
  }
  const double wc = bath.cutoff;
  return 2.0 * bath.reorganization_energy * wc * omega /
         (kPi * (wc * wc + omega * omega));
}

double thermal_occupation(double omega, double temperature) {
  if (omega == 0.0) {
    throw Error(ErrorKind::ZeroFrequency,
                "occupation diverges at omega = 0; use the limit path");
  }
  const double x = omega * units::inverse_temperature_cm(temperature);
  return 1.0 / std::expm1(x);
}

double rate_gamma(double omega, const BathSpec& bath) {
  check_bath(bath);
  if (omega == 0.0) {
    // J(w) N(w) -> (2 E_r / pi w_c) k_B T as w -> 0 (pure dephasing).
    const double limit = (2.0 * bath.reorganization_energy / (kPi * bath.cutoff)) *
                         units::kBoltzmannCmPerK * bath.temperature;
    return 2.0 * kPi * limit * units::kRadPerFsPerCm;
  }
  const double j = spectral_density(std::abs(omega), bath);
  const double n = std::abs(thermal_occupation(-omega, bath.temperature));
  return 2.0 * kPi * j * n * units::kRadPerFsPerCm;
}

ExcitonDecomposition lindblad_operators(const SiteHamiltonian& h,
                                        double gap_tol) {
  const int n = h.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix);
  ExcitonDecomposition decomp;
  decomp.energies = solver.eigenvalues();
  decomp.coefficients = solver.eigenvectors();

  // Group all ordered (k, k') pairs by transition frequency.
  struct PairGap {
    double omega;
    int from, to;
  };
  std::vector<PairGap> all;
  all.reserve(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    for (int kp = 0; kp < n; ++kp) {
      all.push_back({decomp.energies(kp) - decomp.energies(k), k, kp});
    }
  }
  std::sort(all.begin(), all.end(),
            [](const PairGap& a, const PairGap& b) { return a.omega < b.omega; });

  const double scale = std::max(1.0, decomp.energies.cwiseAbs().maxCoeff());
  const double identical = 1e-9 * scale;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i + 1;
    while (j < all.size() && all[j].omega - all[j - 1].omega <= gap_tol) ++j;
    GapGroup group;
    double sum = 0.0;
    for (std::size_t t = i; t < j; ++t) {
      group.pairs.emplace_back(all[t].from, all[t].to);
      sum += all[t].omega;
    }
    group.omega = sum / double(j - i);
    if (all[j - 1].omega - all[i].omega > identical) {
      decomp.merged_distinct_gaps = true;
    }
    if (std::abs(group.omega) <= gap_tol) group.omega = 0.0;
    decomp.gaps.push_back(std::move(group));
    i = j;
  }

  // A_n(w) in the site basis, one per (gap group, site).
  decomp.site_ops.resize(decomp.gaps.size());
  for (std::size_t g = 0; g < decomp.gaps.size(); ++g) {
    decomp.site_ops[g].reserve(static_cast<std::size_t>(n));
    for (int site = 0; site < n; ++site) {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
      for (const auto& [k, kp] : decomp.gaps[g].pairs) {
        const double coeff =
            decomp.coefficients(site, k) * decomp.coefficients(site, kp);
        a += coeff * (decomp.coefficients.col(k) *
                      decomp.coefficients.col(kp).transpose());
      }
      decomp.site_ops[g].push_back(std::move(a));
    }
  }
  return decomp;
}

Dissipator build_dissipator(const ExcitonDecomposition& decomp,
                            const BathSpec& bath, double coupling_scale) {
  check_bath(bath);
  const int n = static_cast<int>(decomp.energies.size());
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);

  Dissipator d;
  d.dim = n;
  d.superop = Eigen::MatrixXcd::Zero(n * n, n * n);
  if (coupling_scale == 0.0) return d;

  for (std::size_t g = 0; g < decomp.gaps.size(); ++g) {
    const double gamma =
        coupling_scale * rate_gamma(decomp.gaps[g].omega, bath);
    if (gamma == 0.0) continue;
    for (int site = 0; site < n; ++site) {
      const Eigen::MatrixXcd a = decomp.site_operator(site, static_cast<int>(g));
      const Eigen::MatrixXcd ada = a.adjoint() * a;
      d.superop += gamma * (kron(a.conjugate(), a) -
                            0.5 * kron(id, ada) -
                            0.5 * kron(ada.transpose(), id));
    }
  }
  return d;
}

Eigen::MatrixXcd apply_dissipator(const Dissipator& d,
                                  const Eigen::MatrixXcd& rho) {
  const int n = d.dim;
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), n * n);
  Eigen::VectorXcd out = d.superop * v;
  return Eigen::Map<Eigen::MatrixXcd>(out.data(), n, n);
}

Liouvillian build_liouvillian(const SiteHamiltonian& h, const Dissipator& d) {
  const int n = h.dim();
  if (d.dim != n) {
    throw Error(ErrorKind::DimensionMismatch,
                "dissipator and Hamiltonian dims differ");
  }
  const std::complex<double> minus_i(0.0, -1.0);
  const Eigen::MatrixXcd hc = h.matrix.cast<std::complex<double>>();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  Liouvillian l;
  l.dim = n;
  l.superop = minus_i * units::kRadPerFsPerCm *
                  (kron(id, hc) - kron(hc.transpose(), id)) +
              d.superop;
  return l;
}

namespace {

void check_snapshot_positivity(const Eigen::MatrixXcd& rho, double t_fs) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -1e-6) {
    throw Error(ErrorKind::PositivityViolation,
                "state lost positivity at t = " + std::to_string(t_fs) +
                    " fs; reduce dt",
                -min_eig);
  }
}

DensityMatrix snapshot_state(const Eigen::MatrixXcd& rho) {
  // Propagated states drift slightly; validate with integrator-level slack.
  Tolerances tol;
  tol.hermitian = 1e-11;
  tol.trace = 1e-7;
  tol.psd_floor = 1.1e-6;
  return DensityMatrix(rho, tol);
}

}  // namespace

Trajectory propagate(const DensityMatrix& rho0, const SiteHamiltonian& h,
                     const Dissipator& d, const PropagateOptions& options) {
  if (options.dt_fs <= 0.0 || options.steps < 1 || options.stride < 1) {
    throw Error(ErrorKind::MalformedInput, "need dt > 0, steps >= 1, stride >= 1");
  }
  if (rho0.dim() != h.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "initial state and Hamiltonian dims differ");
  }
  const Liouvillian l = build_liouvillian(h, d);
  const int n = l.dim;
  const double dt = options.dt_fs;

  Eigen::VectorXcd v =
      Eigen::Map<const Eigen::VectorXcd>(rho0.matrix().data(), n * n);

  Eigen::MatrixXcd step_matrix;
  if (options.method == StepMethod::MatrixExp) {
    step_matrix = (l.superop * dt).exp();
  }

  Trajectory traj;
  auto record = [&](double t_fs) {
    Eigen::MatrixXcd rho = Eigen::Map<Eigen::MatrixXcd>(v.data(), n, n);
    check_snapshot_positivity(rho, t_fs);
    traj.times_fs.push_back(t_fs);
    traj.trace_error.push_back(std::abs(rho.trace() - std::complex<double>(1.0)));
    traj.states.push_back(snapshot_state(rho));
  };

  record(0.0);
  Eigen::VectorXcd k1(n * n), k2(n * n), k3(n * n), k4(n * n);
  for (long step = 1; step <= options.steps; ++step) {
    if (options.method == StepMethod::MatrixExp) {
      v = step_matrix * v;
    } else {
      k1.noalias() = l.superop * v;
      k2.noalias() = l.superop * (v + 0.5 * dt * k1);
      k3.noalias() = l.superop * (v + 0.5 * dt * k2);
      k4.noalias() = l.superop * (v + dt * k3);
      v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (step % options.stride == 0 || step == options.steps) {
      record(step * dt);
    }
  }
  return traj;
}

EkSeries ek_trajectory(const Trajectory& trajectory) {
  if (trajectory.states.empty()) {
    throw Error(ErrorKind::MalformedInput, "empty trajectory");
  }
  const int n = trajectory.states.front().dim();
  EkSeries series;
  series.dim = n;
  series.times_fs = trajectory.times_fs;
  series.trace_error = trajectory.trace_error;
  series.e.resize(static_cast<Eigen::Index>(trajectory.states.size()), n - 1);
  series.purity.reserve(trajectory.states.size());
  for (std::size_t i = 0; i < trajectory.states.size(); ++i) {
    const DensityMatrix& rho = trajectory.states[i];
    series.purity.push_back(purity(rho));
    for (int k = 2; k <= n; ++k) {
      series.e(static_cast<Eigen::Index>(i), k - 2) =
          e_k(rho, k) / tau_max(n, k);
    }
  }
  return series;
}

DensityMatrix gibbs_state(const SiteHamiltonian& h, double temperature) {
  if (temperature <= 0.0) {
    throw Error(ErrorKind::MalformedInput, "temperature must be positive");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix);
  const Eigen::VectorXd e = solver.eigenvalues();
  const double beta = units::inverse_temperature_cm(temperature);
  Eigen::VectorXd weights = (-beta * (e.array() - e.minCoeff())).exp();
  weights /= weights.sum();
  Eigen::MatrixXd rho = solver.eigenvectors() * weights.asDiagonal() *
                        solver.eigenvectors().transpose();
  return DensityMatrix(rho.cast<std::complex<double>>());
}

}  // namespace wdeloc
