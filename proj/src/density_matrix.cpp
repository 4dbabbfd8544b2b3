#include "wdeloc/density_matrix.hpp"

#include <cmath>
#include <sstream>

namespace wdeloc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::WeightsNotNormalized: return "WeightsNotNormalized";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::KOutOfRange: return "KOutOfRange";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::EqualIndices: return "EqualIndices";
    case ErrorKind::PurityOutOfRange: return "PurityOutOfRange";
    case ErrorKind::RankOutOfRange: return "RankOutOfRange";
    case ErrorKind::BlockTooLarge: return "BlockTooLarge";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::InfeasiblePurity: return "InfeasiblePurity";
    case ErrorKind::NegativeFrequency: return "NegativeFrequency";
    case ErrorKind::ZeroFrequency: return "ZeroFrequency";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::PositivityViolation: return "PositivityViolation";
  }
  return "UnknownError";
}

bool is_state_invariant(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonHermitian:
    case ErrorKind::TraceNotOne:
    case ErrorKind::NotPositiveSemidefinite:
    case ErrorKind::NotNormalized:
    case ErrorKind::WeightsNotNormalized:
    case ErrorKind::DimensionMismatch:
      return true;
    default:
      return false;
  }
}

namespace {

std::string magnitude_message(const char* what, double magnitude) {
  std::ostringstream os;
  os << what << " (violation magnitude " << magnitude << ")";
  return os.str();
}

}  // namespace

PureState::PureState(Eigen::VectorXcd amplitudes)
    : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) {
    throw Error(ErrorKind::MalformedInput, "pure state must have dim >= 1");
  }
  const double norm2 = amplitudes_.squaredNorm();
  const double defect = std::abs(norm2 - 1.0);
  if (defect > 1e-12) {
    throw Error(ErrorKind::NotNormalized,
                magnitude_message("sum of |amplitude|^2 is not 1", defect),
                defect);
  }
}

PureState PureState::basis_state(int n, int i) {
  if (i < 0 || i >= n) {
    throw Error(ErrorKind::IndexOutOfRange, "basis index outside [0, n)");
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
  v(i) = 1.0;
  return PureState(std::move(v));
}

PureState PureState::block_w(int n, int offset, int size) {
  if (size < 1 || offset < 0 || offset + size > n) {
    throw Error(ErrorKind::IndexOutOfRange, "W block outside [0, n)");
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
  v.segment(offset, size).setConstant(1.0 / std::sqrt(double(size)));
  return PureState(std::move(v));
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries, const Tolerances& tol)
    : entries_(std::move(entries)) {
  const auto n = entries_.rows();
  if (n < 1 || entries_.cols() != n) {
    throw Error(ErrorKind::MalformedInput, "entries must be a square n>=1 array");
  }

  const double herm_defect = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_defect > tol.hermitian) {
    throw Error(ErrorKind::NonHermitian,
                magnitude_message("entries[i][j] != conj(entries[j][i])", herm_defect),
                herm_defect);
  }

  const double trace_defect = std::abs(entries_.trace() - std::complex<double>(1.0, 0.0));
  if (trace_defect > tol.trace) {
    throw Error(ErrorKind::TraceNotOne,
                magnitude_message("trace differs from 1", trace_defect), trace_defect);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -tol.psd_floor) {
    throw Error(ErrorKind::NotPositiveSemidefinite,
                magnitude_message("smallest eigenvalue is negative", -min_eig), -min_eig);
  }

  // Diagonal real in [0, 1] follows from the above up to tolerance; check the
  // imaginary part explicitly so populations() can take real parts safely.
  for (Eigen::Index j = 0; j < n; ++j) {
    const double im = std::abs(entries_(j, j).imag());
    if (im > tol.hermitian) {
      throw Error(ErrorKind::NonHermitian,
                  magnitude_message("diagonal entry has imaginary part", im), im);
    }
  }
}

Eigen::VectorXd DensityMatrix::populations() const {
  Eigen::VectorXd p = entries_.diagonal().real();
  return p.cwiseMax(0.0).cwiseMin(1.0);
}

DensityMatrix DensityMatrix::maximally_mixed(int n) {
  return DensityMatrix(Eigen::MatrixXcd::Identity(n, n) / double(n));
}

double purity(const DensityMatrix& rho) { return rho.matrix().squaredNorm(); }

double moment(const DensityMatrix& rho, int k) {
  if (k < 1) {
    throw Error(ErrorKind::KOutOfRange, "moment order must be >= 1");
  }
  const Eigen::VectorXd p = rho.populations();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) sum += std::pow(p(j), k);
  return sum;
}

DensityMatrix from_pure(const PureState& psi) {
  const auto& a = psi.amplitudes();
  return DensityMatrix(a * a.adjoint());
}

DensityMatrix mix(const std::vector<DensityMatrix>& states,
                  const std::vector<double>& weights) {
  if (states.empty() || states.size() != weights.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "need one weight per state and at least one state");
  }
  const int n = states.front().dim();
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) {
      throw Error(ErrorKind::WeightsNotNormalized,
                  magnitude_message("negative weight", -w), -w);
    }
    sum += w;
  }
  const double defect = std::abs(sum - 1.0);
  if (defect > 1e-12) {
    throw Error(ErrorKind::WeightsNotNormalized,
                magnitude_message("weights do not sum to 1", defect), defect);
  }
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != n) {
      throw Error(ErrorKind::DimensionMismatch, "mixed states differ in dim");
    }
    acc += weights[i] * states[i].matrix();
  }
  return DensityMatrix(std::move(acc));
}

}  // namespace wdeloc
