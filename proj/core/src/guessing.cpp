#include "qkdrate/guessing.hpp"

#include "qkdrate/search.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace qkdrate {

namespace {

void require_qber(double p, const char* where) {
  if (!(p >= 0.0 && p <= 0.5)) {
    throw std::invalid_argument(std::string(where) + ": QBER must lie in [0, 1/2], got " +
                                std::to_string(p));
  }
}

void require_unit(double s, const char* where) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::invalid_argument(std::string(where) + ": s must lie in [0, 1], got " +
                                std::to_string(s));
  }
}

using Ket = Eigen::Matrix<cplx, 4, 1>;

std::array<Ket, 4> bell_basis() {
  const double r = 1.0 / std::sqrt(2.0);
  std::array<Ket, 4> b;
  b[0] << r, 0, 0, r;   // Phi+
  b[1] << r, 0, 0, -r;  // Phi-
  b[2] << 0, r, r, 0;   // Psi+
  b[3] << 0, r, -r, 0;  // Psi-
  return b;
}

Matrix4c diagonal_state(const std::array<double, 4>& d) {
  Matrix4c m = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) m(i, i) = d[i];
  return m;
}

}  // namespace

void validate(const BellDiagonalState& state) {
  const std::array<double, 4> w{state.p0, state.p1, state.p2, state.p3};
  for (double x : w) {
    if (!(x >= 0.0)) throw std::invalid_argument("Bell weights must be nonnegative");
  }
  if (std::abs(w[0] + w[1] + w[2] + w[3] - 1.0) > DensityMatrix::kTraceTol) {
    throw std::invalid_argument("Bell weights must sum to 1");
  }
}

BellDiagonalState symmetric_bell_state(double p, double p3) {
  require_qber(p, "symmetric_bell_state");
  const double lo = std::max(0.0, 2.0 * p - 1.0);
  if (!(p3 >= lo && p3 <= p)) {
    throw std::invalid_argument("symmetric_bell_state: p3 outside [max(0, 2p-1), p]");
  }
  return {1.0 - 2.0 * p + p3, p - p3, p - p3, p3};
}

BellDiagonalState optimal_bell_state(double p) {
  require_qber(p, "optimal_bell_state");
  return {(1.0 - p) * (1.0 - p), p * (1.0 - p), p * (1.0 - p), p * p};
}

DensityMatrix::DensityMatrix(const Matrix4c& m) : m_(m) {
  if (!m.allFinite()) throw std::invalid_argument("density matrix has non-finite entries");
  if (hermiticity_defect<4>(m) > kHermitianTol) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  const cplx tr = m.trace();
  if (std::abs(tr.real() - 1.0) > kTraceTol || std::abs(tr.imag()) > kTraceTol) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  if (min_eigenvalue<4>(m) < -kDensityEigenTol) {
    throw std::invalid_argument("density matrix is not positive semidefinite");
  }
}

CMatrix<2> DensityMatrix::partial_trace_b() const {
  CMatrix<2> out = CMatrix<2>::Zero();
  for (int a = 0; a < 2; ++a)
    for (int a2 = 0; a2 < 2; ++a2)
      for (int b = 0; b < 2; ++b) out(a, a2) += m_(2 * a + b, 2 * a2 + b);
  return out;
}

CMatrix<2> DensityMatrix::partial_trace_a() const {
  CMatrix<2> out = CMatrix<2>::Zero();
  for (int b = 0; b < 2; ++b)
    for (int b2 = 0; b2 < 2; ++b2)
      for (int a = 0; a < 2; ++a) out(b, b2) += m_(2 * a + b, 2 * a + b2);
  return out;
}

DensityMatrix PinchedAnsatz::state() const {
  require_unit(s, "PinchedAnsatz");
  return DensityMatrix(diagonal_state({0.5 * s, 0.5 * (1.0 - s), 0.5 * (1.0 - s), 0.5 * s}));
}

double pg_closed_form(double p) {
  require_qber(p, "pg_closed_form");
  return 0.5 + std::sqrt(p * (1.0 - p));
}

double ansatz_fidelity(double p, double s) {
  require_qber(p, "ansatz_fidelity");
  require_unit(s, "ansatz_fidelity");
  const double q = 1.0 - p;
  return (std::sqrt(q * p * (1.0 - s)) + p * std::sqrt(1.0 - s) + q * std::sqrt(s) +
          std::sqrt(q * p * s)) /
         std::sqrt(2.0);
}

double stationary_s(double p) {
  require_qber(p, "stationary_s");
  return 1.0 - p;
}

ScalarMax ansatz_pg_maximum(double p) {
  require_qber(p, "ansatz_pg_maximum");
  return golden_section_maximize(
      [p](double s) {
        const double f = ansatz_fidelity(p, s);
        return f * f;
      },
      0.0, 1.0, 1e-12);
}

DensityMatrix bell_to_matrix(const BellDiagonalState& state) {
  validate(state);
  const auto basis = bell_basis();
  const std::array<double, 4> w{state.p0, state.p1, state.p2, state.p3};
  Matrix4c m = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) m += w[i] * basis[i] * basis[i].adjoint();
  return DensityMatrix(m);
}

DensityMatrix pinch_z(const DensityMatrix& sigma) {
  Matrix4c out = Matrix4c::Zero();
  const Matrix4c& m = sigma.matrix();
  // Index 2a + b: keep entries whose Bob indices agree.
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if ((i & 1) == (j & 1)) out(i, j) = m(i, j);
  return DensityMatrix(out);
}

FidelityReference::FidelityReference(const DensityMatrix& reference)
    : root_(psd_sqrt<4>(reference.matrix())) {}

double FidelityReference::fidelity(const Matrix4c& other) const {
  const Matrix4c inner = root_ * other * root_;
  return trace_sqrt_psd<4>(0.5 * (inner + inner.adjoint()));
}

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& tau) {
  return FidelityReference(rho).fidelity(tau);
}

double uhlmann_fidelity(const Matrix4c& rho, const Matrix4c& tau) {
  const Matrix4c root = psd_sqrt<4>(rho);
  // psd_sqrt only rejects rho; tau is checked here.
  if (min_eigenvalue<4>(tau) < -kPsdRejectTol) {
    throw std::domain_error("uhlmann_fidelity: tau is not positive semidefinite");
  }
  const Matrix4c inner = root * tau * root;
  return trace_sqrt_psd<4>(0.5 * (inner + inner.adjoint()));
}

OracleResult restricted_pg_oracle(double p, int grid_resolution, const OracleOptions& options) {
  require_qber(p, "restricted_pg_oracle");
  if (grid_resolution < 100) {
    throw std::invalid_argument("restricted_pg_oracle: grid_resolution must be >= 100");
  }

  const double p3_lo = std::max(0.0, 2.0 * p - 1.0);
  const double p3_hi = p;
  const int p3_count = p3_hi > p3_lo ? grid_resolution + 1 : 1;
  const std::vector<double> p3_grid = lin_space(p3_lo, p3_hi, p3_count);

  // Candidate pinched states, each with its square root precomputed.
  std::vector<std::array<double, 4>> tau_diag;
  if (options.general_diagonal_sigma) {
    const int r = options.simplex_resolution;
    if (r < 1) throw std::invalid_argument("simplex_resolution must be positive");
    for (int i = 0; i <= r; ++i)
      for (int j = 0; i + j <= r; ++j)
        for (int k = 0; i + j + k <= r; ++k) {
          const int l = r - i - j - k;
          tau_diag.push_back({double(i) / r, double(j) / r, double(k) / r, double(l) / r});
        }
  } else {
    for (double s : lin_space(0.0, 1.0, grid_resolution + 1)) {
      tau_diag.push_back({0.5 * s, 0.5 * (1.0 - s), 0.5 * (1.0 - s), 0.5 * s});
    }
  }
  std::vector<FidelityReference> taus;
  taus.reserve(tau_diag.size());
  for (const auto& d : tau_diag) taus.emplace_back(DensityMatrix(diagonal_state(d)));

  OracleResult best;
  best.fidelity = -1.0;
  std::size_t best_tau = 0;
  for (double p3 : p3_grid) {
    const DensityMatrix rho = bell_to_matrix(symmetric_bell_state(p, p3));
    for (std::size_t t = 0; t < taus.size(); ++t) {
      const double f = taus[t].fidelity(rho);
      // Strict comparison keeps the lexicographically smallest (p3, s) on ties.
      if (f > best.fidelity) {
        best.fidelity = f;
        best.p3 = p3;
        best_tau = t;
      }
    }
  }
  best.tau_diagonal = tau_diag[best_tau];
  best.s = best.tau_diagonal[0] + best.tau_diagonal[3];
  best.p3_step = p3_count > 1 ? (p3_hi - p3_lo) / grid_resolution : 0.0;
  best.s_step = options.general_diagonal_sigma ? 1.0 / options.simplex_resolution
                                               : 1.0 / grid_resolution;

  if (options.refine && !options.general_diagonal_sigma) {
    auto fidelity_at = [p](double p3, double s) {
      const DensityMatrix rho = bell_to_matrix(symmetric_bell_state(p, p3));
      return uhlmann_fidelity(rho, PinchedAnsatz{s}.state());
    };
    const double s_lo = std::max(0.0, best.s - best.s_step);
    const double s_hi = std::min(1.0, best.s + best.s_step);
    const ScalarMax s_opt = golden_section_maximize(
        [&](double s) { return fidelity_at(best.p3, s); }, s_lo, s_hi, 1e-13);
    if (s_opt.value > best.fidelity) {
      best.fidelity = s_opt.value;
      best.s = s_opt.x;
    }
    if (best.p3_step > 0.0) {
      const double lo = std::max(p3_lo, best.p3 - best.p3_step);
      const double hi = std::min(p3_hi, best.p3 + best.p3_step);
      const ScalarMax p3_opt = golden_section_maximize(
          [&](double p3) { return fidelity_at(p3, best.s); }, lo, hi, 1e-13);
      if (p3_opt.value > best.fidelity) {
        best.fidelity = p3_opt.value;
        best.p3 = p3_opt.x;
      }
    }
    best.tau_diagonal = {0.5 * best.s, 0.5 * (1.0 - best.s), 0.5 * (1.0 - best.s), 0.5 * best.s};
  }

  best.rho = symmetric_bell_state(p, best.p3);
  best.pg = best.fidelity * best.fidelity;
  return best;
}

Matrix8c certificate_block_matrix(const Matrix4c& rho, const Matrix4c& tau, const Matrix4c& x) {
  Matrix8c block;
  block.topLeftCorner<4, 4>() = rho;
  block.topRightCorner<4, 4>() = x;
  block.bottomLeftCorner<4, 4>() = x.adjoint();
  block.bottomRightCorner<4, 4>() = tau;
  return block;
}

FidelityCertificate build_certificate(const DensityMatrix& rho, const DensityMatrix& tau) {
  const Matrix4c root_rho = psd_sqrt<4>(rho.matrix());
  const Matrix4c root_tau = psd_sqrt<4>(tau.matrix());

  // Full SVD completes the unitary on the kernel when sqrt(tau) sqrt(rho) is singular.
  Eigen::JacobiSVD<Matrix4c> svd(root_tau * root_rho, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix4c polar = svd.matrixU() * svd.matrixV().adjoint();
  const Matrix4c x = root_rho * polar.adjoint() * root_tau;

  FidelityCertificate cert{rho, tau, x, x.trace().real(), 0.0};
  cert.min_block_eigenvalue =
      min_eigenvalue<8>(certificate_block_matrix(rho.matrix(), tau.matrix(), x));

  const double f = uhlmann_fidelity(rho, tau);
  if (cert.min_block_eigenvalue < -kCertificatePsdTol) {
    throw CertificateError("certificate block matrix is not PSD (min eigenvalue " +
                           std::to_string(cert.min_block_eigenvalue) + ")");
  }
  if (std::abs(cert.objective - f) > kCertificateObjectiveTol) {
    throw CertificateError("certificate objective " + std::to_string(cert.objective) +
                           " misses the fidelity " + std::to_string(f));
  }
  return cert;
}

CertificateVerdict verify_certificate(const FidelityCertificate& cert) {
  CertificateVerdict v;
  v.min_eigenvalue =
      min_eigenvalue<8>(certificate_block_matrix(cert.rho.matrix(), cert.tau.matrix(), cert.x_witness));
  v.objective = cert.x_witness.trace().real();
  v.fidelity = uhlmann_fidelity(cert.rho, cert.tau);
  v.objective_gap = v.objective - v.fidelity;
  v.pass = v.min_eigenvalue >= -kCertificatePsdTol && v.objective_gap <= kCertificateObjectiveTol;
  return v;
}

CertificateVerdict verify_certificate(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& tau,
                                      const Eigen::MatrixXcd& x_witness) {
  for (const auto* m : {&rho, &tau, &x_witness}) {
    if (m->rows() != 4 || m->cols() != 4) {
      throw std::invalid_argument("verify_certificate: expected 4x4 matrices");
    }
  }
  const Matrix4c x = x_witness;
  FidelityCertificate cert{DensityMatrix(Matrix4c(rho)), DensityMatrix(Matrix4c(tau)), x,
                           x.trace().real(), 0.0};
  return verify_certificate(cert);
}

}  // namespace qkdrate
