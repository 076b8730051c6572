#pragma once

// Eve's optimal guessing probability on Bob's Z-basis key bit for BB84 with
// symmetric error rates, P_g = max F^2(rho_AB, Z(sigma_AB)).
//
// Three independent routes are provided:
//   * the closed form 1/2 + sqrt(p(1-p)) and the one-parameter ansatz it
//     comes from,
//   * a brute-force grid maximization of the Uhlmann fidelity over
//     Bell-diagonal rho_AB and pinched sigma_AB,
//   * fidelity certificates: explicit witnesses X for the block-matrix
//     characterization F = max { Re Tr X : [[rho, X], [X^dag, tau]] >= 0 }.
//
// Matrices use the computational basis ordered |00>, |01>, |10>, |11>, with
// Alice's qubit first.

#include "qkdrate/linalg.hpp"
#include "qkdrate/search.hpp"

#include <array>
#include <stdexcept>

namespace qkdrate {

/// Weights on |Phi+>, |Phi->, |Psi+>, |Psi->.
struct BellDiagonalState {
  double p0 = 1.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;

  double z_error_rate() const { return p2 + p3; }
  double x_error_rate() const { return p1 + p3; }
};

/// Throws std::invalid_argument unless all weights are >= 0 and sum to 1.
void validate(const BellDiagonalState& state);

/// Bell-diagonal states with Z and X error rates both equal to p form a
/// one-parameter family in p3 in [max(0, 2p - 1), p].
BellDiagonalState symmetric_bell_state(double p, double p3);

/// The member of that family that attains P_g: independent bit and phase
/// flips, weights ((1-p)^2, p(1-p), p(1-p), p^2).
BellDiagonalState optimal_bell_state(double p);

/// 4x4 Hermitian, PSD, unit-trace matrix. Construction validates.
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-10;

  /// Throws std::invalid_argument if the matrix is not a valid state.
  explicit DensityMatrix(const Matrix4c& m);

  const Matrix4c& matrix() const { return m_; }

  /// Reduced state of Alice's qubit.
  CMatrix<2> partial_trace_b() const;
  /// Reduced state of Bob's qubit.
  CMatrix<2> partial_trace_a() const;

 private:
  Matrix4c m_;
};

/// Pinched auxiliary state (1/2) diag(s, 1-s, 1-s, s), the image under Z of
/// any Bell-diagonal sigma with s = q0 + q1.
struct PinchedAnsatz {
  double s = 1.0;
  DensityMatrix state() const;
};

/// 1/2 + sqrt(p(1-p)). Throws for p outside [0, 1/2].
double pg_closed_form(double p);

/// Fidelity between optimal_bell_state(p) and PinchedAnsatz{s}:
/// [sqrt((1-p)p(1-s)) + p sqrt(1-s) + (1-p) sqrt(s) + sqrt((1-p)p s)] / sqrt(2).
double ansatz_fidelity(double p, double s);

/// Maximizer of ansatz_fidelity(p, .), which is 1 - p.
double stationary_s(double p);

/// max_s ansatz_fidelity(p, s)^2 by golden-section search (x = argmax s).
ScalarMax ansatz_pg_maximum(double p);

DensityMatrix bell_to_matrix(const BellDiagonalState& state);

/// Z(sigma) = Z0 sigma Z0 + Z1 sigma Z1, Z_j = I_A (x) |j><j|_B.
DensityMatrix pinch_z(const DensityMatrix& sigma);

/// Uhlmann fidelity Tr sqrt(sqrt(rho) tau sqrt(rho)).
double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& tau);

/// Same, on raw matrices. Throws std::domain_error for eigenvalues below
/// -kPsdRejectTol.
double uhlmann_fidelity(const Matrix4c& rho, const Matrix4c& tau);

/// Fidelity against a fixed state, with its square root computed once.
class FidelityReference {
 public:
  explicit FidelityReference(const DensityMatrix& reference);
  double fidelity(const Matrix4c& other) const;
  double fidelity(const DensityMatrix& other) const { return fidelity(other.matrix()); }

 private:
  Matrix4c root_;
};

struct OracleOptions {
  /// Optimize over every diagonal Z(sigma) = diag(q1..q4) on a simplex grid
  /// instead of the one-parameter ansatz.
  bool general_diagonal_sigma = false;
  /// Simplex grid resolution in general_diagonal_sigma mode.
  int simplex_resolution = 24;
  /// One golden-section pass per coordinate around the best grid cell.
  bool refine = true;
};

struct OracleResult {
  double pg = 0.0;        // F^2 at the maximizer
  double fidelity = 0.0;
  double p3 = 0.0;
  double s = 0.0;         // ansatz parameter (q1 + q4 in general mode)
  std::array<double, 4> tau_diagonal{};
  BellDiagonalState rho{};
  double p3_step = 0.0;   // grid spacing in p3
  double s_step = 0.0;    // grid spacing in s
};

/// Brute-force maximization of F^2(rho, tau) over Bell-diagonal rho with
/// Z and X error rates equal to p and pinched tau. The grid has
/// grid_resolution + 1 points per axis; ties go to the smallest (p3, s).
/// Throws for p outside [0, 1/2] or grid_resolution < 100.
OracleResult restricted_pg_oracle(double p, int grid_resolution,
                                  const OracleOptions& options = {});

struct FidelityCertificate {
  DensityMatrix rho;
  DensityMatrix tau;
  Matrix4c x_witness;
  double objective = 0.0;            // Re Tr X
  double min_block_eigenvalue = 0.0;
};

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kCertificatePsdTol = 1e-9;
inline constexpr double kCertificateObjectiveTol = 1e-8;

/// [[rho, X], [X^dag, tau]].
Matrix8c certificate_block_matrix(const Matrix4c& rho, const Matrix4c& tau, const Matrix4c& x);

/// Optimal witness X = sqrt(rho) P^dag sqrt(tau), with P the unitary polar
/// factor of sqrt(tau) sqrt(rho). Throws CertificateError if the result is
/// not PSD to kCertificatePsdTol or misses F by more than kCertificateObjectiveTol.
FidelityCertificate build_certificate(const DensityMatrix& rho, const DensityMatrix& tau);

struct CertificateVerdict {
  bool pass = false;
  double min_eigenvalue = 0.0;
  double objective = 0.0;       // recomputed Re Tr X
  double fidelity = 0.0;        // recomputed F(rho, tau)
  double objective_gap = 0.0;   // objective - fidelity, <= 0 for a sound witness
};

/// PASS iff the block matrix has min eigenvalue >= -kCertificatePsdTol and
/// Re Tr X <= F + kCertificateObjectiveTol.
CertificateVerdict verify_certificate(const FidelityCertificate& cert);

/// Dynamic-size entry point; throws std::invalid_argument unless all three
/// matrices are 4x4.
CertificateVerdict verify_certificate(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& tau,
                                      const Eigen::MatrixXcd& x_witness);

}  // namespace qkdrate
