#pragma once

#include "app/config.hpp"
#include "app/csv.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace qkdrate::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitConfigError = 2,
};

/// Column schemas.
///   rate:        method,block_size,qber,f,raw_rate,clamped_rate,delta,q_eff,
///                leak_per_signal,epsilon_total,n_key,feasible
///   sweep-*:     axis_value,method,raw_rate,clamped_rate,f_opt,q_eff,delta,
///                epsilon_total,feasible
///   threshold:   method,block_size,threshold_qber,bracket_width,status
///   verify-pg:   p,closed_form,ansatz_max,ansatz_argmax_s,oracle,oracle_p3,
///                oracle_s,ansatz_gap,oracle_gap,s_gap,pass
///   certificate: p,s,objective,fidelity,min_block_eigenvalue,objective_gap,verdict
CsvTable rate_table(const RunConfig& cfg);
CsvTable sweep_table(const RunConfig& cfg, SweepAxis axis);
CsvTable threshold_table(const RunConfig& cfg);

inline constexpr double kAnsatzTolerance = 1e-6;
inline constexpr double kOracleTolerance = 1e-4;

struct VerifyReport {
  CsvTable table;
  bool pass = true;
};

/// Compares closed_form(p) with the 1-D ansatz maximum and the brute-force
/// oracle on every QBER in the grid. The closed form is injectable so that a
/// corrupted formula can be checked to fail.
VerifyReport verify_pg_table(const RunConfig& cfg,
                             const std::function<double(double)>& closed_form);
VerifyReport verify_pg_table(const RunConfig& cfg);

struct CertificateReport {
  CsvTable table;
  bool pass = false;
  std::string summary;
};

/// Fidelity certificate for the optimal Bell-diagonal state at cfg.qber
/// against the pinched ansatz at s = 1 - p.
CertificateReport certificate_report(const RunConfig& cfg);

/// Entry point shared by main() and the tests. args excludes argv[0].
/// Tables go to --out when given (summary on `out`), otherwise to `out` with
/// the summary on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qkdrate::cli
