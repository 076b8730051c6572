#include "app/commands.hpp"

#include "qkdrate/guessing.hpp"
#include "qkdrate/model.hpp"
#include "qkdrate/optimize.hpp"
#include "qkdrate/rates.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

namespace qkdrate::cli {

namespace {

std::string fmt(double x) { return format_number(x); }

std::string flag(bool b) { return b ? "1" : "0"; }

Environment sweep_environment(const RunConfig& cfg) {
  Environment env = cfg.env;
  if (cfg.optimize_f.value_or(true)) {
    env.fixed_f.reset();
  } else {
    env.fixed_f = cfg.estimation_fraction;
  }
  return env;
}

std::vector<double> grid_or(const RunConfig& cfg, GridSpec fallback) {
  return cfg.grid ? cfg.grid->points() : fallback.points();
}

GridSpec default_grid(SweepAxis axis) {
  GridSpec g;
  if (axis == SweepAxis::BlockSize) {
    g.start = 1e4;
    g.stop = 1e9;
    g.count = 60;
    g.spacing = Spacing::Log;
  } else {
    g.start = 0.0;
    g.stop = 0.15;
    g.count = 100;
  }
  return g;
}

GridSpec default_verify_grid() {
  GridSpec g;
  for (int i = 0; i <= 25; ++i) g.values.push_back(i / 100.0);
  return g;
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CsvTable rate_table(const RunConfig& cfg) {
  CsvTable t;
  t.header = {"method", "block_size", "qber",          "f",     "raw_rate", "clamped_rate",
              "delta",  "q_eff",      "leak_per_signal", "epsilon_total", "n_key", "feasible"};
  for (Method m : cfg.methods) {
    RatePoint r;
    double f = cfg.estimation_fraction;
    if (cfg.optimize_f.value_or(false)) {
      const ProtocolConfig tmpl = make_config(cfg.env, cfg.block_size, cfg.qber, 0.5);
      const OptimizedRate best = optimize_f(m, tmpl);
      r = best.rate;
      f = best.f_opt;
    } else {
      r = evaluate_rate(m, make_config(cfg.env, cfg.block_size, cfg.qber, f));
    }
    t.add_row({std::string(to_string(m)), fmt(cfg.block_size), fmt(cfg.qber), fmt(f),
               fmt(r.raw_rate), fmt(r.clamped_rate), fmt(r.delta), fmt(r.effective_qber),
               fmt(r.leak_per_signal), fmt(r.epsilon_total), fmt(r.n_key), flag(r.feasible)});
  }
  return t;
}

CsvTable sweep_table(const RunConfig& cfg, SweepAxis axis) {
  SweepSpec spec;
  spec.methods = cfg.methods;
  spec.axis = axis;
  spec.grid = grid_or(cfg, default_grid(axis));
  spec.env = sweep_environment(cfg);
  spec.block_size_n = cfg.block_size;
  spec.qber = cfg.qber;
  spec.asymptotic = axis == SweepAxis::Qber && cfg.asymptotic;
  spec.workers = cfg.workers;

  CsvTable t;
  t.header = {"axis_value", "method", "raw_rate",      "clamped_rate", "f_opt",
              "q_eff",      "delta",  "epsilon_total", "feasible"};
  for (const SweepRow& row : sweep(spec)) {
    t.add_row({fmt(row.axis_value), std::string(to_string(row.rate.method)),
               fmt(row.rate.raw_rate), fmt(row.rate.clamped_rate), fmt(row.f_opt),
               fmt(row.rate.effective_qber), fmt(row.rate.delta), fmt(row.rate.epsilon_total),
               flag(row.rate.feasible)});
  }
  return t;
}

CsvTable threshold_table(const RunConfig& cfg) {
  const Environment env = sweep_environment(cfg);
  const std::optional<double> at =
      cfg.asymptotic ? std::nullopt : std::optional<double>(cfg.block_size);
  CsvTable t;
  t.header = {"method", "block_size", "threshold_qber", "bracket_width", "status"};
  for (Method m : cfg.methods) {
    const std::string block = at ? fmt(*at) : fmt(std::numeric_limits<double>::infinity());
    try {
      const ThresholdResult r = qber_threshold(m, at, env);
      t.add_row({std::string(to_string(m)), block, fmt(r.threshold_qber), fmt(r.bracket_width),
                 "ok"});
    } catch (const NoKeyError&) {
      t.add_row({std::string(to_string(m)), block, "nan", "nan", "no_key"});
    }
  }
  return t;
}

VerifyReport verify_pg_table(const RunConfig& cfg,
                             const std::function<double(double)>& closed_form) {
  VerifyReport rep;
  rep.table.header = {"p",        "closed_form", "ansatz_max", "ansatz_argmax_s",
                      "oracle",   "oracle_p3",   "oracle_s",   "ansatz_gap",
                      "oracle_gap", "s_gap",     "pass"};
  OracleOptions opts;
  opts.general_diagonal_sigma = cfg.general_diagonal_sigma;
  opts.simplex_resolution = cfg.simplex_resolution;
  for (double p : grid_or(cfg, default_verify_grid())) {
    const double exact = closed_form(p);
    const ScalarMax ansatz = ansatz_pg_maximum(p);
    const OracleResult oracle = restricted_pg_oracle(p, cfg.grid_resolution, opts);
    const double ansatz_gap = std::abs(exact - ansatz.value);
    const double oracle_gap = std::abs(exact - oracle.pg);
    const double s_gap = std::abs(oracle.s - (1.0 - p));
    const bool ok = ansatz_gap <= kAnsatzTolerance && oracle_gap <= kOracleTolerance;
    rep.pass = rep.pass && ok;
    rep.table.add_row({fmt(p), fmt(exact), fmt(ansatz.value), fmt(ansatz.x), fmt(oracle.pg),
                       fmt(oracle.p3), fmt(oracle.s), fmt(ansatz_gap), fmt(oracle_gap),
                       fmt(s_gap), ok ? "PASS" : "FAIL"});
  }
  return rep;
}

VerifyReport verify_pg_table(const RunConfig& cfg) {
  return verify_pg_table(cfg, [](double p) { return pg_closed_form(p); });
}

CertificateReport certificate_report(const RunConfig& cfg) {
  const double p = cfg.qber;
  const double s = stationary_s(p);
  const DensityMatrix rho = bell_to_matrix(optimal_bell_state(p));
  const DensityMatrix tau = PinchedAnsatz{s}.state();

  CertificateReport rep;
  rep.table.header = {"p", "s", "objective", "fidelity", "min_block_eigenvalue", "objective_gap",
                      "verdict"};
  std::ostringstream summary;
  summary << std::setprecision(12);
  try {
    const FidelityCertificate cert = build_certificate(rho, tau);
    const CertificateVerdict v = verify_certificate(cert);
    rep.pass = v.pass;
    rep.table.add_row({fmt(p), fmt(s), fmt(v.objective), fmt(v.fidelity), fmt(v.min_eigenvalue),
                       fmt(v.objective_gap), v.pass ? "PASS" : "FAIL"});
    summary << "p = " << p << ", s = " << s << '\n'
            << "objective Re Tr X     = " << v.objective << '\n'
            << "fidelity F(rho, tau)  = " << v.fidelity << '\n'
            << "min block eigenvalue  = " << v.min_eigenvalue << '\n'
            << "guessing probability  = " << v.fidelity * v.fidelity << '\n'
            << "verdict: " << (v.pass ? "PASS" : "FAIL") << '\n';
  } catch (const CertificateError& e) {
    rep.pass = false;
    rep.table.add_row({fmt(p), fmt(s), "nan", "nan", "nan", "nan", "FAIL"});
    summary << "certificate error: " << e.what() << "\nverdict: FAIL\n";
  }
  rep.summary = summary.str();
  return rep;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-size key rates for BB84: FME, AEP and EUR bounds", "qkdrate"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset_name;
  std::string out_path;
  std::string delta_variant;
  std::optional<double> gamma;
  std::optional<double> fixed_f;
  std::optional<unsigned> workers;

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"rate", "Evaluate the key rate of each method at one operating point"},
      {"sweep-n", "Sweep the block size N"},
      {"sweep-qber", "Sweep the observed QBER"},
      {"threshold", "Largest QBER with a positive key rate"},
      {"verify-pg", "Check the closed-form guessing probability against oracles"},
      {"certificate", "Build and verify a fidelity certificate"},
  };
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--preset", preset_name, "Built-in figure configuration")
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4"}));
    sub->add_option("--out", out_path, "Write the CSV table here");
    sub->add_option("--delta-variant", delta_variant, "QBER confidence interval")
        ->check(CLI::IsMember({"main", "appendix"}));
    sub->add_option("--gamma", gamma, "Reconciliation inefficiency (>= 1)");
    sub->add_option("--fixed-f", fixed_f, "Hold the estimation fraction fixed");
    sub->add_option("--workers", workers, "Worker threads for sweeps");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "qkdrate: " << e.what() << '\n';
    return kExitConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  std::optional<CsvTable> table;
  std::string summary;
  int code = kExitOk;
  try {
    if (!preset_name.empty()) cfg = preset(preset_name);
    if (!config_path.empty()) apply_json_text(cfg, read_file(config_path));
    if (!delta_variant.empty()) cfg.env.delta_variant = parse_delta_variant(delta_variant);
    if (gamma) cfg.env.gamma = *gamma;
    if (fixed_f) {
      cfg.estimation_fraction = *fixed_f;
      cfg.optimize_f = false;
    }
    if (workers) cfg.workers = std::max(1u, *workers);
    if (!out_path.empty()) cfg.output = out_path;
    validate(cfg);

    std::ostringstream s;
    s << std::setprecision(9);
    if (command == "rate") {
      table = rate_table(cfg);
      for (const auto& row : table->rows) {
        s << row[0] << ": rate " << row[5] << " (raw " << row[4] << ", q_eff " << row[7]
          << ", delta " << row[6] << ")\n";
      }
    } else if (command == "sweep-n" || command == "sweep-qber") {
      table = sweep_table(cfg, command == "sweep-n" ? SweepAxis::BlockSize : SweepAxis::Qber);
      s << command << ": " << table->rows.size() << " rows\n";
    } else if (command == "threshold") {
      table = threshold_table(cfg);
      for (const auto& row : table->rows) {
        s << row[0] << ": threshold QBER " << row[2] << " (N = " << row[1] << ", " << row[4]
          << ")\n";
      }
    } else if (command == "verify-pg") {
      VerifyReport rep = verify_pg_table(cfg);
      table = std::move(rep.table);
      s << "verify-pg: " << table->rows.size() << " QBER values, "
        << (rep.pass ? "PASS" : "FAIL") << '\n';
      if (!rep.pass) code = kExitVerificationFailed;
    } else {
      CertificateReport rep = certificate_report(cfg);
      table = std::move(rep.table);
      s << rep.summary;
      if (!rep.pass) code = kExitVerificationFailed;
    }
    summary = s.str();
  } catch (const ConfigError& e) {
    err << "qkdrate: configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "qkdrate: configuration error: " << e.what() << '\n';
    return kExitConfigError;
  }

  if (cfg.output) {
    std::ofstream file(*cfg.output, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "qkdrate: cannot write " << *cfg.output << '\n';
      return kExitConfigError;
    }
    table->write(file);

    nlohmann::json meta;
    meta["command"] = command;
    meta["arguments"] = args;
    meta["generated_at"] = timestamp_utc();
    meta["exit_code"] = code;
    std::ofstream side(*cfg.output + ".meta.json", std::ios::binary | std::ios::trunc);
    side << meta.dump(2) << '\n';

    out << summary;
  } else {
    table->write(out);
    err << summary;
  }
  return code;
}

}  // namespace qkdrate::cli
