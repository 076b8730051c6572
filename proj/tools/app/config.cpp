#include "app/config.hpp"

#include "qkdrate/search.hpp"

#include <cmath>

namespace qkdrate::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field, "expected a finite number");
  return x;
}

double probability(const json& v, const std::string& field) {
  const double x = number(v, field);
  if (!(x > 0.0 && x < 1.0)) throw ConfigError(field, "must lie in (0, 1)");
  return x;
}

bool boolean(const json& v, const std::string& field) {
  if (!v.is_boolean()) throw ConfigError(field, "expected true or false");
  return v.get<bool>();
}

std::string string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

int positive_int(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    throw ConfigError(field, "expected a positive integer");
  }
  return static_cast<int>(v.get<long long>());
}

void require_object(const json& v, const std::string& field) {
  if (!v.is_object()) throw ConfigError(field, "expected an object");
}

[[noreturn]] void unknown(const std::string& field) {
  throw ConfigError(field, "unknown key");
}

void apply_channel(ChannelModel& ch, const json& doc) {
  require_object(doc, "channel");
  for (const auto& [key, v] : doc.items()) {
    const std::string f = join("channel", key);
    if (key == "attenuation_db_per_km") {
      ch.attenuation_db_per_km = number(v, f);
      if (ch.attenuation_db_per_km < 0.0) throw ConfigError(f, "must be >= 0");
    } else if (key == "distance_km") {
      ch.distance_km = number(v, f);
      if (ch.distance_km < 0.0) throw ConfigError(f, "must be >= 0");
    } else {
      unknown(f);
    }
  }
}

void apply_budget(SecurityBudget& b, const json& doc) {
  require_object(doc, "budget");
  for (const auto& [key, v] : doc.items()) {
    const std::string f = join("budget", key);
    if (key == "eps_pe") {
      b.eps_pe = probability(v, f);
    } else if (key == "eps_ec") {
      b.eps_ec = probability(v, f);
    } else if (key == "eps_h") {
      b.eps_h = probability(v, f);
    } else if (key == "eps_s") {
      b.eps_s = probability(v, f);
    } else {
      unknown(f);
    }
  }
}

GridSpec parse_grid(const json& doc) {
  GridSpec g;
  if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      g.values.push_back(number(doc[i], "grid[" + std::to_string(i) + "]"));
    }
    return g;
  }
  require_object(doc, "grid");
  bool have_start = false, have_stop = false;
  for (const auto& [key, v] : doc.items()) {
    const std::string f = join("grid", key);
    if (key == "start") {
      g.start = number(v, f);
      have_start = true;
    } else if (key == "stop") {
      g.stop = number(v, f);
      have_stop = true;
    } else if (key == "count") {
      g.count = static_cast<std::size_t>(positive_int(v, f));
    } else if (key == "spacing") {
      const std::string s = string(v, f);
      if (s == "linear") {
        g.spacing = Spacing::Linear;
      } else if (s == "log") {
        g.spacing = Spacing::Log;
      } else {
        throw ConfigError(f, "expected \"linear\" or \"log\"");
      }
    } else {
      unknown(f);
    }
  }
  if (!have_start || !have_stop || g.count == 0) {
    throw ConfigError("grid", "needs start, stop and count (or an array of values)");
  }
  return g;
}

}  // namespace

std::vector<double> GridSpec::points() const {
  if (!values.empty()) return values;
  try {
    return spacing == Spacing::Log ? log_space(start, stop, count) : lin_space(start, stop, count);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("grid", e.what());
  }
}

RunConfig preset(std::string_view name) {
  RunConfig cfg;
  cfg.env.channel = {0.2, 10.0};
  cfg.env.budget = {1e-10, 1e-10, 1e-10, 1e-10};
  cfg.env.gamma = 1.0;
  cfg.env.delta_variant = DeltaVariant::Appendix;
  cfg.methods = {Method::FME, Method::AEP, Method::EUR};

  GridSpec n_grid;
  n_grid.start = 1e4;
  n_grid.stop = 1e9;
  n_grid.count = 60;
  n_grid.spacing = Spacing::Log;

  GridSpec q_grid;
  q_grid.start = 0.0;
  q_grid.stop = 0.15;
  q_grid.count = 100;
  q_grid.spacing = Spacing::Linear;

  if (name == "fig1" || name == "fig2") {
    cfg.qber = name == "fig1" ? 0.03 : 0.06;
    cfg.block_size = 1e8;
    cfg.grid = n_grid;
  } else if (name == "fig3") {
    cfg.block_size = 1e5;
    cfg.grid = q_grid;
  } else if (name == "fig4") {
    cfg.asymptotic = true;
    cfg.grid = q_grid;
  } else {
    throw ConfigError("preset", "unknown preset \"" + std::string(name) +
                                    "\" (expected fig1, fig2, fig3 or fig4)");
  }
  return cfg;
}

void apply_json(RunConfig& cfg, const json& doc) {
  require_object(doc, "");
  for (const auto& [key, v] : doc.items()) {
    if (key == "block_size") {
      cfg.block_size = number(v, key);
    } else if (key == "qber") {
      cfg.qber = number(v, key);
    } else if (key == "estimation_fraction") {
      cfg.estimation_fraction = number(v, key);
    } else if (key == "optimize_f") {
      cfg.optimize_f = boolean(v, key);
    } else if (key == "gamma") {
      cfg.env.gamma = number(v, key);
    } else if (key == "delta_variant") {
      try {
        cfg.env.delta_variant = parse_delta_variant(string(v, key));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "methods") {
      if (!v.is_array()) throw ConfigError(key, "expected an array of method names");
      cfg.methods.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string f = key + "[" + std::to_string(i) + "]";
        try {
          cfg.methods.push_back(parse_method(string(v[i], f)));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(f, e.what());
        }
      }
    } else if (key == "asymptotic") {
      cfg.asymptotic = boolean(v, key);
    } else if (key == "channel") {
      apply_channel(cfg.env.channel, v);
    } else if (key == "budget") {
      apply_budget(cfg.env.budget, v);
    } else if (key == "grid") {
      cfg.grid = parse_grid(v);
    } else if (key == "grid_resolution") {
      cfg.grid_resolution = positive_int(v, key);
    } else if (key == "general_diagonal_sigma") {
      cfg.general_diagonal_sigma = boolean(v, key);
    } else if (key == "simplex_resolution") {
      cfg.simplex_resolution = positive_int(v, key);
    } else if (key == "output") {
      cfg.output = string(v, key);
    } else if (key == "workers") {
      cfg.workers = static_cast<unsigned>(positive_int(v, key));
    } else {
      unknown(key);
    }
  }
}

void apply_json_text(RunConfig& cfg, std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  apply_json(cfg, doc);
}

void validate(const RunConfig& cfg) {
  try {
    validate(cfg.env.channel);
    validate(cfg.env.budget);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", e.what());
  }
  if (!(cfg.env.gamma >= 1.0)) throw ConfigError("gamma", "must be >= 1");
  if (!(cfg.block_size > 0.0)) throw ConfigError("block_size", "must be positive");
  if (!(cfg.qber >= 0.0 && cfg.qber <= 0.5)) throw ConfigError("qber", "must lie in [0, 0.5]");
  if (!(cfg.estimation_fraction > 0.0 && cfg.estimation_fraction < 1.0)) {
    throw ConfigError("estimation_fraction", "must lie in (0, 1)");
  }
  if (cfg.methods.empty()) throw ConfigError("methods", "at least one method required");
}

}  // namespace qkdrate::cli
