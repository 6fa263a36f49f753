#include "tailband/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tailband {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_commas(const std::string& value) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) parts.push_back(trim(item));
  return parts;
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw std::invalid_argument("config key '" + key + "': " + why);
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const double parsed = std::stod(value, &consumed);
    if (consumed != value.size()) bad_key(key, "unparsable value '" + value + "'");
    return parsed;
  } catch (const std::invalid_argument&) {
    bad_key(key, "unparsable value '" + value + "'");
  } catch (const std::out_of_range&) {
    bad_key(key, "value '" + value + "' out of range");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  if (value.empty() || value[0] == '-') bad_key(key, "expected a non-negative integer");
  try {
    std::size_t consumed = 0;
    const std::uint64_t parsed = std::stoull(value, &consumed);
    if (consumed != value.size()) bad_key(key, "unparsable value '" + value + "'");
    return parsed;
  } catch (const std::invalid_argument&) {
    bad_key(key, "unparsable value '" + value + "'");
  } catch (const std::out_of_range&) {
    bad_key(key, "value '" + value + "' out of range");
  }
}

std::size_t parse_positive_count(const std::string& key, const std::string& value) {
  const std::uint64_t parsed = parse_u64(key, value);
  if (parsed == 0) bad_key(key, "must be a positive integer");
  return static_cast<std::size_t>(parsed);
}

std::vector<double> parse_reals(const std::string& key, const std::string& value) {
  std::vector<double> reals;
  if (trim(value).empty()) return reals;
  for (const std::string& part : split_commas(value)) {
    reals.push_back(parse_real(key, part));
  }
  return reals;
}

GridSpec parse_grid(const std::string& key, const std::string& value) {
  const std::vector<std::string> parts = split_commas(value);
  if (parts.size() != 3) bad_key(key, "expected 'start,stop,count'");
  GridSpec grid;
  grid.start = parse_real(key, parts[0]);
  grid.stop = parse_real(key, parts[1]);
  grid.count = parse_positive_count(key, parts[2]);
  return grid;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_key(key, "expected true/false");
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_safe(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

std::string join_reals(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ",";
    out += format17(values[i]);
  }
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path.string() + "'");
  return out;
}

void write_replications(const std::filesystem::path& path,
                        const std::vector<EstimateRecord>& records) {
  std::ofstream out = open_output(path);
  out << "rep,estimator,mode,value,failed,reason\n";
  for (const EstimateRecord& r : records) {
    out << r.rep << ',' << kind_name(r.estimator) << ',' << mode_name(r.mode) << ','
        << format17(r.value) << ',' << (r.failed ? 1 : 0) << ',' << csv_safe(r.reason) << '\n';
  }
}

void write_summary(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out = open_output(path);
  out << "estimator,mode,mean,bias,sd,rmse,ks_normal,failures\n";
  for (const SummaryRow& row : rows) {
    out << kind_name(row.estimator) << ',' << mode_name(row.mode) << ',' << format17(row.mean)
        << ',' << format17(row.bias) << ',' << format17(row.sd) << ',' << format17(row.rmse)
        << ',' << format17(row.ks_normal) << ',' << row.failures << '\n';
  }
}

void write_oracle_gap(const std::filesystem::path& path, const std::vector<OracleGapRow>& rows) {
  std::ofstream out = open_output(path);
  out << "estimator,ks_two_sample,diff_mean,diff_sd\n";
  for (const OracleGapRow& row : rows) {
    out << kind_name(row.estimator) << ',' << format17(row.ks_two_sample) << ','
        << format17(row.diff_mean) << ',' << format17(row.diff_sd) << '\n';
  }
}

void write_curves(const std::filesystem::path& path, const std::vector<CurveRecord>& curves) {
  std::ofstream out = open_output(path);
  out << "rep,process,mode,grid_point,value\n";
  for (const CurveRecord& c : curves) {
    out << c.rep << ',' << process_name(c.process) << ',' << mode_name(c.mode) << ','
        << format17(c.grid_point) << ',' << format17(c.value) << '\n';
  }
}

std::vector<std::pair<std::string, std::string>> echo_config(const ScenarioConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> echo;
  echo.emplace_back("distribution", family_name(cfg.distribution.family));
  echo.emplace_back("dist_params", join_reals(cfg.distribution.params));
  echo.emplace_back("true_gamma", format17(cfg.distribution.true_gamma));
  echo.emplace_back("n_machines", std::to_string(cfg.machines));
  echo.emplace_back("m_per_machine", std::to_string(cfg.machine_size));
  echo.emplace_back("d_exceedances", std::to_string(cfg.exceedances));
  std::string estimators;
  for (std::size_t i = 0; i < cfg.estimators.size(); ++i) {
    if (i > 0) estimators += ",";
    estimators += kind_name(cfg.estimators[i]);
  }
  echo.emplace_back("estimators", estimators);
  if (cfg.quantile_p) echo.emplace_back("quantile_p", format17(*cfg.quantile_p));
  echo.emplace_back("replications", std::to_string(cfg.replications));
  echo.emplace_back("seed", std::to_string(cfg.master_seed));
  echo.emplace_back("xgrid", format17(cfg.xgrid.start) + "," + format17(cfg.xgrid.stop) + "," +
                                 std::to_string(cfg.xgrid.count));
  echo.emplace_back("sgrid", format17(cfg.sgrid.start) + "," + format17(cfg.sgrid.stop) + "," +
                                 std::to_string(cfg.sgrid.count));
  echo.emplace_back("quantile_process_log_mean", cfg.quantile_log_mean ? "true" : "false");
  echo.emplace_back("output_dir", cfg.output_dir);
  return echo;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  static const std::set<std::string> known{
      "distribution", "dist_params", "n_machines",  "m_per_machine",
      "d_exceedances", "replications", "seed",       "estimators",
      "quantile_p",    "xgrid",        "sgrid",      "output_dir",
      "quantile_process_log_mean"};
  static const char* required[] = {"distribution", "dist_params",  "n_machines", "m_per_machine",
                                   "d_exceedances", "replications", "seed"};

  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    }
    if (!known.count(key)) bad_key(key, "unknown key");
    if (kv.count(key)) bad_key(key, "duplicate key");
    kv.emplace(key, value);
  }
  for (const char* key : required) {
    if (!kv.count(key)) {
      throw std::invalid_argument("missing required config key '" + std::string(key) + "'");
    }
  }

  ScenarioConfig cfg;
  cfg.distribution = parse_distribution(kv.at("distribution"),
                                        parse_reals("dist_params", kv.at("dist_params")));
  cfg.machines = parse_positive_count("n_machines", kv.at("n_machines"));
  cfg.machine_size = parse_positive_count("m_per_machine", kv.at("m_per_machine"));
  cfg.exceedances = parse_positive_count("d_exceedances", kv.at("d_exceedances"));
  cfg.replications = parse_positive_count("replications", kv.at("replications"));
  cfg.master_seed = parse_u64("seed", kv.at("seed"));

  if (cfg.machine_size < 2) bad_key("m_per_machine", "must be at least 2");
  if (cfg.exceedances >= cfg.machine_size) {
    bad_key("d_exceedances", "must be smaller than m_per_machine");
  }

  if (kv.count("estimators")) {
    cfg.estimators.clear();
    for (const std::string& token : split_commas(kv.at("estimators"))) {
      const auto kind = parse_estimator(token);
      if (!kind) bad_key("estimators", "unknown estimator '" + token + "'");
      if (std::find(cfg.estimators.begin(), cfg.estimators.end(), *kind) !=
          cfg.estimators.end()) {
        bad_key("estimators", "duplicate estimator '" + token + "'");
      }
      cfg.estimators.push_back(*kind);
    }
    if (cfg.estimators.empty()) bad_key("estimators", "list is empty");
  }

  const bool has_pickands = std::find(cfg.estimators.begin(), cfg.estimators.end(),
                                      EstimatorKind::pickands) != cfg.estimators.end();
  if (has_pickands && 4 * cfg.exceedances >= cfg.machine_size) {
    bad_key("d_exceedances", "pickands requires 4*d < m_per_machine");
  }

  const bool has_weissman = std::find(cfg.estimators.begin(), cfg.estimators.end(),
                                      EstimatorKind::weissman_quantile) != cfg.estimators.end();
  if (kv.count("quantile_p")) {
    const double p = parse_real("quantile_p", kv.at("quantile_p"));
    const double bound =
        static_cast<double>(cfg.exceedances) / static_cast<double>(cfg.machine_size);
    if (!(p > 0.0 && p < bound)) {
      bad_key("quantile_p", "must lie in (0, d/m) = (0, " + format17(bound) + ")");
    }
    cfg.quantile_p = p;
  } else if (has_weissman) {
    bad_key("estimators", "weissman_quantile requires quantile_p");
  }

  if (kv.count("xgrid")) {
    cfg.xgrid = parse_grid("xgrid", kv.at("xgrid"));
    if (!(cfg.xgrid.start >= 1.0)) bad_key("xgrid", "must start at >= 1");
    if (cfg.xgrid.count > 1 && !(cfg.xgrid.stop > cfg.xgrid.start)) {
      bad_key("xgrid", "stop must exceed start");
    }
  }
  if (kv.count("sgrid")) {
    cfg.sgrid = parse_grid("sgrid", kv.at("sgrid"));
    if (!(cfg.sgrid.start >= 0.0 && cfg.sgrid.stop <= 1.0 && cfg.sgrid.stop > cfg.sgrid.start)) {
      bad_key("sgrid", "must satisfy 0 <= start < stop <= 1");
    }
  }
  if (kv.count("quantile_process_log_mean")) {
    cfg.quantile_log_mean =
        parse_bool("quantile_process_log_mean", kv.at("quantile_process_log_mean"));
  }
  if (kv.count("output_dir")) {
    if (kv.at("output_dir").empty()) bad_key("output_dir", "must not be empty");
    cfg.output_dir = kv.at("output_dir");
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

RunManifest execute(const ScenarioConfig& cfg, const RunOptions& opts) {
  ScenarioConfig run_cfg = cfg;
  if (const char* env = std::getenv("TAILBAND_OUT"); env != nullptr && *env != '\0') {
    run_cfg.output_dir = env;
  }
  run_cfg.validate();

  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioResult result = run_scenario(run_cfg, opts);

  // per-(estimator, mode) summaries in config order, distributed before oracle
  std::vector<SummaryRow> summary;
  for (EstimatorKind kind : run_cfg.estimators) {
    const double truth = kind == EstimatorKind::weissman_quantile
                             ? quantile(run_cfg.distribution, 1.0 - *run_cfg.quantile_p)
                             : run_cfg.distribution.true_gamma;
    for (Mode mode : {Mode::distributed, Mode::oracle}) {
      std::vector<EstimateRecord> slice;
      for (const EstimateRecord& r : result.records) {
        if (r.estimator == kind && r.mode == mode) slice.push_back(r);
      }
      try {
        std::vector<SummaryRow> rows = summarize(slice, truth, run_cfg.oracle_k());
        summary.insert(summary.end(), rows.begin(), rows.end());
      } catch (const std::invalid_argument&) {
        // every replication failed for this group; keep the failure count visible
        SummaryRow row;
        row.estimator = kind;
        row.mode = mode;
        row.failures = slice.size();
        row.mean = row.bias = row.sd = row.rmse = row.ks_normal =
            std::numeric_limits<double>::quiet_NaN();
        summary.push_back(row);
      }
    }
  }

  std::vector<OracleGapRow> gaps;
  try {
    gaps = oracle_gap(result.records);
  } catch (const std::invalid_argument&) {
    // no estimator produced a complete pair; emit an empty table
  }

  const std::filesystem::path dir(run_cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" + dir.string() + "': " +
                             ec.message());
  }

  RunManifest manifest;
  manifest.version = kVersion;
  manifest.config_echo = echo_config(run_cfg);

  const auto add_output = [&](const char* name) {
    manifest.outputs.push_back((dir / name).string());
    return dir / name;
  };
  write_replications(add_output("replications.csv"), result.records);
  write_summary(add_output("summary.csv"), summary);
  write_oracle_gap(add_output("oracle_gap.csv"), gaps);
  if (opts.curves) write_curves(add_output("curves.csv"), result.curves);

  manifest.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ofstream out = open_output(dir / "run_manifest.txt");
  out << "version = " << manifest.version << '\n';
  out << "duration_seconds = " << format17(manifest.seconds) << '\n';
  for (const auto& [key, value] : manifest.config_echo) {
    out << "config." << key << " = " << value << '\n';
  }
  for (const std::string& path : manifest.outputs) {
    out << "output = " << path << '\n';
  }
  manifest.outputs.push_back((dir / "run_manifest.txt").string());
  return manifest;
}

}  // namespace tailband
