#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <functional>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "greenflow/bootstrap.hpp"
#include "greenflow/calibrate.hpp"
#include "greenflow/errors.hpp"
#include "greenflow/preprocess.hpp"
#include "greenflow/simulate.hpp"
#include "greenflow/sweep.hpp"
#include "greenflow/synth.hpp"
#include "greenflow/thermal.hpp"
#include "greenflow/trace.hpp"
#include "greenflow/vae.hpp"

namespace greenflow {

// File-based pipeline commands. Every command reads its inputs from disk,
// writes its artifacts under config.out_dir, and leaves the inputs untouched;
// all output serialization goes through ordered JSON / fixed-format CSV so
// reruns with the same config are byte-identical.

using json = nlohmann::ordered_json;

struct RunConfig {
  std::string table3_path = "data/table3.csv";
  std::string table4_path = "data/table4.csv";
  std::string out_dir = "out";
  std::string model_path;  // defaults to <out_dir>/model.json
  VaeHyper hyper;
  BootstrapConfig bootstrap;
  ObjectiveWeights weights;
  ThermalLimits limits;
  LumpedNode node;
  std::uint64_t seed = 1;
  std::size_t n_synthetic = 200;
  std::string bootstrap_metric = "energy_kwh";

  std::string model_file() const {
    return model_path.empty() ? out_dir + "/model.json" : model_path;
  }
};

namespace artifacts {
inline std::string calibration(const RunConfig& c) { return c.out_dir + "/calibration.json"; }
inline std::string residuals(const RunConfig& c) { return c.out_dir + "/residuals.csv"; }
inline std::string traces(const RunConfig& c) { return c.out_dir + "/traces.csv"; }
inline std::string sweep(const RunConfig& c) { return c.out_dir + "/sweep.csv"; }
inline std::string loss_history(const RunConfig& c) { return c.out_dir + "/loss_history.csv"; }
inline std::string synthetic(const RunConfig& c) { return c.out_dir + "/synthetic.csv"; }
inline std::string validation(const RunConfig& c) { return c.out_dir + "/validation.json"; }
inline std::string bootstrap(const RunConfig& c) { return c.out_dir + "/bootstrap.json"; }
inline std::string sweet_spot(const RunConfig& c) { return c.out_dir + "/sweet_spot.json"; }
inline std::string temperature(const RunConfig& c) { return c.out_dir + "/temperature.csv"; }
inline std::string thermal_summary(const RunConfig& c) {
  return c.out_dir + "/thermal_summary.json";
}
}  // namespace artifacts

namespace detail {

inline std::string base64_encode(const unsigned char* data, std::size_t len) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
    if (i + 1 < len) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
    if (i + 2 < len) chunk |= static_cast<std::uint32_t>(data[i + 2]);
    out.push_back(alphabet[(chunk >> 18) & 0x3f]);
    out.push_back(alphabet[(chunk >> 12) & 0x3f]);
    out.push_back(i + 1 < len ? alphabet[(chunk >> 6) & 0x3f] : '=');
    out.push_back(i + 2 < len ? alphabet[chunk & 0x3f] : '=');
  }
  return out;
}

inline std::vector<unsigned char> base64_decode(const std::string& text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (text.size() % 4 != 0) throw encoding_error("base64: length not a multiple of 4");
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t chunk = 0;
    int pads = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      char c = text[i + j];
      if (c == '=') {
        if (i + 4 != text.size() || j < 2) throw encoding_error("base64: misplaced padding");
        ++pads;
        chunk <<= 6;
        continue;
      }
      int v = value_of(c);
      if (v < 0 || pads > 0) throw encoding_error("base64: invalid character");
      chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
    }
    out.push_back(static_cast<unsigned char>((chunk >> 16) & 0xff));
    if (pads < 2) out.push_back(static_cast<unsigned char>((chunk >> 8) & 0xff));
    if (pads < 1) out.push_back(static_cast<unsigned char>(chunk & 0xff));
  }
  return out;
}

// doubles as little-endian base64, independent of host byte order
inline std::string encode_doubles(const std::vector<double>& v) {
  std::vector<unsigned char> bytes;
  bytes.reserve(v.size() * 8);
  for (double d : v) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    for (int b = 0; b < 8; ++b)
      bytes.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xff));
  }
  return base64_encode(bytes.data(), bytes.size());
}

inline std::vector<double> decode_doubles(const std::string& text) {
  std::vector<unsigned char> bytes = base64_decode(text);
  if (bytes.size() % 8 != 0) throw encoding_error("decode_doubles: byte count not multiple of 8");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(bytes[i * 8 + static_cast<std::size_t>(b)]) << (8 * b);
    std::memcpy(&out[i], &bits, 8);
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_input("cannot write " + path);
  out << text;
}

inline void write_json(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

inline json read_json_artifact(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw missing_artifact("missing artifact: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw invalid_input("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

inline std::string pair_label(const PairKey& key) {
  return std::string(to_string(key.first)) + "/" + key.second;
}

}  // namespace detail

// --- calibration artifact round-trip ---

inline json calibration_to_json(const CalibrationResult& calib) {
  json j;
  j["seed"] = calib.seed;
  json params = json::object();
  for (const auto& [key, p] : calib.params) {
    json row;
    row["locality_hit_prob"] = p.locality_hit_prob;
    row["prefetch_overlap"] = p.prefetch_overlap;
    row["speculative_dup_rate"] = p.speculative_dup_rate;
    row["base_cpu_boost"] = p.base_cpu_boost;
    row["power_multiplier"] = p.power_multiplier;
    row["energy_unit_scale"] = p.energy_unit_scale;
    row["tat_sensitivity"] = p.tat_sensitivity;
    row["energy_sensitivity"] = p.energy_sensitivity;
    params[detail::pair_label(key)] = row;
  }
  j["params"] = params;
  return j;
}

inline CalibrationResult calibration_from_json(const json& j) {
  CalibrationResult calib;
  calib.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& [label, row] : j.at("params").items()) {
    auto slash = label.find('/');
    if (slash == std::string::npos)
      throw schema_error("calibration artifact: bad pair label " + label);
    PairKey key{scheduler_from_string(label.substr(0, slash)), label.substr(slash + 1)};
    SchedulerPolicyParams p;
    p.locality_hit_prob = row.at("locality_hit_prob").get<double>();
    p.prefetch_overlap = row.at("prefetch_overlap").get<double>();
    p.speculative_dup_rate = row.at("speculative_dup_rate").get<double>();
    p.base_cpu_boost = row.at("base_cpu_boost").get<double>();
    p.power_multiplier = row.at("power_multiplier").get<double>();
    p.energy_unit_scale = row.at("energy_unit_scale").get<double>();
    p.tat_sensitivity = row.at("tat_sensitivity").get<double>();
    p.energy_sensitivity = row.at("energy_sensitivity").get<double>();
    calib.params[key] = p;
  }
  return calib;
}

// --- model artifact round-trip ---

inline json model_to_json(const VaeParams& params, const VaeHyper& hyper,
                          const FeatureSchema& schema, double energy_coeff) {
  json j;
  json jh;
  jh["latent_dim"] = hyper.latent_dim;
  jh["encoder_widths"] = hyper.encoder_widths;
  jh["decoder_widths"] = hyper.decoder_widths;
  jh["beta"] = hyper.beta;
  jh["gamma"] = hyper.gamma;
  jh["learning_rate"] = hyper.learning_rate;
  jh["batch_size"] = hyper.batch_size;
  jh["epochs"] = hyper.epochs;
  jh["seed"] = hyper.seed;
  j["hyper"] = jh;

  json js;
  js["categoricals"] = json::array();
  for (const auto& c : schema.categoricals)
    js["categoricals"].push_back({{"name", c.name}, {"categories", c.categories}});
  js["numerics"] = json::array();
  for (const auto& n : schema.numerics)
    js["numerics"].push_back({{"name", n.name}, {"min", n.min}, {"max", n.max}});
  j["schema"] = js;

  j["input_dim"] = params.input_dim;
  j["energy_coeff"] = energy_coeff;
  j["weights_base64_le_f64"] = detail::encode_doubles(params.flatten());
  return j;
}

struct ModelArtifact {
  VaeParams params;
  VaeHyper hyper;
  FeatureSchema schema;
  double energy_coeff = 0.0;
};

inline ModelArtifact model_from_json(const json& j) {
  ModelArtifact m;
  const json& jh = j.at("hyper");
  m.hyper.latent_dim = jh.at("latent_dim").get<std::size_t>();
  m.hyper.encoder_widths = jh.at("encoder_widths").get<std::vector<std::size_t>>();
  m.hyper.decoder_widths = jh.at("decoder_widths").get<std::vector<std::size_t>>();
  m.hyper.beta = jh.at("beta").get<double>();
  m.hyper.gamma = jh.at("gamma").get<double>();
  m.hyper.learning_rate = jh.at("learning_rate").get<double>();
  m.hyper.batch_size = jh.at("batch_size").get<std::size_t>();
  m.hyper.epochs = jh.at("epochs").get<std::size_t>();
  m.hyper.seed = jh.at("seed").get<std::uint64_t>();

  for (const auto& c : j.at("schema").at("categoricals"))
    m.schema.categoricals.push_back(
        {c.at("name").get<std::string>(), c.at("categories").get<std::vector<std::string>>()});
  for (const auto& n : j.at("schema").at("numerics"))
    m.schema.numerics.push_back(
        {n.at("name").get<std::string>(), n.at("min").get<double>(), n.at("max").get<double>()});

  m.energy_coeff = j.at("energy_coeff").get<double>();
  m.params = VaeParams::init(j.at("input_dim").get<std::size_t>(), m.hyper);
  m.params.unflatten(detail::decode_doubles(j.at("weights_base64_le_f64").get<std::string>()));
  return m;
}

// --- config ---

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw invalid_input(std::string("malformed config JSON: ") + e.what());
  }
  RunConfig c;
  c.table3_path = j.value("table3", c.table3_path);
  c.table4_path = j.value("table4", c.table4_path);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.model_path = j.value("model", c.model_path);
  c.seed = j.value("seed", c.seed);
  c.n_synthetic = j.value("n_synthetic", c.n_synthetic);
  c.bootstrap_metric = j.value("bootstrap_metric", c.bootstrap_metric);
  if (j.contains("hyper")) {
    const json& h = j["hyper"];
    c.hyper.latent_dim = h.value("latent_dim", c.hyper.latent_dim);
    c.hyper.encoder_widths = h.value("encoder_widths", c.hyper.encoder_widths);
    c.hyper.decoder_widths = h.value("decoder_widths", c.hyper.decoder_widths);
    c.hyper.beta = h.value("beta", c.hyper.beta);
    c.hyper.gamma = h.value("gamma", c.hyper.gamma);
    c.hyper.learning_rate = h.value("learning_rate", c.hyper.learning_rate);
    c.hyper.batch_size = h.value("batch_size", c.hyper.batch_size);
    c.hyper.epochs = h.value("epochs", c.hyper.epochs);
  }
  if (j.contains("bootstrap")) {
    const json& b = j["bootstrap"];
    c.bootstrap.b_samples = b.value("b_samples", c.bootstrap.b_samples);
    c.bootstrap.confidence_level = b.value("confidence_level", c.bootstrap.confidence_level);
    c.bootstrap.paired = b.value("paired", c.bootstrap.paired);
  }
  if (j.contains("weights")) {
    const json& w = j["weights"];
    c.weights.alpha_energy = w.value("alpha_energy", c.weights.alpha_energy);
    c.weights.beta_time = w.value("beta_time", c.weights.beta_time);
  }
  if (j.contains("limits")) {
    const json& l = j["limits"];
    c.limits.max_core_temp_k = l.value("max_core_temp_k", c.limits.max_core_temp_k);
    c.limits.max_power_w = l.value("max_power_w", c.limits.max_power_w);
  }
  if (j.contains("node")) {
    const json& n = j["node"];
    c.node.thermal_resistance_k_w = n.value("thermal_resistance_k_w", c.node.thermal_resistance_k_w);
    c.node.thermal_capacitance_j_k = n.value("thermal_capacitance_j_k", c.node.thermal_capacitance_j_k);
    c.node.ambient_k = n.value("ambient_k", c.node.ambient_k);
  }
  return c;
}

// --- shared helpers over the calibration artifact ---

inline CalibrationResult load_calibration_artifact(const RunConfig& config) {
  return calibration_from_json(detail::read_json_artifact(artifacts::calibration(config)));
}

inline std::vector<ExecutionTrace> base_traces(const CalibrationResult& calib,
                                               const HardwareModel& hw = HardwareModel()) {
  std::vector<ExecutionTrace> traces;
  for (const auto& [key, p] : calib.params)
    traces.push_back(simulate(workflow_by_id(key.second), key.first, FrequencyConfig{}, p,
                              calib.seed, hw));
  return traces;
}

// The 150-cell grid as full traces (with power), used for training data and
// validation envelopes.
inline std::vector<ExecutionTrace> grid_traces(const CalibrationResult& calib,
                                               const HardwareModel& hw = HardwareModel()) {
  std::vector<ExecutionTrace> traces;
  for (const auto& [key, p] : calib.params) {
    ExecutionTrace base =
        simulate(workflow_by_id(key.second), key.first, FrequencyConfig{}, p, calib.seed, hw);
    for (double r : kReductionGrid) traces.push_back(apply_frequency_reduction(base, r, p));
  }
  return traces;
}

inline double mean_energy_unit_scale(const CalibrationResult& calib) {
  double acc = 0.0;
  for (const auto& [key, p] : calib.params) acc += p.energy_unit_scale;
  return acc / static_cast<double>(calib.params.size());
}

// --- commands ---

inline void cmd_calibrate(const RunConfig& config) {
  TableLoadResult base = load_table(config.table3_path);
  if (base.empty_warning) throw invalid_input("empty base table: " + config.table3_path);
  auto reduction = load_reduction_table(config.table4_path);
  CalibrationResult calib = calibrate(base.traces, reduction, config.seed);
  detail::write_json(artifacts::calibration(config), calibration_to_json(calib));
  std::ostringstream csv;
  csv << "scheduler,workflow,tat_rel_err,power_rel_err,energy_rel_err,reduction_rel_err\n";
  for (const auto& r : calib.residuals)
    csv << to_string(r.scheduler) << ',' << r.workflow << ',' << format2(r.tat_rel_err * 100.0)
        << ',' << format2(r.power_rel_err * 100.0) << ',' << format2(r.energy_rel_err * 100.0)
        << ',' << format2(r.reduction_rel_err * 100.0) << '\n';
  detail::write_text(artifacts::residuals(config), csv.str());
}

inline void cmd_simulate(const RunConfig& config) {
  CalibrationResult calib = load_calibration_artifact(config);
  std::ostringstream csv;
  csv << kTraceCsvHeader << '\n';
  for (const auto& t : base_traces(calib)) csv << trace_csv_row(t) << '\n';
  detail::write_text(artifacts::traces(config), csv.str());
}

inline void cmd_sweep(const RunConfig& config) {
  CalibrationResult calib = load_calibration_artifact(config);
  std::ostringstream csv;
  csv << "scheduler,workflow,reduction_pct,tat_ms,energy_kwh\n";
  for (const auto& cell : sweep_simulated(calib))
    csv << to_string(cell.scheduler) << ',' << cell.workflow << ','
        << static_cast<int>(std::lround(cell.reduction * 100.0)) << ','
        << format2(cell.tat_ms) << ',' << format2(cell.energy_kwh) << '\n';
  detail::write_text(artifacts::sweep(config), csv.str());
}

inline void cmd_train(const RunConfig& config) {
  CalibrationResult calib = load_calibration_artifact(config);
  std::vector<RawRow> rows;
  for (const auto& t : grid_traces(calib)) rows.push_back(raw_row_from_trace(t));
  Dataset ds = assemble(rows, config.seed);

  VaeHyper hyper = config.hyper;
  hyper.seed = config.seed;
  CfdContext cfd;
  cfd.enabled = true;
  cfd.schema = ds.schema;
  cfd.energy_coeff = mean_energy_unit_scale(calib);

  TrainResult tr = train(ds, hyper, cfd);

  detail::write_json(config.model_file(),
                     model_to_json(tr.params, hyper, ds.schema, cfd.energy_coeff));
  auto fmt = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.8f", v);
    return std::string(buf);
  };
  std::ostringstream csv;
  csv << "epoch,recon,kl,cfd,total,val_total\n";
  for (const auto& e : tr.history)
    csv << e.epoch << ',' << fmt(e.train.recon) << ',' << fmt(e.train.kl) << ','
        << fmt(e.train.cfd) << ',' << fmt(e.train.total) << ',' << fmt(e.val_total) << '\n';
  detail::write_text(artifacts::loss_history(config), csv.str());
}

inline constexpr const char* kSyntheticCsvHeader =
    "scheduler,workflow,reduction,tat_ms,power_w,energy_kwh,accepted,rejection_reason";

inline void cmd_generate(const RunConfig& config) {
  ModelArtifact model = model_from_json(detail::read_json_artifact(config.model_file()));
  std::vector<SyntheticRecord> records = generate(model.params, model.schema, config.n_synthetic,
                                                  config.limits, config.node, config.seed);
  std::ostringstream csv;
  csv << kSyntheticCsvHeader << '\n';
  for (const auto& r : records)
    csv << to_string(r.scheduler) << ',' << r.workflow << ',' << format2(r.reduction * 100.0)
        << ',' << format2(r.tat_ms) << ',' << format2(r.power_w) << ','
        << format2(r.energy_kwh) << ',' << (r.accepted ? 1 : 0) << ',' << r.rejection_reason
        << '\n';
  detail::write_text(artifacts::synthetic(config), csv.str());
}

inline std::vector<SyntheticRecord> load_synthetic_artifact(const RunConfig& config) {
  std::ifstream in(artifacts::synthetic(config));
  if (!in) throw missing_artifact("missing artifact: " + artifacts::synthetic(config));
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw invalid_input("empty synthetic CSV");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSyntheticCsvHeader) throw parse_error("unexpected synthetic header", lineno);
  std::vector<SyntheticRecord> records;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() < 7) throw parse_error("expected at least 7 fields", lineno);
    SyntheticRecord r;
    try {
      r.scheduler = scheduler_from_string(fields[0]);
      r.workflow = fields[1];
      r.reduction = std::stod(fields[2]) / 100.0;
      r.tat_ms = std::stod(fields[3]);
      r.power_w = std::stod(fields[4]);
      r.energy_kwh = std::stod(fields[5]);
      r.accepted = std::stoi(fields[6]) != 0;
    } catch (const std::exception&) {
      throw parse_error("malformed synthetic row", lineno);
    }
    if (fields.size() > 7) r.rejection_reason = fields[7];
    records.push_back(std::move(r));
  }
  return records;
}

inline void cmd_validate(const RunConfig& config) {
  CalibrationResult calib = load_calibration_artifact(config);
  std::vector<SyntheticRecord> records = load_synthetic_artifact(config);
  std::vector<SyntheticRecord> accepted;
  for (const auto& r : records)
    if (r.accepted) accepted.push_back(r);
  if (accepted.empty()) throw invalid_input("no accepted synthetic records to validate");

  std::vector<ExecutionTrace> grid = grid_traces(calib);
  std::map<SchedulerKind, SchedulerEnvelope> env_map;
  for (const auto& t : grid) {
    auto& env = env_map[t.scheduler];
    env.scheduler = t.scheduler;
    env.points.emplace_back(t.tat_ms, t.energy_kwh);
  }
  std::vector<SchedulerEnvelope> envelopes;
  for (auto& [k, env] : env_map) envelopes.push_back(std::move(env));

  ValidationReport report =
      validate_batch(accepted, grid, envelopes, config.limits, config.node);
  json j;
  j["n_records"] = accepted.size();
  j["n_acceptable"] = report.n_acceptable;
  j["outlier_rule"] = report.outlier_rule;
  json per = json::array();
  for (std::size_t i = 0; i < report.per_record.size(); ++i) {
    const auto& rv = report.per_record[i];
    per.push_back({{"index", i},
                   {"constraint_ok", rv.constraint_ok},
                   {"cross_consistent", rv.cross_consistent},
                   {"outlier", rv.outlier},
                   {"acceptable", rv.acceptable}});
  }
  j["records"] = per;
  detail::write_json(artifacts::validation(config), j);
}

inline void cmd_bootstrap(const RunConfig& config) {
  TableLoadResult base = load_table(config.table3_path);
  if (base.empty_warning) throw invalid_input("empty base table: " + config.table3_path);
  auto reduction = load_reduction_table(config.table4_path);
  if (reduction.empty()) throw invalid_input("empty reduction table: " + config.table4_path);

  // matched comparison: Table 3 energy vs the 15%-reduction energy column
  // over the rows present in both tables
  std::map<PairKey, double> base_energy;
  for (const auto& t : base.traces) base_energy[{t.scheduler, t.workflow}] = t.energy_kwh;
  std::vector<double> real, synth;
  for (const auto& r : reduction) {
    auto it = base_energy.find({r.scheduler, r.workflow});
    if (it == base_energy.end())
      throw invalid_input("reduction row without base counterpart: " +
                          detail::pair_label({r.scheduler, r.workflow}));
    real.push_back(it->second);
    synth.push_back(r.energy_15_kwh);
  }

  BootstrapConfig bcfg = config.bootstrap;
  bcfg.seed = config.seed;
  BootstrapResult res = bootstrap_diff_means(real, synth, bcfg);

  json j;
  j["metric"] = config.bootstrap_metric;
  j["n_real"] = real.size();
  j["n_synth"] = synth.size();
  j["observed_diff_raw"] = res.observed_diff_raw;
  j["observed_diff_normalized"] = res.observed_diff_normalized;
  j["ci"] = {res.ci_low, res.ci_high};
  j["p_value"] = res.p_value;
  j["b_samples"] = bcfg.b_samples;
  j["seed"] = bcfg.seed;
  j["paired"] = bcfg.paired;
  detail::write_json(artifacts::bootstrap(config), j);
}

inline void cmd_optimize(const RunConfig& config) {
  CalibrationResult calib = load_calibration_artifact(config);
  std::vector<SweepCell> grid = sweep_simulated(calib);
  std::vector<SweetSpotResult> spots = sweet_spot(grid, config.weights);
  std::vector<TradeoffRow> tradeoff = tradeoff_report(grid);

  std::map<double, std::size_t> histogram;
  for (const auto& s : spots) ++histogram[s.best_reduction];
  double modal = 0.0;
  std::size_t modal_count = 0;
  for (const auto& [r, n] : histogram)
    if (n > modal_count) {
      modal = r;
      modal_count = n;
    }

  json j;
  j["weights"] = {{"alpha_energy", config.weights.alpha_energy},
                  {"beta_time", config.weights.beta_time}};
  j["normalization"] = "per-pair min-max over the reduction grid";
  j["modal_best_reduction_pct"] = modal * 100.0;
  j["modal_count"] = modal_count;
  j["n_pairs"] = spots.size();
  json per = json::array();
  for (const auto& s : spots)
    per.push_back({{"scheduler", to_string(s.scheduler)},
                   {"workflow", s.workflow},
                   {"best_reduction_pct", s.best_reduction * 100.0},
                   {"objective_value", s.objective_value},
                   {"tat_increase_pct", s.tat_increase_pct},
                   {"energy_saving_pct", s.energy_saving_pct}});
  j["per_pair"] = per;
  json tr = json::array();
  for (const auto& row : tradeoff)
    tr.push_back({{"reduction_pct", row.reduction * 100.0},
                  {"mean_tat_increase_pct", row.mean_tat_increase_pct},
                  {"mean_energy_saving_pct", row.mean_energy_saving_pct}});
  j["tradeoff"] = tr;
  detail::write_json(artifacts::sweet_spot(config), j);
}

// Steady-state and transient temperature comparison between the base
// operating point and the sweet-spot operating point, using the calibrated
// average node power as the heat input to the lumped model.
inline void cmd_report(const RunConfig& config) {
  CalibrationResult calib = load_calibration_artifact(config);
  json spot_json = detail::read_json_artifact(artifacts::sweet_spot(config));

  std::map<PairKey, double> best_reduction;
  for (const auto& s : spot_json.at("per_pair"))
    best_reduction[{scheduler_from_string(s.at("scheduler").get<std::string>()),
                    s.at("workflow").get<std::string>()}] =
        s.at("best_reduction_pct").get<double>() / 100.0;

  std::ostringstream csv;
  csv << "scheduler,workflow,scenario,t_seconds,temp_kelvin,q_removed_watts\n";
  double mean_drop_pct = 0.0;
  json per = json::array();
  double horizon_s = 10.0 * config.node.thermal_resistance_k_w * config.node.thermal_capacitance_j_k;
  for (const auto& [key, p] : calib.params) {
    ExecutionTrace base =
        simulate(workflow_by_id(key.second), key.first, FrequencyConfig{}, p, calib.seed);
    auto it = best_reduction.find(key);
    if (it == best_reduction.end())
      throw missing_artifact("sweet-spot report lacks pair " + detail::pair_label(key));
    ExecutionTrace tuned = apply_frequency_reduction(base, it->second, p);

    auto emit = [&](const char* scenario, double power_w) {
      std::vector<std::pair<double, double>> power_trace;
      constexpr int kSteps = 50;
      for (int s = 0; s <= kSteps; ++s)
        power_trace.emplace_back(horizon_s * s / kSteps, power_w);
      for (const auto& pt : thermal_profile(power_trace, config.node))
        csv << to_string(key.first) << ',' << key.second << ',' << scenario << ','
            << format2(pt.t_s) << ',' << format2(pt.temp_k) << ',' << format2(pt.q_removed_w)
            << '\n';
      return steady_state_lumped(config.node, power_w);
    };
    double temp_base = emit("base", base.avg_power_w);
    double temp_tuned = emit("sweet_spot", tuned.avg_power_w);
    double drop_pct = (temp_base - temp_tuned) / temp_base * 100.0;
    mean_drop_pct += drop_pct;
    per.push_back({{"scheduler", to_string(key.first)},
                   {"workflow", key.second},
                   {"reduction_pct", it->second * 100.0},
                   {"steady_temp_base_k", temp_base},
                   {"steady_temp_sweet_spot_k", temp_tuned},
                   {"temp_drop_pct", drop_pct}});
  }
  mean_drop_pct /= static_cast<double>(calib.params.size());
  detail::write_text(artifacts::temperature(config), csv.str());
  json j;
  j["mean_temp_drop_pct"] = mean_drop_pct;
  j["ambient_k"] = config.node.ambient_k;
  j["per_pair"] = per;
  detail::write_json(artifacts::thermal_summary(config), j);
}

// Maps library exceptions onto the documented process exit codes.
inline int run_command(const std::function<void()>& fn, std::ostream& err) {
  try {
    fn();
    return 0;
  } catch (const missing_artifact& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const training_divergence& e) {
    err << "error: " << e.what() << " (last finite loss " << e.last_finite_loss << ")\n";
    return 4;
  } catch (const generation_starvation& e) {
    err << "error: " << e.what() << " (" << e.accepted << " accepted of " << e.drawn
        << " drawn)\n";
    return 5;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace greenflow
