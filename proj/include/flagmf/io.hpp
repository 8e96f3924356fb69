#pragma once

// File formats: sequence / scenario / report JSON and matched-filter CSV dumps.
//
// Sequence file:  {"n": N, "kind": "...", "params": {...}, "values": [[re, im], ...]}
// Scenario file:  {"kind": "single-shift" | "multipath" | "gps-bit",
//                  "paths": [{"alpha": [re, im], "tau": t, "omega": w}, ...],
//                  "bit": +1 | -1,                       (gps-bit only)
//                  "noise": {"seed": s, "sigma": x}      (or "snr_db" instead of "sigma")
//                  "allow_energy_overflow": false}

#include <fstream>
#include <iomanip>
#include <ios>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "flagmf/channel_sim.hpp"
#include "flagmf/estimator.hpp"
#include "flagmf/matched_filter.hpp"
#include "flagmf/sequences.hpp"

namespace flagmf::io {

using json = nlohmann::json;

/// Malformed or inconsistent file content.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw FormatError("complex value must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json line_to_json(const Line& line) {
  return line.is_infinite() ? json("inf") : json(line.slope());
}

inline Line line_from_json(const json& j, const Modulus& m) {
  if (j.is_string() && j.get<std::string>() == "inf") return Line::infinite(m);
  if (j.is_number_integer()) return Line::finite(j.get<std::int64_t>(), m);
  throw FormatError("slope must be an integer or \"inf\"");
}

struct SequenceFile {
  std::string kind;
  json params = json::object();
  Sequence values;
};

inline json sequence_to_json(const SequenceFile& file) {
  json values = json::array();
  for (const auto& v : file.values.values()) values.push_back(complex_to_json(v));
  return {{"n", file.values.n()}, {"kind", file.kind}, {"params", file.params}, {"values", std::move(values)}};
}

inline SequenceFile sequence_from_json(const json& j) {
  try {
    const Modulus m(j.at("n").get<std::int64_t>());
    const auto& arr = j.at("values");
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(m.n())) {
      throw FormatError("\"values\" must hold exactly n entries");
    }
    std::vector<Complex> values;
    values.reserve(arr.size());
    for (const auto& v : arr) values.push_back(complex_from_json(v));
    return {j.at("kind").get<std::string>(), j.value("params", json::object()), Sequence(m, std::move(values))};
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad sequence file: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("bad sequence file: ") + e.what());
  }
}

inline json flag_params(const FlagSequence& flag) {
  return {{"slope", line_to_json(flag.line)},
          {"heis_index", flag.heis_index},
          {"torus_b", flag.torus.b().value()},
          {"torus_c", flag.torus.c().value()},
          {"zeta_index", flag.chi.zeta_index()},
          {"primitive_root", flag.chi.generator().value()}};
}

/// Rebuilds flag metadata from a "flag" sequence file and checks the stored
/// values against the regenerated sequence.
inline FlagSequence flag_from_file(const SequenceFile& file) {
  if (file.kind != "flag") throw FormatError("expected a sequence file of kind \"flag\", got \"" + file.kind + "\"");
  const auto& m = file.values.modulus();
  try {
    const auto& p = file.params;
    FlagSequence flag = flag_sequence(line_from_json(p.at("slope"), m),
                                      SplitTorus(p.at("torus_b").get<std::int64_t>(), p.at("torus_c").get<std::int64_t>(), m),
                                      MultiplicativeCharacter(m, p.at("zeta_index").get<std::int64_t>()),
                                      p.at("heis_index").get<std::int64_t>());
    if (max_abs_diff(flag.values, file.values) > 1e-9) {
      throw FormatError("flag values do not match their parameters");
    }
    flag.values = file.values;
    return flag;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad flag parameters: ") + e.what());
  }
}

inline std::string scenario_kind_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kSingleShift: return "single-shift";
    case ScenarioKind::kMultipath: return "multipath";
    case ScenarioKind::kGpsBit: return "gps-bit";
  }
  return "unknown";
}

inline json scenario_to_json(const ScenarioConfig& config) {
  json paths = json::array();
  for (const auto& p : config.channel.paths) {
    paths.push_back({{"alpha", complex_to_json(p.alpha)}, {"tau", p.shift.tau.value()}, {"omega", p.shift.omega.value()}});
  }
  json j = {{"kind", scenario_kind_name(config.kind)},
            {"paths", std::move(paths)},
            {"noise", {{"seed", config.noise.seed}, {"sigma", config.noise.sigma}}},
            {"allow_energy_overflow", config.allow_energy_overflow}};
  if (config.kind == ScenarioKind::kGpsBit) j["bit"] = config.bit;
  return j;
}

/// Parses a scenario for sequences over Z_N. A "snr_db" noise entry is
/// resolved to sigma against the given sequence.
inline ScenarioConfig scenario_from_json(const json& j, const Sequence& s) {
  const auto& m = s.modulus();
  ScenarioConfig config;
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "single-shift") {
      config.kind = ScenarioKind::kSingleShift;
    } else if (kind == "multipath") {
      config.kind = ScenarioKind::kMultipath;
    } else if (kind == "gps-bit") {
      config.kind = ScenarioKind::kGpsBit;
      config.bit = j.at("bit").get<int>();
    } else {
      throw FormatError("unknown scenario kind \"" + kind + "\"");
    }
    for (const auto& p : j.at("paths")) {
      config.channel.paths.push_back(
          {complex_from_json(p.at("alpha")), TimeFreqShift(p.at("tau").get<std::int64_t>(), p.at("omega").get<std::int64_t>(), m)});
    }
    config.allow_energy_overflow = j.value("allow_energy_overflow", false);
    const json noise = j.value("noise", json::object());
    config.noise.seed = noise.value("seed", std::uint64_t{0});
    if (noise.contains("snr_db")) {
      config.noise.sigma = sigma_for_snr(s, config.channel, noise.at("snr_db").get<double>());
    } else {
      config.noise.sigma = noise.value("sigma", 0.0);
    }
    config.validate();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad scenario: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("bad scenario: ") + e.what());
  }
  return config;
}

inline json shift_to_json(const TimeFreqShift& v) { return {{"tau", v.tau.value()}, {"omega", v.omega.value()}}; }

inline json channel_to_json(const ChannelParams& params) {
  json paths = json::array();
  for (const auto& p : params.paths) {
    paths.push_back({{"alpha", complex_to_json(p.alpha)}, {"tau", p.shift.tau.value()}, {"omega", p.shift.omega.value()}});
  }
  return {{"sparsity", params.sparsity()}, {"paths", std::move(paths)}};
}

inline json report_to_json(const EstimationReport& report) {
  json trans = json::array();
  for (const auto& p : report.transversal_peaks) trans.push_back({{"t", p.t}, {"magnitude", p.magnitude}});
  json lines = json::array();
  for (const auto& p : report.per_line_peaks) {
    lines.push_back({{"offset", shift_to_json(p.offset)}, {"t", p.t}, {"magnitude", p.magnitude}});
  }
  return {{"estimated", channel_to_json(report.estimated)},
          {"flag_line", line_to_json(report.flag_line)},
          {"transversal_line", line_to_json(report.transversal)},
          {"transversal_peaks", std::move(trans)},
          {"per_line_peaks", std::move(lines)},
          {"transversal_magnitudes", report.transversal_magnitudes},
          {"line_magnitudes", report.line_magnitudes},
          {"residual_maxima", report.residual_maxima},
          {"thresholds",
           {{"theta_line", report.theta_line},
            {"genericity", report.genericity_threshold},
            {"max_paths", report.max_paths}}},
          {"genericity_ok", report.genericity_ok}};
}

/// Round-trippable double formatting for CSV.
inline std::string fmt_double(double x) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return os.str();
}

inline void write_mf_csv(std::ostream& os, const MFMatrix& mf) {
  os << "tau,omega,re,im,abs\n";
  const std::int64_t n = mf.modulus().n();
  for (std::int64_t tau = 0; tau < n; ++tau) {
    for (std::int64_t omega = 0; omega < n; ++omega) {
      const Complex z = mf.at(tau, omega);
      os << tau << ',' << omega << ',' << fmt_double(z.real()) << ',' << fmt_double(z.imag()) << ','
         << fmt_double(std::abs(z)) << '\n';
    }
  }
}

inline void write_line_csv(std::ostream& os, const LineRestriction& line) {
  os << "t,tau,omega,re,im,abs\n";
  for (std::size_t t = 0; t < line.samples.size(); ++t) {
    const TimeFreqShift v = line.point(static_cast<std::int64_t>(t));
    const Complex z = line.samples[t];
    os << t << ',' << v.tau.value() << ',' << v.omega.value() << ',' << fmt_double(z.real()) << ','
       << fmt_double(z.imag()) << ',' << fmt_double(std::abs(z)) << '\n';
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("cannot parse " + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

/// Serialization used for every JSON artifact; full double precision, stable key order.
inline std::string dump(const json& j) { return j.dump(1) + "\n"; }

}  // namespace flagmf::io
