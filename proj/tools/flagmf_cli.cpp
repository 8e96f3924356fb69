// flagmf: sequence generation, channel simulation, estimation, matched-filter
// dumps and scaling benchmarks.
//
// Exit codes: 0 success, 1 failed self-test or internal error, 2 usage or
// validation error, 3 detection failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flagmf/bench.hpp"
#include "flagmf/flagmf.hpp"
#include "flagmf/io.hpp"

namespace {

using namespace flagmf;
using io::json;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDetection = 3;
constexpr std::int64_t kFullMatrixLimit = 512;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wall time per named phase.
class PhaseClock {
 public:
  template <typename F>
  auto run(const std::string& phase, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    struct Stop {
      PhaseClock* self;
      std::string phase;
      std::chrono::steady_clock::time_point start;
      ~Stop() {
        self->times_[phase] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    } stop{this, phase, start};
    return f();
  }
  json to_json() const { return times_; }

 private:
  std::map<std::string, double> times_;
};

struct Options {
  // global
  std::optional<std::int64_t> n;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool force = false;
  bool quiet = false;
  std::string replay;

  // genseq
  std::string kind = "flag";
  std::string slope = "inf";
  std::int64_t heis_index = 0;
  std::optional<std::int64_t> torus_b;
  std::optional<std::int64_t> torus_c;
  std::int64_t zeta_index = 1;

  // simulate / estimate / mf
  std::string seq_path;
  std::string config_path;
  std::string rx_path;
  std::string flag_path;
  std::optional<std::size_t> max_paths;
  std::optional<std::size_t> known_paths;
  double theta_line = 0.5;
  std::string mode = "line";
  std::int64_t offset_tau = 0;
  std::int64_t offset_omega = 0;

  // bench
  std::vector<std::int64_t> sizes{1009, 4001, 16001, 64007};
  std::string method = "flag";
  int batches = 5;
  double min_batch_seconds = 0.02;
};

struct Context {
  Options opt;
  std::vector<std::string> argv;
  PhaseClock clock;
  json parameters = json::object();
  std::vector<std::string> outputs;

  void info(const std::string& msg) const {
    if (!opt.quiet) std::cerr << msg << '\n';
  }
  void warn(const std::string& msg) const {
    if (!opt.quiet) std::cerr << "warning: " << msg << '\n';
  }

  /// Writes to --out (and records it) or to stdout.
  void emit(const std::string& text) {
    if (opt.out.empty()) {
      std::cout << text;
      return;
    }
    clock.run("write", [&] { io::write_text_file(opt.out, text); });
    outputs.push_back(opt.out);
  }

  void write_manifest(const std::string& command) {
    if (outputs.empty()) return;
    json manifest = {{"command", command},
                     {"argv", argv},
                     {"parameters", parameters},
                     {"version", FLAGMF_VERSION},
                     {"wall_times", clock.to_json()},
                     {"outputs", outputs}};
    io::write_text_file(opt.out + ".manifest.json", io::dump(manifest));
  }
};

Modulus require_modulus(const Context& ctx) {
  if (!ctx.opt.n) throw UsageError("--n is required");
  return Modulus(*ctx.opt.n);
}

Line parse_slope(const std::string& text, const Modulus& m) {
  if (text == "inf") return Line::infinite(m);
  std::size_t used = 0;
  std::int64_t c = 0;
  try {
    c = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError("--slope must be an integer or \"inf\", got \"" + text + "\"");
  return Line::finite(c, m);
}

io::SequenceFile load_sequence(const std::string& path, const char* flag_name) {
  if (path.empty()) throw UsageError(std::string(flag_name) + " is required");
  return io::sequence_from_json(io::read_json_file(path));
}

void check_n(const Context& ctx, const Modulus& m, const std::string& what) {
  if (ctx.opt.n && *ctx.opt.n != m.n()) {
    throw UsageError("--n " + std::to_string(*ctx.opt.n) + " does not match " + what + " (n = " + std::to_string(m.n()) + ")");
  }
}

MultiplicativeCharacter character_for(Context& ctx, const Modulus& m) {
  MultiplicativeCharacter chi(m, ctx.opt.zeta_index);
  if (chi.is_trivial()) {
    ctx.warn("zeta index 0 is the trivial character; its ambiguity surface carries a ridge of height (N-2)/(N-1) "
             "along the delay axis rather than a single spike");
  }
  return chi;
}

int cmd_genseq(Context& ctx) {
  const auto& o = ctx.opt;
  const Modulus m = require_modulus(ctx);
  const Line line = parse_slope(o.slope, m);
  io::SequenceFile file{o.kind, json::object(), Sequence(m)};
  ctx.clock.run("generate", [&] {
    if (o.kind == "heisenberg") {
      file.values = heisenberg_basis_sequence(line, o.heis_index);
      file.params = {{"slope", io::line_to_json(line)}, {"heis_index", m.reduce(o.heis_index)}};
    } else if (o.kind == "weil" || o.kind == "flag") {
      const SplitTorus torus = (o.torus_b || o.torus_c) ? SplitTorus(o.torus_b.value_or(0), o.torus_c.value_or(0), m)
                               : o.kind == "flag"      ? default_torus(line)
                                                       : SplitTorus::diagonal(m);
      const MultiplicativeCharacter chi = character_for(ctx, m);
      if (o.kind == "weil") {
        file.values = weil_sequence(torus, chi);
        file.params = {{"torus_b", torus.b().value()},
                       {"torus_c", torus.c().value()},
                       {"zeta_index", chi.zeta_index()},
                       {"primitive_root", chi.generator().value()}};
      } else {
        const FlagSequence flag = flag_sequence(line, torus, chi, o.heis_index);
        file.values = flag.values;
        file.params = io::flag_params(flag);
      }
    } else {
      throw UsageError("--kind must be heisenberg, weil or flag");
    }
  });
  ctx.parameters = {{"n", m.n()}, {"kind", o.kind}, {"params", file.params}};
  ctx.emit(io::dump(io::sequence_to_json(file)));
  ctx.info("genseq: " + o.kind + " sequence, n = " + std::to_string(m.n()));
  return 0;
}

int cmd_simulate(Context& ctx) {
  const auto& o = ctx.opt;
  const auto [seq, config_json] = ctx.clock.run("load", [&] {
    if (o.config_path.empty()) throw UsageError("--config is required");
    return std::make_pair(load_sequence(o.seq_path, "--seq"), io::read_json_file(o.config_path));
  });
  check_n(ctx, seq.values.modulus(), o.seq_path);
  ScenarioConfig config = io::scenario_from_json(config_json, seq.values);
  if (o.seed) config.noise.seed = *o.seed;

  const Sequence r = ctx.clock.run("synthesize", [&] { return synthesize(seq.values, config); });
  const double snr = snr_report(seq.values, config);
  const json snr_json = std::isfinite(snr) ? json(snr) : json("inf");
  const json scenario = io::scenario_to_json(config);
  io::SequenceFile out{"received", {{"scenario", scenario}, {"snr_db", snr_json}, {"source", {{"kind", seq.kind}, {"params", seq.params}}}}, r};
  ctx.parameters = {{"n", r.n()}, {"seq", o.seq_path}, {"config", o.config_path}, {"scenario", scenario}};
  ctx.emit(io::dump(io::sequence_to_json(out)));
  ctx.info("simulate: " + std::to_string(config.channel.sparsity()) + " path(s), SNR " +
           (std::isfinite(snr) ? std::to_string(snr) + " dB" : std::string("inf")));
  return 0;
}

int cmd_estimate(Context& ctx) {
  const auto& o = ctx.opt;
  const auto [rx, flag_file] = ctx.clock.run("load", [&] {
    return std::make_pair(load_sequence(o.rx_path, "--rx"), load_sequence(o.flag_path, "--flag"));
  });
  if (!(rx.values.modulus() == flag_file.values.modulus())) {
    throw UsageError("received sequence has n = " + std::to_string(rx.values.n()) + " but the flag has n = " +
                     std::to_string(flag_file.values.n()));
  }
  check_n(ctx, rx.values.modulus(), o.rx_path);
  const FlagSequence flag = io::flag_from_file(flag_file);

  EstimatorOptions est;
  est.theta_line = o.theta_line;
  est.max_paths = o.max_paths;
  est.known_paths = o.known_paths;
  ctx.parameters = {{"n", rx.values.n()},
                    {"rx", o.rx_path},
                    {"flag", o.flag_path},
                    {"theta_line", est.theta_line},
                    {"max_paths", est.resolved_max_paths(rx.values.modulus())},
                    {"known_paths", o.known_paths ? json(*o.known_paths) : json(nullptr)}};

  const EstimationReport report = ctx.clock.run("estimate", [&] { return estimate_channel(rx.values, flag, est); });
  ctx.emit(io::dump(io::report_to_json(report)));
  for (std::size_t k = 0; k < report.estimated.paths.size(); ++k) {
    const auto& p = report.estimated.paths[k];
    std::ostringstream line;
    line << "path " << k << ": tau=" << p.shift.tau.value() << " omega=" << p.shift.omega.value() << " alpha=("
         << p.alpha.real() << ", " << p.alpha.imag() << ")";
    ctx.info(line.str());
  }
  if (!report.genericity_ok) ctx.warn("residual above the single-path model: shifts may share a shifted line");
  return 0;
}

int cmd_mf(Context& ctx) {
  const auto& o = ctx.opt;
  const io::SequenceFile seq = ctx.clock.run("load", [&] { return load_sequence(o.seq_path, "--seq"); });
  const io::SequenceFile rx = o.rx_path.empty() ? seq : ctx.clock.run("load", [&] { return load_sequence(o.rx_path, "--rx"); });
  require_same(rx.values.modulus(), seq.values.modulus());
  const Modulus& m = seq.values.modulus();
  check_n(ctx, m, o.seq_path);
  ctx.parameters = {{"n", m.n()}, {"mode", o.mode}, {"seq", o.seq_path}, {"rx", o.rx_path.empty() ? o.seq_path : o.rx_path}};

  std::ostringstream csv;
  if (o.mode == "full") {
    if (m.n() > kFullMatrixLimit && !o.force) {
      throw UsageError("full matrix at n = " + std::to_string(m.n()) + " costs O(N^3); use --force above n = " +
                       std::to_string(kFullMatrixLimit));
    }
    const MFMatrix mf = ctx.clock.run("compute", [&] { return mf_full(rx.values, seq.values); });
    io::write_mf_csv(csv, mf);
  } else if (o.mode == "line") {
    const Line line = parse_slope(o.slope, m);
    const TimeFreqShift offset(o.offset_tau, o.offset_omega, m);
    ctx.parameters["slope"] = io::line_to_json(line);
    ctx.parameters["offset"] = io::shift_to_json(offset);
    const LineRestriction lr = ctx.clock.run("compute", [&] { return mf_on_line(rx.values, seq.values, line, offset); });
    io::write_line_csv(csv, lr);
  } else {
    throw UsageError("--mode must be full or line");
  }
  ctx.emit(csv.str());
  return 0;
}

int cmd_bench(Context& ctx) {
  const auto& o = ctx.opt;
  bench::Method method;
  if (o.method == "flag") {
    method = bench::Method::kFlag;
  } else if (o.method == "full") {
    method = bench::Method::kFull;
  } else {
    throw UsageError("--method must be flag or full");
  }
  for (auto n : o.sizes) {
    static_cast<void>(Modulus{n});
    if (method == bench::Method::kFull && n > kFullMatrixLimit && !o.force) {
      throw UsageError("full-matrix bench at n = " + std::to_string(n) + " needs --force");
    }
  }
  const bench::Options bo{.batches = o.batches, .min_batch_seconds = o.min_batch_seconds};
  std::vector<double> seconds;
  for (auto n : o.sizes) {
    seconds.push_back(ctx.clock.run("n=" + std::to_string(n), [&] { return bench::time_detection(n, method, bo); }));
    ctx.info("bench: " + o.method + " n = " + std::to_string(n) + ": " + io::fmt_double(seconds.back()) + " s");
  }
  const double exponent = bench::fit_exponent(o.sizes, seconds);
  std::ostringstream csv;
  csv << "n,method,seconds,exponent\n";
  for (std::size_t i = 0; i < o.sizes.size(); ++i) {
    csv << o.sizes[i] << ',' << o.method << ',' << io::fmt_double(seconds[i]) << ','
        << (std::isnan(exponent) ? std::string("nan") : io::fmt_double(exponent)) << '\n';
  }
  ctx.parameters = {{"sizes", o.sizes}, {"method", o.method}, {"batches", o.batches}, {"min_batch_seconds", o.min_batch_seconds}};
  ctx.emit(csv.str());
  return 0;
}

int cmd_selftest(Context& ctx) {
  std::mt19937_64 rng(ctx.opt.seed.value_or(1));
  std::normal_distribution<double> gauss;
  auto random_sequence = [&](const Modulus& m) {
    Sequence s(m);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = {gauss(rng), gauss(rng)};
    return s;
  };
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    if (!ok) ++failures;
    if (!ctx.opt.quiet || !ok) std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
  };

  {
    const Modulus m(17);
    const Sequence r = random_sequence(m);
    const Sequence s = random_sequence(m);
    const MFMatrix full = mf_full(r, s);
    double worst = 0.0;
    for (const auto& line : enumerate_lines(m)) {
      const auto lr = mf_on_line(r, s, line, TimeFreqShift(3, 5, m));
      for (std::int64_t t = 0; t < m.n(); ++t) {
        worst = std::max(worst, std::abs(lr.samples[static_cast<std::size_t>(t)] - full.at(lr.point(t))));
      }
    }
    check("line restriction matches full matrix (n=17)", worst < 1e-9);
  }
  {
    const Modulus m(17);
    bool ok = true;
    for (const auto& line : enumerate_lines(m)) {
      const FlagSequence flag = default_flag(line);
      for (std::int64_t t = 0; t < m.n(); ++t)
        for (std::int64_t w = 0; w < m.n(); ++w) {
          const TimeFreqShift v(t, w, m);
          ok = ok && flag_detect_single(heisenberg_apply(v, flag.values), flag).shift == v;
        }
    }
    check("noiseless detection, all shifts and lines (n=17)", ok);
  }
  {
    const Modulus m(7);
    std::uniform_int_distribution<std::int64_t> coord(0, 6);
    auto random_element = [&] {
      while (true) {
        const std::int64_t a = coord(rng), b = coord(rng), c = coord(rng);
        if (a == 0) continue;
        return GroupElement(a, b, c, m.mul(m.mul(b, c) + 1, inverse_mod(a, m)), m);
      }
    };
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const GroupElement g = random_element(), h = random_element();
      const Sequence f = random_sequence(m);
      const Sequence lhs = weil_apply(g * h, f);
      const Sequence rhs = weil_apply(g, weil_apply(h, f));
      worst = std::max(worst, max_abs_diff(lhs, rhs));
    }
    check("Weil representation is a homomorphism (n=7)", worst < 1e-9);
  }
  check("split torus census (n=11)", enumerate_split_tori(Modulus(11)).size() == 66);
  {
    const Modulus m(101);
    const Sequence phi = weil_sequence(SplitTorus::diagonal(m), default_character(m));
    double floor = 0.0;
    for (const auto& line : enumerate_lines(m)) {
      const auto lr = mf_on_line(phi, phi, line);
      for (std::size_t t = 1; t < lr.samples.size(); ++t) floor = std::max(floor, std::abs(lr.samples[t]));
    }
    check("Weil spike floor below 2/sqrt(N) (n=101)", floor <= 2.0 / std::sqrt(101.0));
  }
  check("noise is reproducible", complex_noise({42, 0.5}, 64) == complex_noise({42, 0.5}, 64));

  if (!ctx.opt.quiet) std::cout << (failures == 0 ? "selftest: all checks passed" : "selftest: failures") << '\n';
  return failures == 0 ? 0 : kExitFailure;
}

int run(const std::vector<std::string>& args);

int run_parsed(CLI::App& app, Context& ctx) {
  if (!ctx.opt.replay.empty()) {
    const json manifest = io::read_json_file(ctx.opt.replay);
    if (!manifest.contains("argv") || !manifest.at("argv").is_array()) {
      throw io::FormatError("manifest " + ctx.opt.replay + " has no argv");
    }
    return run(manifest.at("argv").get<std::vector<std::string>>());
  }
  for (const auto* sub : app.get_subcommands()) {
    const std::string name = sub->get_name();
    int code = 0;
    if (name == "genseq") code = cmd_genseq(ctx);
    if (name == "simulate") code = cmd_simulate(ctx);
    if (name == "estimate") code = cmd_estimate(ctx);
    if (name == "mf") code = cmd_mf(ctx);
    if (name == "bench") code = cmd_bench(ctx);
    if (name == "selftest") code = cmd_selftest(ctx);
    ctx.write_manifest(name);
    return code;
  }
  throw UsageError("no subcommand given; see --help");
}

int run(const std::vector<std::string>& args) {
  Context ctx;
  ctx.argv = args;
  auto& o = ctx.opt;

  CLI::App app{"Flag-method matched filtering: sequences, channels, estimation, benchmarks"};
  app.set_version_flag("--version", FLAGMF_VERSION);
  app.fallthrough();
  app.add_option("--n", o.n, "Sequence length (an odd prime >= 5)");
  app.add_option("--seed", o.seed, "Seed for every random draw");
  app.add_option("--out", o.out, "Output file (stdout when omitted); a manifest is written next to it");
  app.add_flag("--force", o.force, "Lift size guards");
  app.add_flag("--quiet", o.quiet, "Suppress informational messages");
  app.add_option("--replay", o.replay, "Re-run the command recorded in a manifest");

  auto* genseq = app.add_subcommand("genseq", "Generate a Heisenberg, Weil or flag sequence");
  genseq->add_option("--kind", o.kind, "heisenberg | weil | flag")->capture_default_str();
  genseq->add_option("--slope", o.slope, "Line slope: integer c for L_c, or inf")->capture_default_str();
  genseq->add_option("--heis-index", o.heis_index, "Heisenberg basis index")->capture_default_str();
  genseq->add_option("--torus-b", o.torus_b, "Torus parameter b");
  genseq->add_option("--torus-c", o.torus_c, "Torus parameter c");
  genseq->add_option("--zeta-index", o.zeta_index, "Multiplicative character index")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Pass a sequence through a channel scenario");
  simulate->add_option("--seq", o.seq_path, "Transmitted sequence file")->required();
  simulate->add_option("--config", o.config_path, "Scenario JSON")->required();

  auto* estimate = app.add_subcommand("estimate", "Estimate channel parameters with the flag method");
  estimate->add_option("--rx", o.rx_path, "Received sequence file")->required();
  estimate->add_option("--flag", o.flag_path, "Flag sequence file")->required();
  estimate->add_option("--max-paths", o.max_paths, "Largest accepted sparsity (default floor(sqrt(N)))");
  estimate->add_option("--paths", o.known_paths, "Known sparsity: take exactly this many shifted lines");
  estimate->add_option("--theta-line", o.theta_line, "Transversal detection threshold")->capture_default_str();

  auto* mf = app.add_subcommand("mf", "Dump the matched filter as CSV");
  mf->add_option("--mode", o.mode, "full | line")->capture_default_str();
  mf->add_option("--seq", o.seq_path, "Reference sequence S")->required();
  mf->add_option("--rx", o.rx_path, "Received sequence R (defaults to S)");
  mf->add_option("--slope", o.slope, "Line slope for line mode")->capture_default_str();
  mf->add_option("--offset-tau", o.offset_tau, "Line offset, delay")->capture_default_str();
  mf->add_option("--offset-omega", o.offset_omega, "Line offset, Doppler")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Time single-shift detection across sizes");
  bench->add_option("--sizes", o.sizes, "Comma-separated primes")->delimiter(',')->capture_default_str();
  bench->add_option("--method", o.method, "flag | full")->capture_default_str();
  bench->add_option("--batches", o.batches, "Timed batches per size (median reported)")->capture_default_str();
  bench->add_option("--min-batch-seconds", o.min_batch_seconds, "Minimum batch duration")->capture_default_str();

  app.add_subcommand("selftest", "Run quick internal consistency checks");
  app.require_subcommand(0, 1);

  std::vector<std::string> full{"flagmf"};
  full.insert(full.end(), args.begin(), args.end());
  std::vector<char*> cargs;
  for (auto& a : full) cargs.push_back(a.data());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return run_parsed(app, ctx);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const DetectionError& e) {
    std::cerr << "detection failed: " << e.what() << '\n';
    return kExitDetection;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ModulusMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const io::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitFailure;
  }
}
