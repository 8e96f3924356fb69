#include <gtest/gtest.h>

#include <sstream>

#include "flagmf/io.hpp"

namespace flagmf {
namespace {

TEST(SequenceJson, FlagRoundTrip) {
  const Modulus m(31);
  const FlagSequence flag = flag_sequence(Line::finite(7, m), SplitTorus(3, 11, m), MultiplicativeCharacter(m, 4), 2);
  const io::json j = io::sequence_to_json({"flag", io::flag_params(flag), flag.values});
  const io::SequenceFile back = io::sequence_from_json(io::json::parse(io::dump(j)));
  EXPECT_EQ(back.kind, "flag");
  EXPECT_EQ(max_abs_diff(back.values, flag.values), 0.0);
  const FlagSequence again = io::flag_from_file(back);
  EXPECT_EQ(again.line, flag.line);
  EXPECT_EQ(again.torus, flag.torus);
  EXPECT_EQ(again.heis_index, 2);
  EXPECT_EQ(j.at("params").at("slope"), 7);
  EXPECT_EQ(io::sequence_to_json({"flag", io::flag_params(default_flag(Line::infinite(m))), flag.values})
                .at("params")
                .at("slope"),
            "inf");
}

TEST(SequenceJson, Rejections) {
  EXPECT_THROW(io::sequence_from_json(io::json::parse(R"({"n": 9, "kind": "x", "values": []})")), io::FormatError);
  EXPECT_THROW(io::sequence_from_json(io::json::parse(R"({"n": 5, "kind": "x", "values": [[1,0]]})")),
               io::FormatError);
  EXPECT_THROW(io::sequence_from_json(io::json::parse(R"({"n": 5, "kind": "x", "values": [1,2,3,4,5]})")),
               io::FormatError);

  const Modulus m(7);
  const FlagSequence flag = default_flag(Line::infinite(m));
  io::SequenceFile tampered{"flag", io::flag_params(flag), flag.values};
  tampered.values.at(0) += 0.1;
  EXPECT_THROW(io::flag_from_file(tampered), io::FormatError);
  EXPECT_THROW(io::flag_from_file({"weil", io::flag_params(flag), flag.values}), io::FormatError);
}

TEST(ScenarioJson, RoundTripAndSnr) {
  const Modulus m(101);
  const FlagSequence flag = default_flag(Line::infinite(m));
  const auto j = io::json::parse(R"({
    "kind": "multipath",
    "paths": [{"alpha": [0.5, 0.0], "tau": 50, "omega": 50}, {"alpha": [0.0, 0.5], "tau": 100, "omega": 100}],
    "noise": {"seed": 9, "snr_db": 20}
  })");
  const ScenarioConfig cfg = io::scenario_from_json(j, flag.values);
  EXPECT_EQ(cfg.kind, ScenarioKind::kMultipath);
  ASSERT_EQ(cfg.channel.sparsity(), 2U);
  EXPECT_EQ(cfg.noise.seed, 9U);
  EXPECT_NEAR(snr_report(flag.values, cfg), 20.0, 1e-12);
  const ScenarioConfig again = io::scenario_from_json(io::scenario_to_json(cfg), flag.values);
  EXPECT_EQ(again.noise.sigma, cfg.noise.sigma);
  EXPECT_EQ(again.channel.paths[1].shift, cfg.channel.paths[1].shift);

  EXPECT_THROW(io::scenario_from_json(io::json::parse(R"({"kind": "bogus", "paths": []})"), flag.values),
               io::FormatError);
  EXPECT_THROW(io::scenario_from_json(io::json::parse(R"({"kind": "gps-bit", "bit": 2,
      "paths": [{"alpha": [1, 0], "tau": 0, "omega": 0}]})"), flag.values),
               io::FormatError);
}

TEST(Csv, Headers) {
  const Modulus m(5);
  const Sequence d = Sequence::delta(m, 0);
  std::ostringstream full;
  io::write_mf_csv(full, mf_full(d, d));
  const std::string dense = full.str();
  EXPECT_EQ(dense.substr(0, dense.find('\n')), "tau,omega,re,im,abs");
  EXPECT_EQ(std::count(dense.begin(), dense.end(), '\n'), 26);
  std::ostringstream line;
  io::write_line_csv(line, mf_on_line(d, d, Line::infinite(m), TimeFreqShift(2, 0, m)));
  const std::string text = line.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,tau,omega,re,im,abs");
  EXPECT_NE(text.find("\n1,2,1,"), std::string::npos);
}

TEST(ReportJson, CarriesShiftsAndThresholds) {
  const Modulus m(101);
  const FlagSequence flag = default_flag(Line::infinite(m));
  const EstimationReport rep = estimate_channel(heisenberg_apply({50, 50, m}, flag.values), flag);
  const io::json j = io::report_to_json(rep);
  EXPECT_EQ(j.at("estimated").at("paths").at(0).at("tau"), 50);
  EXPECT_EQ(j.at("estimated").at("paths").at(0).at("omega"), 50);
  EXPECT_EQ(j.at("thresholds").at("theta_line"), 0.5);
  EXPECT_EQ(j.at("genericity_ok"), true);
  EXPECT_EQ(j.at("transversal_magnitudes").size(), 101U);
}

}  // namespace
}  // namespace flagmf
