#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gekrig/errors.hpp"
#include "gekrig/harness.hpp"
#include "gekrig/plot.hpp"

using namespace gekrig;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.function = "y1:2";
  c.model = ModelKind::Kriging;
  c.n = 20;
  c.trials = 1;
  c.n_validation = 500;
  return c;
}

ExperimentRecord record(double re, double secs) {
  ExperimentRecord r;
  r.function = "y1:10";
  r.d = 10;
  r.model = "kriging";
  r.n = 100;
  r.re = re;
  r.fit_seconds = secs;
  r.nugget = 1e-10;
  r.cll = -12.5;
  return r;
}

std::vector<SummaryRow> fixed_summary() {
  return {
      {"y1:10", 10, "kriging", 0, 0, 20, 10, 0, 0.2976, 0.15},
      {"y1:10", 10, "kriging", 0, 0, 100, 10, 0, 0.0092, 18.57},
      {"y1:10", 10, "kpls", 3, 0, 20, 10, 0, 0.2563, 0.02},
      {"y1:10", 10, "kpls", 3, 0, 100, 10, 0, 0.1043, 0.07},
      {"y1:10", 10, "gekpls", 1, 2, 10, 10, 0, 0.1556, 0.03},
      {"y1:10", 10, "gekpls", 1, 2, 50, 10, 0, 0.0011, 0.10},
      {"p4", 8, "kriging", 0, 0, 16, 10, 0, 8.41, 0.1},
      {"p4", 8, "kriging", 0, 0, 80, 10, 1, 0.0037, 1.2},
  };
}

}  // namespace

TEST(Harness, SingleTrialOnSmallProblem) {
  const auto recs = run_experiment(small_config());
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_FALSE(recs[0].failed());
  EXPECT_LT(recs[0].re, 0.2);
  EXPECT_GT(recs[0].fit_seconds, 0.0);
  EXPECT_EQ(recs[0].seed, 0u);
  EXPECT_EQ(recs[0].n, 20u);
}

TEST(Harness, DeterministicApartFromTiming) {
  ExperimentConfig c = small_config();
  c.trials = 2;
  c.model = ModelKind::GeKpls;
  c.h = 1;
  c.m = 2;
  c.base_seed = 40;
  auto a = run_experiment(c), b = run_experiment(c);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].n, 10u);
    EXPECT_EQ(a[i].seed, 40u + i);
    a[i].fit_seconds = b[i].fit_seconds = 0.0;
    EXPECT_EQ(a[i], b[i]);
  }
}

TEST(Harness, GradientModelsNeedEvenN) {
  ExperimentConfig c = small_config();
  c.model = ModelKind::GekIndirect;
  c.n = 21;
  try {
    run_experiment(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Harness, FitFailuresAreRecorded) {
  ExperimentConfig c = small_config();
  c.function = "y1:20";
  c.model = ModelKind::GekIndirect;
  c.n = 400;  // 200 samples x 21 rows exceeds the row cap
  c.trials = 2;
  const auto recs = run_experiment(c);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_TRUE(recs[0].failed());
  const auto s = summarize(recs);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].failed, 2u);
  EXPECT_TRUE(std::isnan(s[0].mean_re));
}

TEST(Summary, Means) {
  EXPECT_EQ(summarize({record(0.1, 2.0)})[0].mean_re, 0.1);
  const auto rows = summarize({record(0.1, 1.0), record(0.3, 3.0), record(NAN, NAN)});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].mean_re, 0.2);
  EXPECT_DOUBLE_EQ(rows[0].mean_fit_seconds, 2.0);
  EXPECT_EQ(rows[0].trials, 3u);
  EXPECT_EQ(rows[0].failed, 1u);
}

TEST(Csv, RecordsRoundTrip) {
  std::vector<ExperimentRecord> recs{record(0.123456789012345678, 1.5e-3), record(NAN, NAN)};
  recs[1].model = "gekpls";
  recs[1].h = 1;
  recs[1].m = 3;
  recs[1].trial = 7;
  recs[1].seed = 18446744073709551615ULL;
  std::stringstream ss;
  write_records_csv(ss, recs);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "function,d,model,h,m,n,trial,seed,re,fit_seconds,nugget,cll,stage1_cll");
  EXPECT_EQ(read_records_csv(ss), recs);
}

TEST(Csv, SummaryRoundTrip) {
  const auto rows = fixed_summary();
  std::stringstream ss;
  write_summary_csv(ss, rows);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), kSummaryHeader);
  EXPECT_EQ(read_summary_csv(ss), rows);
}

TEST(Csv, RejectsWrongHeader) {
  std::stringstream ss("a,b\n1,2\n");
  EXPECT_THROW(read_records_csv(ss), Error);
}

TEST(Grid, ExpandsCells) {
  const std::string text = R"({"trials": 3, "n_validation": 100, "cells": [
    {"functions": ["y1:10"], "models": ["kriging", "kpls", "gekpls"], "n": [20, 100], "h": [1, 3], "m": [1, 2]}]})";
  const auto cfgs = parse_grid(text);
  // kriging x2, kpls x2 x2, gekpls x2 x2
  ASSERT_EQ(cfgs.size(), 10u);
  EXPECT_EQ(cfgs[0].trials, 3u);
  EXPECT_EQ(cfgs.back().model, ModelKind::GeKpls);
  EXPECT_EQ(cfgs.back().h, 1u);
  EXPECT_EQ(cfgs.back().m, 2u);
}

TEST(Grid, DeskScaleCaps) {
  const std::string text = R"({"cells": [
    {"functions": ["y1:100", "y1:20"], "models": ["kriging", "gekpls"], "n": [200, 1000], "m": [1]}]})";
  const auto cfgs = parse_grid(text, true);
  for (const auto& c : cfgs) {
    EXPECT_EQ(c.function, "y1:20");
    EXPECT_LE(c.n, kDeskMaxSamples);
  }
  EXPECT_EQ(cfgs.size(), 2u);
}

TEST(Grid, PresetsLoad) {
  for (const char* name : {"study1", "study2", "study3"}) {
    const auto path = std::filesystem::path(GEKRIG_TEST_DATA_DIR) / ".." / ".." / "presets" / (std::string(name) + ".json");
    const auto full = load_grid(path);
    const auto desk = load_grid(path, true);
    EXPECT_FALSE(full.empty()) << name;
    EXPECT_LE(desk.size(), full.size());
    for (const auto& c : desk) EXPECT_LE(c.n, kDeskMaxSamples);
  }
}

TEST(Sweep, OneRowPerStep) {
  ExperimentConfig c = small_config();
  c.model = ModelKind::GeKpls;
  c.h = 1;
  c.n = 10;
  c.n_validation = 100;
  c.starts = 2;
  const auto rows = sweep_step(c, {1e-4, 1e-2});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].fota_step, 1e-2);
  const double best = best_step(rows);
  EXPECT_TRUE(best == 1e-4 || best == 1e-2);
  EXPECT_EQ(best_step({{1e-3, 0.5, 1.0, 0}, {1e-2, 0.2, 1.0, 0}, {1e-1, 0.2, 1.0, 0}}), 1e-2);
}

TEST(Plot, EmptySummaryHasAxesOnly) {
  const std::string svg = render_tradeoff_svg({});
  EXPECT_NE(svg.find("<rect x="), std::string::npos);
  EXPECT_EQ(svg.find("<polyline"), std::string::npos);
}

TEST(Plot, OneSeriesOnePolyline) {
  const auto rows = fixed_summary();
  const std::string svg = render_tradeoff_svg({rows[0], rows[1]});
  std::size_t count = 0;
  for (auto p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++count;
  EXPECT_EQ(count, 1u);
}

TEST(Plot, MatchesGoldenFile) {
  const std::string svg = render_tradeoff_svg(fixed_summary());
  const auto path = std::filesystem::path(GEKRIG_TEST_DATA_DIR) / "tradeoff_golden.svg";
  if (std::getenv("GEKRIG_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << svg;
  }
  std::ifstream in(path, std::ios::binary);
  ASSERT_TRUE(in) << "missing " << path;
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(svg, buf.str());
  EXPECT_EQ(svg, render_tradeoff_svg(fixed_summary()));
}
