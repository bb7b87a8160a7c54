#include "gekrig/harness.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include <omp.h>

#include "json.hpp"

#include "gekrig/doe.hpp"
#include "gekrig/errors.hpp"

namespace gekrig {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool reports_h(ModelKind k) { return k == ModelKind::Kpls || k == ModelKind::Kplsk || k == ModelKind::GeKpls; }

}  // namespace

void ExperimentConfig::validate() const {
  require(trials >= 1, "experiment: trials must be at least 1");
  require(n_validation >= 1, "experiment: n_validation must be at least 1");
  require(h >= 1, "experiment: h must be at least 1");
  require(m >= 1, "experiment: m must be at least 1");
  require(fota_step > 0.0 && fota_step < 0.1, "experiment: fota step must lie in (0, 0.1)");
  if (uses_gradients(model)) require(n % 2 == 0, "experiment: gradient models need an even n");
  require(training_samples() >= 2, "experiment: too few training samples");
  const auto d = static_cast<std::size_t>(function_from_string(function, mode).dim());
  if (reports_h(model)) require(h <= d, "experiment: h exceeds the input dimension");
  if (model == ModelKind::GeKpls) require(m <= d, "experiment: m exceeds the input dimension");
}

std::size_t ExperimentConfig::training_samples() const { return uses_gradients(model) ? n / 2 : n; }

FitOptions ExperimentConfig::fit_options(std::uint64_t seed) const {
  FitOptions o;
  o.h = h;
  o.gekpls.h = h;
  o.gekpls.m = m;
  o.gekpls.fota_step = fota_step;
  o.fota_step = fota_step;
  o.search.seed = seed;
  if (starts > 0) o.search.starts = starts;
  if (budget_per_start > 0) o.search.budget_per_start = budget_per_start;
  return o;
}

bool ExperimentRecord::failed() const { return std::isnan(re); }

bool ExperimentRecord::operator==(const ExperimentRecord& o) const {
  return function == o.function && d == o.d && model == o.model && h == o.h && m == o.m && n == o.n &&
         trial == o.trial && seed == o.seed && same_double(re, o.re) && same_double(fit_seconds, o.fit_seconds) &&
         same_double(nugget, o.nugget) && same_double(cll, o.cll) && same_double(stage1_cll, o.stage1_cll);
}

bool SummaryRow::operator==(const SummaryRow& o) const {
  return function == o.function && d == o.d && model == o.model && h == o.h && m == o.m && n == o.n &&
         trials == o.trials && failed == o.failed && same_double(mean_re, o.mean_re) &&
         same_double(mean_fit_seconds, o.mean_fit_seconds);
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t trial) { return cfg.base_seed + trial; }

std::uint64_t validation_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

ExperimentRecord run_trial(const ExperimentConfig& cfg, std::size_t trial) {
  cfg.validate();
  const BenchmarkFunction fn = function_from_string(cfg.function, cfg.mode);
  const std::uint64_t seed = trial_seed(cfg, trial);

  ExperimentRecord rec;
  rec.function = fn.name();
  rec.d = fn.dim();
  rec.model = to_string(cfg.model);
  rec.h = reports_h(cfg.model) ? cfg.h : 0;
  rec.m = cfg.model == ModelKind::GeKpls ? cfg.m : 0;
  rec.n = cfg.training_samples();
  rec.trial = trial;
  rec.seed = seed;

  const Matrix X = lhs(rec.n, fn.bounds(), LhsCriterion::Maximin, seed).points;
  const Vector y = fn.evaluate(X);
  TrainingData data = uses_gradients(cfg.model) ? TrainingData(X, y, fn.gradients(X), fn.bounds())
                                                : TrainingData(X, y, fn.bounds());
  const Matrix Xv = lhs(cfg.n_validation, fn.bounds(), LhsCriterion::Random, validation_seed(seed)).points;
  const Vector yv = fn.evaluate(Xv);

  try {
    const FittedSurrogate model = fit(cfg.model, data, cfg.fit_options(seed));
    rec.re = relative_error(yv, model.predict_serial(Xv));
    rec.fit_seconds = model.meta().fit_seconds;
    rec.nugget = model.meta().nugget_used;
    rec.cll = model.meta().cll;
    rec.stage1_cll = model.meta().stage1_cll;
  } catch (const Error&) {
    rec.re = kNaN;
    rec.fit_seconds = kNaN;
    rec.nugget = kNaN;
  }
  return rec;
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) { return run_experiments({cfg}); }

std::vector<ExperimentRecord> run_experiments(const std::vector<ExperimentConfig>& configs) {
  std::vector<std::pair<std::size_t, std::size_t>> work;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    configs[c].validate();
    for (std::size_t t = 0; t < configs[c].trials; ++t) work.emplace_back(c, t);
  }
  std::vector<ExperimentRecord> out(work.size());
  std::exception_ptr error;
  const auto count = static_cast<std::ptrdiff_t>(work.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      const auto [c, t] = work[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(i)] = run_trial(configs[c], t);
    } catch (...) {
#pragma omp critical(gekrig_harness_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records) {
  using Key = std::tuple<std::string, Eigen::Index, std::string, std::size_t, std::size_t, std::size_t>;
  std::map<Key, std::size_t> index;
  std::vector<SummaryRow> rows;
  std::vector<double> re_sum, time_sum;
  for (const auto& r : records) {
    const Key key{r.function, r.d, r.model, r.h, r.m, r.n};
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, rows.size()).first;
      rows.push_back(SummaryRow{r.function, r.d, r.model, r.h, r.m, r.n, 0, 0, 0.0, 0.0});
      re_sum.push_back(0.0);
      time_sum.push_back(0.0);
    }
    SummaryRow& row = rows[it->second];
    ++row.trials;
    if (r.failed()) {
      ++row.failed;
    } else {
      re_sum[it->second] += r.re;
      time_sum[it->second] += r.fit_seconds;
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t ok = rows[i].trials - rows[i].failed;
    rows[i].mean_re = ok ? re_sum[i] / static_cast<double>(ok) : kNaN;
    rows[i].mean_fit_seconds = ok ? time_sum[i] / static_cast<double>(ok) : kNaN;
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan" || s == "-nan") return kNaN;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail(ErrorCode::Io, "csv: bad number '" + s + "'");
  return v;
}

template <typename T>
T parse_uint(const std::string& s) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail(ErrorCode::Io, "csv: bad integer '" + s + "'");
  return v;
}

template <typename Row, typename Parse>
std::vector<Row> read_csv(std::istream& in, const char* header, std::size_t columns, Parse parse) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Io, "csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) fail(ErrorCode::Io, "csv: unexpected header '" + line + "'");
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != columns) fail(ErrorCode::Io, "csv: wrong field count in '" + line + "'");
    rows.push_back(parse(f));
  }
  return rows;
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << kRecordsHeader << '\n';
  for (const auto& r : records)
    out << r.function << ',' << r.d << ',' << r.model << ',' << r.h << ',' << r.m << ',' << r.n << ',' << r.trial
        << ',' << r.seed << ',' << fmt(r.re) << ',' << fmt(r.fit_seconds) << ',' << fmt(r.nugget) << ','
        << fmt(r.cll) << ',' << fmt(r.stage1_cll) << '\n';
}

std::vector<ExperimentRecord> read_records_csv(std::istream& in) {
  return read_csv<ExperimentRecord>(in, kRecordsHeader, 13, [](const std::vector<std::string>& f) {
    ExperimentRecord r;
    r.function = f[0];
    r.d = parse_uint<Eigen::Index>(f[1]);
    r.model = f[2];
    r.h = parse_uint<std::size_t>(f[3]);
    r.m = parse_uint<std::size_t>(f[4]);
    r.n = parse_uint<std::size_t>(f[5]);
    r.trial = parse_uint<std::size_t>(f[6]);
    r.seed = parse_uint<std::uint64_t>(f[7]);
    r.re = parse_double(f[8]);
    r.fit_seconds = parse_double(f[9]);
    r.nugget = parse_double(f[10]);
    r.cll = parse_double(f[11]);
    r.stage1_cll = parse_double(f[12]);
    return r;
  });
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows)
    out << r.function << ',' << r.d << ',' << r.model << ',' << r.h << ',' << r.m << ',' << r.n << ',' << r.trials
        << ',' << r.failed << ',' << fmt(r.mean_re) << ',' << fmt(r.mean_fit_seconds) << '\n';
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  return read_csv<SummaryRow>(in, kSummaryHeader, 10, [](const std::vector<std::string>& f) {
    SummaryRow r;
    r.function = f[0];
    r.d = parse_uint<Eigen::Index>(f[1]);
    r.model = f[2];
    r.h = parse_uint<std::size_t>(f[3]);
    r.m = parse_uint<std::size_t>(f[4]);
    r.n = parse_uint<std::size_t>(f[5]);
    r.trials = parse_uint<std::size_t>(f[6]);
    r.failed = parse_uint<std::size_t>(f[7]);
    r.mean_re = parse_double(f[8]);
    r.mean_fit_seconds = parse_double(f[9]);
    return r;
  });
}

// ---------------------------------------------------------------------------
// Grids

namespace {

std::string desk_function(const std::string& key) {
  const auto colon = key.find(':');
  if (colon == std::string::npos) return key;
  const long d = std::stol(key.substr(colon + 1));
  if (d <= kDeskMaxDim) return key;
  return key.substr(0, colon) + ":" + std::to_string(kDeskMaxDim);
}

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.function == b.function && a.model == b.model && a.n == b.n && a.h == b.h && a.m == b.m &&
         a.fota_step == b.fota_step && a.trials == b.trials;
}

}  // namespace

std::vector<ExperimentConfig> parse_grid(const std::string& json_text, bool desk_scale) {
  using nlohmann::json;
  std::vector<ExperimentConfig> out;
  try {
    const json doc = json::parse(json_text);
    ExperimentConfig base;
    base.trials = doc.value("trials", base.trials);
    base.n_validation = doc.value("n_validation", base.n_validation);
    base.base_seed = doc.value("base_seed", base.base_seed);
    base.starts = doc.value("starts", base.starts);
    base.budget_per_start = doc.value("budget_per_start", base.budget_per_start);
    if (doc.value("mode", std::string("as_printed")) == "corrected") base.mode = FormulaMode::Corrected;
    const std::size_t gekpls_h = doc.value("gekpls_h", std::size_t{1});

    for (const json& cell : doc.at("cells")) {
      const auto functions = cell.at("functions").get<std::vector<std::string>>();
      const auto models = cell.at("models").get<std::vector<std::string>>();
      const auto ns = cell.at("n").get<std::vector<std::size_t>>();
      const auto hs = cell.value("h", std::vector<std::size_t>{3});
      const auto ms = cell.value("m", std::vector<std::size_t>{1});
      const double step = cell.value("fota_step", 1e-4);
      for (const auto& fname : functions) {
        const std::string f = desk_scale ? desk_function(fname) : fname;
        const Eigen::Index d = function_from_string(f, base.mode).dim();
        for (const auto& mname : models) {
          const ModelKind kind = model_kind_from_string(mname);
          for (std::size_t n : ns) {
            if (desk_scale) n = std::min(n, kDeskMaxSamples);
            auto push = [&](std::size_t h, std::size_t m) {
              ExperimentConfig c = base;
              c.function = f;
              c.model = kind;
              c.n = n;
              c.h = std::min<std::size_t>(h, static_cast<std::size_t>(d));
              c.m = std::min<std::size_t>(m, static_cast<std::size_t>(d));
              c.fota_step = step;
              for (const auto& prev : out)
                if (same_config(prev, c)) return;
              c.validate();
              out.push_back(c);
            };
            if (kind == ModelKind::Kpls || kind == ModelKind::Kplsk) {
              for (auto h : hs) push(h, 1);
            } else if (kind == ModelKind::GeKpls) {
              for (auto m : ms) push(gekpls_h, m);
              if (cell.value("m_equals_d", false)) push(gekpls_h, static_cast<std::size_t>(d));
            } else {
              push(ExperimentConfig{}.h, 1);
            }
          }
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Io, std::string("grid: malformed JSON: ") + e.what());
  }
  return out;
}

std::vector<ExperimentConfig> load_grid(const std::filesystem::path& path, bool desk_scale) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open grid '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grid(buf.str(), desk_scale);
}

// ---------------------------------------------------------------------------
// Step sweep

std::vector<StepSweepRow> sweep_step(const ExperimentConfig& cfg, const std::vector<double>& steps) {
  require(!steps.empty(), "sweep: no steps given");
  std::vector<ExperimentConfig> configs;
  for (double s : steps) {
    ExperimentConfig c = cfg;
    c.fota_step = s;
    configs.push_back(c);
  }
  const auto records = run_experiments(configs);
  std::vector<StepSweepRow> rows;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const std::vector<ExperimentRecord> part(records.begin() + static_cast<std::ptrdiff_t>(k * cfg.trials),
                                             records.begin() + static_cast<std::ptrdiff_t>((k + 1) * cfg.trials));
    const SummaryRow s = summarize(part).front();
    rows.push_back({steps[k], s.mean_re, s.mean_fit_seconds, s.failed});
  }
  return rows;
}

double best_step(const std::vector<StepSweepRow>& rows) {
  const StepSweepRow* best = nullptr;
  for (const auto& r : rows)
    if (!std::isnan(r.mean_re) && (!best || r.mean_re < best->mean_re)) best = &r;
  if (!best) fail(ErrorCode::OptimizationFailed, "sweep: every step failed");
  return best->fota_step;
}

void configure_threads_from_env() {
  const char* v = std::getenv("GEKRIG_THREADS");
  if (!v || !*v) return;
  int n = 0;
  const auto res = std::from_chars(v, v + std::char_traits<char>::length(v), n);
  if (res.ec != std::errc() || n < 1) fail(ErrorCode::InvalidArgument, "GEKRIG_THREADS must be a positive integer");
  omp_set_num_threads(n);
}

}  // namespace gekrig
