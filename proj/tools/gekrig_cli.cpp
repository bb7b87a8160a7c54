#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gekrig/benchmarks.hpp"
#include "gekrig/doe.hpp"
#include "gekrig/errors.hpp"
#include "gekrig/harness.hpp"
#include "gekrig/models.hpp"
#include "gekrig/plot.hpp"
#include "gekrig/serialization.hpp"

using namespace gekrig;

namespace {

FormulaMode parse_mode(const std::string& s) {
  if (s == "as-printed") return FormulaMode::AsPrinted;
  if (s == "corrected") return FormulaMode::Corrected;
  fail(ErrorCode::InvalidArgument, "mode must be 'as-printed' or 'corrected'");
}

Matrix read_points_csv(const std::filesystem::path& path, Eigen::Index d) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    bool numeric = true;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(field, &used));
        if (used != field.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header
      }
      fail(ErrorCode::Io, "points file: bad line '" + line + "'");
    }
    first = false;
    if (static_cast<Eigen::Index>(row.size()) != d)
      fail(ErrorCode::Io, "points file: expected " + std::to_string(d) + " columns");
    rows.push_back(std::move(row));
  }
  Matrix X(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < d; ++j) X(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  return X;
}

std::filesystem::path preset_path(const std::string& name) {
  std::filesystem::path p(name);
  if (std::filesystem::exists(p)) return p;
  return std::filesystem::path(GEKRIG_PRESET_DIR) / (name + ".json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kriging, KPLS and gradient-enhanced surrogate models with a benchmark harness"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  // fit
  std::string fn_key = "y1:10", model_name = "kriging", mode_name = "as-printed", out_path = "model.json";
  std::size_t n = 20, h = 0, m = 1;
  double step = 1e-4;
  std::uint64_t seed = 0;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model on a maximin LHS plan of a benchmark function");
  fit_cmd->add_option("-f,--function", fn_key, "Function id, e.g. y1:10 or p4")->capture_default_str();
  fit_cmd->add_option("--model", model_name, "kriging|kpls|kplsk|gek_indirect|gek_direct|gekpls")
      ->capture_default_str();
  fit_cmd->add_option("-n,--n", n, "Number of training samples")->capture_default_str();
  fit_cmd->add_option("--h", h, "PLS components (default 3 for KPLS/KPLSK, 1 for GE-KPLS)");
  fit_cmd->add_option("--m", m, "GE-KPLS extra points per sample")->capture_default_str();
  fit_cmd->add_option("--step", step, "FOTA step as a fraction of each range")->capture_default_str();
  fit_cmd->add_option("--seed", seed, "Sampling and optimizer seed")->capture_default_str();
  fit_cmd->add_option("--mode", mode_name, "as-printed|corrected")->capture_default_str();
  fit_cmd->add_option("-o,--out", out_path, "Model JSON output")->capture_default_str();

  // predict
  std::string model_path, points_path, pred_out;
  bool with_variance = false;
  auto* pred_cmd = app.add_subcommand("predict", "Predict at points from a CSV file");
  pred_cmd->add_option("--model", model_path, "Model JSON")->required();
  pred_cmd->add_option("--points", points_path, "CSV with one point per row")->required();
  pred_cmd->add_option("-o,--out", pred_out, "Output CSV (stdout when omitted)");
  pred_cmd->add_flag("--variance", with_variance, "Also write the kriging variance");

  // bench
  std::string preset, records_path = "records.csv", summary_path = "summary.csv";
  bool desk = false;
  std::size_t trials_override = 0, nv_override = 0;
  auto* bench_cmd = app.add_subcommand("bench", "Run a study preset or grid config");
  bench_cmd->add_option("preset", preset, "Preset name (study1|study2|study3) or path to a grid JSON")->required();
  bench_cmd->add_flag("--desk-scale", desk, "Cap d <= 20 and n <= 200");
  bench_cmd->add_option("--records", records_path, "Per-trial CSV")->capture_default_str();
  bench_cmd->add_option("--summary", summary_path, "Summary CSV")->capture_default_str();
  bench_cmd->add_option("--trials", trials_override, "Override trials per cell");
  bench_cmd->add_option("--n-validation", nv_override, "Override validation points");

  // sweep-step
  std::size_t sweep_trials = 3;
  auto* sweep_cmd = app.add_subcommand("sweep-step", "Mean RE over the FOTA step grid 1e-6 ... 5e-2");
  sweep_cmd->add_option("-f,--function", fn_key)->capture_default_str();
  sweep_cmd->add_option("--model", model_name)->capture_default_str();
  sweep_cmd->add_option("-n,--n", n, "Value-model sample budget (gradient models use n/2)")->capture_default_str();
  sweep_cmd->add_option("--h", h, "PLS components (default 1)");
  sweep_cmd->add_option("--m", m)->capture_default_str();
  sweep_cmd->add_option("--trials", sweep_trials)->capture_default_str();
  sweep_cmd->add_option("--seed", seed)->capture_default_str();

  // plot
  std::string svg_path = "tradeoff.svg";
  auto* plot_cmd = app.add_subcommand("plot", "Render a summary CSV as a time-vs-RE SVG");
  plot_cmd->add_option("summary", summary_path, "Summary CSV")->required();
  plot_cmd->add_option("-o,--out", svg_path)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    configure_threads_from_env();

    if (*fit_cmd) {
      const BenchmarkFunction fn = function_from_string(fn_key, parse_mode(mode_name));
      const ModelKind kind = model_kind_from_string(model_name);
      const Matrix X = lhs(n, fn.bounds(), LhsCriterion::Maximin, seed).points;
      const Vector y = fn.evaluate(X);
      const TrainingData data = uses_gradients(kind) ? TrainingData(X, y, fn.gradients(X), fn.bounds())
                                                     : TrainingData(X, y, fn.bounds());
      FitOptions opts;
      opts.h = h ? h : opts.h;
      opts.gekpls = {h ? h : opts.gekpls.h, m, step};
      opts.fota_step = step;
      opts.search.seed = seed;
      const FittedSurrogate model = fit(kind, data, opts);
      save_model(model, out_path);
      std::cout << "model " << to_string(kind) << " on " << fn.name() << ": " << model.unit_points().rows()
                << " correlation points, cll " << model.meta().cll << ", nugget " << model.meta().nugget_used
                << ", fit " << model.meta().fit_seconds << " s\ntheta";
      for (Eigen::Index i = 0; i < model.theta().size(); ++i) std::cout << ' ' << model.theta()[i];
      std::cout << "\nwrote " << out_path << '\n';
    } else if (*pred_cmd) {
      const FittedSurrogate model = load_model(model_path);
      const Matrix X = read_points_csv(points_path, model.bounds().dim());
      const Vector yhat = model.predict(X);
      std::ofstream file;
      if (!pred_out.empty()) {
        file.open(pred_out);
        if (!file) fail(ErrorCode::Io, "cannot open '" + pred_out + "' for writing");
      }
      std::ostream& out = pred_out.empty() ? std::cout : file;
      out << std::setprecision(17) << (with_variance ? "prediction,variance\n" : "prediction\n");
      for (Eigen::Index i = 0; i < X.rows(); ++i) {
        out << yhat[i];
        if (with_variance) out << ',' << model.predict_variance(X.row(i).transpose());
        out << '\n';
      }
    } else if (*bench_cmd) {
      auto configs = load_grid(preset_path(preset), desk);
      for (auto& c : configs) {
        if (trials_override) c.trials = trials_override;
        if (nv_override) c.n_validation = nv_override;
      }
      std::cerr << "running " << configs.size() << " configurations\n";
      const auto records = run_experiments(configs);
      const auto summary = summarize(records);
      std::ofstream rec(records_path), sum(summary_path);
      if (!rec || !sum) fail(ErrorCode::Io, "cannot open output CSV files");
      write_records_csv(rec, records);
      write_summary_csv(sum, summary);
      for (const auto& row : summary)
        if (row.failed == row.trials)
          std::cerr << "warning: every trial failed for " << row.function << ' ' << row.model << " n=" << row.n
                    << '\n';
      write_summary_csv(std::cout, summary);
    } else if (*sweep_cmd) {
      ExperimentConfig cfg;
      cfg.function = fn_key;
      cfg.model = model_kind_from_string(model_name);
      cfg.n = n;
      cfg.h = h ? h : 1;
      cfg.m = m;
      cfg.trials = sweep_trials;
      cfg.base_seed = seed;
      const auto rows = sweep_step(cfg);
      std::cout << "fota_step,mean_re,mean_fit_seconds,failed\n";
      for (const auto& r : rows)
        std::cout << r.fota_step << ',' << r.mean_re << ',' << r.mean_fit_seconds << ',' << r.failed << '\n';
      std::cout << "best step " << best_step(rows) << '\n';
    } else if (*plot_cmd) {
      std::ifstream in(summary_path);
      if (!in) fail(ErrorCode::Io, "cannot open '" + summary_path + "'");
      emit_plot(read_summary_csv(in), svg_path);
      std::cout << "wrote " << svg_path << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
