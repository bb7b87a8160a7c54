#include "gekrig/serialization.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "gekrig/errors.hpp"

namespace gekrig {

namespace {

using nlohmann::json;

json vec_to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json mat_to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) rows.push_back(vec_to_json(M.row(i).transpose()));
  return rows;
}

Vector vec_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix mat_from_json(const json& j, Eigen::Index cols) {
  Matrix M(static_cast<Eigen::Index>(j.size()), cols);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    const Vector row = vec_from_json(j.at(static_cast<std::size_t>(i)));
    require(row.size() == cols, "model file: ragged matrix");
    M.row(i) = row.transpose();
  }
  return M;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double from_nullable(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

KernelKind kernel_kind_from_string(const std::string& s) {
  for (KernelKind k : {KernelKind::SqExp, KernelKind::KplsSqExp, KernelKind::GeKplsSqExp})
    if (s == to_string(k)) return k;
  fail(ErrorCode::InvalidArgument, "model file: unknown kernel '" + s + "'");
}

const char* convention_name(DerivativeConvention c) {
  return c == DerivativeConvention::Analytic ? "analytic" : "strict_paper_blocks";
}

DerivativeConvention convention_from_string(const std::string& s) {
  if (s == "analytic") return DerivativeConvention::Analytic;
  if (s == "strict_paper_blocks") return DerivativeConvention::StrictPaperBlocks;
  fail(ErrorCode::InvalidArgument, "model file: unknown derivative convention '" + s + "'");
}

}  // namespace

std::string model_to_json(const FittedSurrogate& model) {
  const KernelSpec& k = model.kernel();
  const FitMeta& m = model.meta();
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["kind"] = to_string(model.kind());
  doc["kernel"] = {{"kind", to_string(k.kind)},
                   {"theta", vec_to_json(k.theta)},
                   {"coefficients", mat_to_json(k.coefficients)},
                   {"coefficient_cols", k.coefficients.cols()},
                   {"nugget", k.nugget}};
  doc["convention"] = convention_name(model.convention());
  doc["bounds"] = {{"lower", vec_to_json(model.bounds().lower())}, {"upper", vec_to_json(model.bounds().upper())}};
  doc["unit_points"] = mat_to_json(model.unit_points());
  doc["responses"] = vec_to_json(model.responses());
  doc["meta"] = {{"h", m.h},
                 {"m", m.m},
                 {"fota_step", m.fota_step},
                 {"nugget_used", m.nugget_used},
                 {"fit_seconds", m.fit_seconds},
                 {"cll", nullable(m.cll)},
                 {"stage1_cll", nullable(m.stage1_cll)},
                 {"evals", m.evals}};
  return doc.dump(1);
}

FittedSurrogate model_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    const int version = doc.at("format_version").get<int>();
    require(version == kModelFormatVersion, "model file: unsupported format version " + std::to_string(version));
    const ModelKind kind = model_kind_from_string(doc.at("kind").get<std::string>());

    const json& jk = doc.at("kernel");
    KernelSpec spec;
    spec.kind = kernel_kind_from_string(jk.at("kind").get<std::string>());
    spec.theta = vec_from_json(jk.at("theta"));
    spec.coefficients = mat_from_json(jk.at("coefficients"), jk.at("coefficient_cols").get<Eigen::Index>());
    spec.nugget = jk.at("nugget").get<double>();

    const Bounds bounds(vec_from_json(doc.at("bounds").at("lower")), vec_from_json(doc.at("bounds").at("upper")));
    const Matrix points = mat_from_json(doc.at("unit_points"), bounds.dim());
    const Vector responses = vec_from_json(doc.at("responses"));

    const json& jm = doc.at("meta");
    FitMeta meta;
    meta.h = jm.at("h").get<std::size_t>();
    meta.m = jm.at("m").get<std::size_t>();
    meta.fota_step = jm.at("fota_step").get<double>();
    meta.fit_seconds = jm.at("fit_seconds").get<double>();
    meta.cll = from_nullable(jm.at("cll"));
    meta.stage1_cll = from_nullable(jm.at("stage1_cll"));
    meta.evals = jm.at("evals").get<std::size_t>();

    return FittedSurrogate::assemble(kind, std::move(spec), bounds, points, responses,
                                     convention_from_string(doc.at("convention").get<std::string>()), meta);
  } catch (const json::exception& e) {
    fail(ErrorCode::Io, std::string("model file: malformed JSON: ") + e.what());
  }
}

void save_model(const FittedSurrogate& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << model_to_json(model) << '\n';
  if (!out) fail(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

FittedSurrogate load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace gekrig
