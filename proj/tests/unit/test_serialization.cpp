#include <gtest/gtest.h>

#include <filesystem>

#include "gekrig/benchmarks.hpp"
#include "gekrig/doe.hpp"
#include "gekrig/errors.hpp"
#include "gekrig/serialization.hpp"

using namespace gekrig;

namespace gekrig {
// Readable parameter values in test names.
inline void PrintTo(ModelKind kind, std::ostream* os) { *os << to_string(kind); }
}  // namespace gekrig

class RoundTrip : public ::testing::TestWithParam<ModelKind> {};

TEST_P(RoundTrip, PredictionsAreBitIdentical) {
  const BenchmarkFunction fn = make_function(FunctionId::Y2, 3);
  const Matrix X = lhs(10, fn.bounds(), LhsCriterion::Maximin, 2).points;
  const TrainingData data(X, fn.evaluate(X), fn.gradients(X), fn.bounds());
  FitOptions o;
  o.h = 2;
  o.search.starts = 2;
  const FittedSurrogate model = fit(GetParam(), data, o);

  const auto path = std::filesystem::temp_directory_path() / ("gekrig_roundtrip_" + std::string(to_string(GetParam())) + ".json");
  save_model(model, path);
  const FittedSurrogate back = load_model(path);
  std::filesystem::remove(path);

  EXPECT_EQ(back.kind(), model.kind());
  EXPECT_EQ(back.theta(), model.theta());
  EXPECT_EQ(back.kernel().coefficients, model.kernel().coefficients);
  EXPECT_EQ(back.meta().h, model.meta().h);
  EXPECT_EQ(back.meta().nugget_used, model.meta().nugget_used);
  const Matrix Xv = lhs(50, fn.bounds(), LhsCriterion::Random, 8).points;
  const Vector a = model.predict_serial(Xv), b = back.predict_serial(Xv);
  for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  EXPECT_EQ(model_to_json(back), model_to_json(model));
}

INSTANTIATE_TEST_SUITE_P(AllKinds, RoundTrip,
                         ::testing::Values(ModelKind::Kriging, ModelKind::Kpls, ModelKind::Kplsk,
                                           ModelKind::GekIndirect, ModelKind::GekDirect, ModelKind::GeKpls),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Serialization, RejectsBadDocuments) {
  auto code = [](const std::string& text) {
    try {
      model_from_json(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  EXPECT_EQ(code("{not json"), ErrorCode::Io);
  EXPECT_EQ(code("{\"format_version\": 99}"), ErrorCode::InvalidArgument);
  EXPECT_EQ(code("{\"format_version\": 1}"), ErrorCode::Io);
  try {
    load_model("/nonexistent/dir/model.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}
