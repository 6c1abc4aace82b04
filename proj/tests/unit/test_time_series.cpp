#include "tecue/error.hpp"
#include "tecue/time_series.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

using namespace tecue;

namespace {

std::vector<std::string> names(std::initializer_list<const char*> l) { return {l.begin(), l.end()}; }

}  // namespace

TEST(LoadCsv, ParsesUniformSeries) {
  const auto ts = parse_csv("t,x\n0,1\n0.5,2\n1,3\n");
  EXPECT_DOUBLE_EQ(ts.dt, 0.5);
  ASSERT_EQ(ts.rows(), 3);
  EXPECT_EQ(ts.channels, names({"x"}));
  EXPECT_EQ(ts.data(0, 0), 1.0);
  EXPECT_EQ(ts.data(1, 0), 2.0);
  EXPECT_EQ(ts.data(2, 0), 3.0);
}

TEST(LoadCsv, NonMonotoneTimeReportsRow) {
  try {
    parse_csv("t,x\n0,1\n0,2\n1,3\n");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Error::Kind::data);
    ASSERT_TRUE(e.row().has_value());
    EXPECT_EQ(*e.row(), 2u);
  }
}

TEST(LoadCsv, NonNumericCellReportsRow) {
  try {
    parse_csv("t,x\n0,1\n1,abc\n");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Error::Kind::data);
    ASSERT_TRUE(e.row().has_value());
    EXPECT_EQ(*e.row(), 2u);
  }
}

TEST(LoadCsv, MissingChannelAndFile) {
  const std::vector<std::string> schema{"x", "y"};
  EXPECT_THROW(parse_csv("t,x\n0,1\n1,2\n", schema), Error);
  EXPECT_THROW(load_csv("/nonexistent/file.csv"), Error);
}

TEST(LoadCsv, NonFiniteRejected) {
  EXPECT_THROW(parse_csv("t,x\n0,1\n1,nan\n"), Error);
  EXPECT_THROW(parse_csv("t,x\n0,1\n1,inf\n"), Error);
}

TEST(LoadCsv, JitteredTimesUseMedianStep) {
  const auto ts = parse_csv("t,x\n0,0\n0.1,1\n0.21,2\n0.3,3\n0.4,4\n");
  EXPECT_NEAR(ts.dt, 0.1, 1e-12);
  ASSERT_EQ(ts.raw_times.size(), 5u);
  EXPECT_DOUBLE_EQ(ts.raw_times[2], 0.21);
}

TEST(Resample, LinearInterpolation) {
  auto ts = parse_csv("t,v\n0,0\n1,2\n");
  const auto r = resample(ts, 2.0);
  ASSERT_EQ(r.rows(), 3);
  EXPECT_DOUBLE_EQ(r.dt, 0.5);
  EXPECT_NEAR(r.data(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(r.data(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(r.data(2, 0), 2.0, 1e-15);
  EXPECT_NEAR(r.time(1), 0.5, 1e-15);
}

TEST(Resample, IdempotentOnUniformGrid) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  Eigen::MatrixXd d(50, 2);
  for (int i = 0; i < 50; ++i) {
    d(i, 0) = n(rng);
    d(i, 1) = n(rng);
  }
  const auto ts = test::make_series({"a", "b"}, d, 0.01, 3.0);
  const auto once = resample(ts, 100.0);
  const auto twice = resample(once, 100.0);
  ASSERT_EQ(once.rows(), ts.rows());
  EXPECT_LE((once.data - ts.data).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((twice.data - once.data).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Resample, SingleSampleIsError) {
  EXPECT_THROW(resample(parse_csv("t,v\n0,1\n"), 10.0), Error);
}

TEST(Magnitude, ClosedForms) {
  Eigen::MatrixXd d(3, 3);
  d << 3, 4, 0, 0, 0, 0, 1, 1, 1;
  const auto ts = test::make_series({"a", "b", "c"}, d);
  const std::vector<std::string> ch{"a", "b", "c"};
  const auto m = magnitude(ts, ch);
  EXPECT_DOUBLE_EQ(m.data(0, 0), 5.0);
  EXPECT_DOUBLE_EQ(m.data(1, 0), 0.0);
  EXPECT_NEAR(m.data(2, 0), 1.7320508, 1e-7);
  const std::vector<std::string> bad{"a", "b", "z"};
  EXPECT_THROW(magnitude(ts, bad), Error);
}

TEST(ProjectNormalize, Examples) {
  Eigen::MatrixXd d(3, 3);
  d << 0, 0, 7, 3, 4, 12, 0, 2, 5;
  const auto ts = test::make_series({"x", "y", "z"}, d);
  const std::vector<std::string> ch{"x", "y", "z"};
  const auto p = project_normalize_xy(ts, ch);
  ASSERT_EQ(p.data.cols(), 2);
  EXPECT_DOUBLE_EQ(p.data(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(p.data(0, 1), 0.0);
  EXPECT_NEAR(p.data(1, 0), 0.6, 1e-15);
  EXPECT_NEAR(p.data(1, 1), 0.8, 1e-15);
  EXPECT_DOUBLE_EQ(p.data(2, 0), 0.0);
  EXPECT_DOUBLE_EQ(p.data(2, 1), 1.0);
}

TEST(ProjectNormalize, DegenerateRowsCarryDirection) {
  Eigen::MatrixXd d(3, 3);
  d << 0, -2, 1, 0, 0, 3, 1e-12, 0, 0;
  const auto p = project_normalize_xy(test::make_series({"x", "y", "z"}, d), std::vector<std::string>{"x", "y", "z"});
  EXPECT_DOUBLE_EQ(p.data(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(p.data(1, 1), -1.0);
  EXPECT_DOUBLE_EQ(p.data(2, 1), -1.0);
}

TEST(ProjectNormalize, UnitNormProperty) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  Eigen::MatrixXd d(200, 3);
  for (int i = 0; i < 200; ++i) d.row(i) << n(rng), n(rng), n(rng);
  const auto p = project_normalize_xy(test::make_series({"x", "y", "z"}, d), std::vector<std::string>{"x", "y", "z"});
  for (int i = 0; i < 200; ++i) EXPECT_NEAR(p.data.row(i).norm(), 1.0, 1e-9);
  const auto m = magnitude(test::make_series({"x", "y", "z"}, d), std::vector<std::string>{"x", "y", "z"});
  EXPECT_GE(m.data.minCoeff(), 0.0);
}

TEST(TrialDir, ManifestOrderAndStart) {
  test::TempDir dir;
  std::ofstream(dir / "b.csv") << "t,x\n0,1\n1,2\n2,3\n";
  std::ofstream(dir / "a.csv") << "t,x\n0,1\n1,2\n2,3\n";
  std::ofstream(dir / "manifest.csv") << "trial,scenario,start_t\nb,welcome,1\na,ignore,\n";
  const auto set = load_trial_dir(dir.path());
  ASSERT_EQ(set.trials.size(), 2u);
  EXPECT_EQ(set.trials[0].id, "b");
  EXPECT_EQ(set.trials[0].scenario, "welcome");
  ASSERT_TRUE(set.trials[0].start_t.has_value());
  EXPECT_DOUBLE_EQ(*set.trials[0].start_t, 1.0);
  EXPECT_FALSE(set.trials[1].start_t.has_value());
  EXPECT_EQ(set.scenarios(), names({"welcome", "ignore"}));
}

TEST(TrialDir, SchemaMismatchIsError) {
  test::TempDir dir;
  std::ofstream(dir / "a.csv") << "t,x\n0,1\n1,2\n";
  std::ofstream(dir / "b.csv") << "t,y\n0,1\n1,2\n";
  EXPECT_THROW(load_trial_dir(dir.path()), Error);
}
