#include "tecue/error.hpp"
#include "tecue/io.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace tecue;

namespace {

std::vector<double> noisy(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng) * 1e-3 + d(rng);
  return v;
}

}  // namespace

TEST(TeCsv, RoundTrip) {
  test::TempDir dir;
  TeTable t;
  t.direction = Direction::tgt2src;
  const auto raw = noisy(100, 1);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    t.t.push_back(0.1 * static_cast<double>(i) + 1.0 / 3.0);
    t.te_raw.push_back(raw[i]);
    t.te_filtered.push_back(raw[i] * std::numbers::pi);
    t.threshold.push_back(i == 0 ? std::numeric_limits<double>::quiet_NaN() : raw[i] / 7.0);
    t.cue.push_back(i % 3 == 0);
  }
  write_te_csv(t, dir / "te.csv");
  const auto back = read_te_csv(dir / "te.csv", Direction::tgt2src);
  ASSERT_EQ(back.size(), t.size());
  EXPECT_TRUE(std::isnan(back.threshold[0]));
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(back.t[i], t.t[i], 1e-12);
    EXPECT_EQ(back.te_raw[i], t.te_raw[i]);
    EXPECT_EQ(back.te_filtered[i], t.te_filtered[i]);
    if (i) EXPECT_EQ(back.threshold[i], t.threshold[i]);
    EXPECT_EQ(back.cue[i], t.cue[i]);
  }
}

TEST(EventsCsv, EmptyHasHeaderOnly) {
  test::TempDir dir;
  write_events_csv({}, dir / "e.csv");
  EXPECT_EQ(read_text_file(dir / "e.csv"), "trial,direction,start_t,end_t,peak_te\n");
  EXPECT_TRUE(read_events_csv(dir / "e.csv").empty());
}

TEST(EventsCsv, RoundTrip) {
  test::TempDir dir;
  std::vector<EventRecord> ev{{"a", {0.1, 0.30000000000000004, 1.0 / 3.0, Direction::src2tgt}},
                              {"b_2", {5.0, 7.25, -2e-17, Direction::tgt2src}}};
  write_events_csv(ev, dir / "e.csv");
  const auto back = read_events_csv(dir / "e.csv");
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].trial, ev[i].trial);
    EXPECT_EQ(back[i].event.direction, ev[i].event.direction);
    EXPECT_EQ(back[i].event.start_t, ev[i].event.start_t);
    EXPECT_EQ(back[i].event.end_t, ev[i].event.end_t);
    EXPECT_EQ(back[i].event.peak_te, ev[i].event.peak_te);
  }
}

TEST(EventsCsv, BadHeaderAndCells) {
  test::TempDir dir;
  write_text_file(dir / "bad.csv", "trial,dir\n");
  EXPECT_THROW(read_events_csv(dir / "bad.csv"), Error);
  write_text_file(dir / "bad2.csv", "trial,direction,start_t,end_t,peak_te\na,sideways,0,1,2\n");
  EXPECT_THROW(read_events_csv(dir / "bad2.csv"), Error);
}

TEST(GridCsv, SingleCell) {
  test::TempDir dir;
  CueGrid g;
  g.origin_x = -1.25;
  g.origin_y = 0.1;
  g.cell_size_m = 0.5;
  g.nx = 4;
  g.ny = 5;
  g.counts.assign(20, 0);
  g.counts[2 * 5 + 3] = 1;
  write_grid(g, dir / "g.csv");
  EXPECT_EQ(read_text_file(dir / "g.csv"), "ix,iy,count\n2,3,1\n");
  const auto back = read_grid(dir / "g.csv");
  EXPECT_EQ(back.counts, g.counts);
  EXPECT_EQ(back.origin_x, g.origin_x);
  EXPECT_EQ(back.origin_y, g.origin_y);
  EXPECT_EQ(back.cell_size_m, g.cell_size_m);
  EXPECT_EQ(back.nx, 4);
  EXPECT_EQ(back.ny, 5);
}

TEST(HistogramCsv, RoundTrip) {
  test::TempDir dir;
  CueHistogram h;
  h.bin_dt = 0.1;
  h.counts = {0, 3, 1, 0, 7};
  h.n_trials = 7;
  h.direction = Direction::tgt2src;
  write_histogram(h, dir / "h.csv");
  const auto back = read_histogram(dir / "h.csv");
  EXPECT_EQ(back.counts, h.counts);
  EXPECT_EQ(back.bin_dt, h.bin_dt);
  EXPECT_EQ(back.n_trials, h.n_trials);
  EXPECT_EQ(back.direction, h.direction);
}

TEST(PeaksAndReport, RoundTrip) {
  test::TempDir dir;
  std::vector<PeakRecord> p{{"t1", "welcome", Direction::src2tgt, 3.3, 0.123456789012345678}};
  write_peaks_csv(p, dir / "p.csv");
  const auto pb = read_peaks_csv(dir / "p.csv");
  ASSERT_EQ(pb.size(), 1u);
  EXPECT_EQ(pb[0].scenario, "welcome");
  EXPECT_EQ(pb[0].peak_te, p[0].peak_te);

  std::vector<PeakStudyRow> r{{Direction::src2tgt, 30, 30, -3.2, 0.0008}, {Direction::tgt2src, 30, 29, 0.1, 0.9246}};
  write_report_csv(r, dir / "r.csv");
  const auto rb = read_report_csv(dir / "r.csv");
  ASSERT_EQ(rb.size(), 2u);
  EXPECT_EQ(rb[1].n_b, 29u);
  EXPECT_EQ(rb[1].p_value, 0.9246);
}

TEST(TrialCsv, RoundTripThroughLoader) {
  test::TempDir dir;
  Eigen::MatrixXd d(40, 2);
  const auto v = noisy(80, 4);
  for (int i = 0; i < 40; ++i) d.row(i) << v[2 * i], v[2 * i + 1];
  const auto ts = test::make_series({"a", "b"}, d, 0.01, 2.0);
  write_trial_csv(ts, dir / "t.csv");
  const auto back = load_csv(dir / "t.csv");
  EXPECT_EQ(back.channels, ts.channels);
  EXPECT_EQ(back.data, ts.data);
  EXPECT_NEAR(back.dt, 0.01, 1e-12);
  for (Eigen::Index i = 0; i < ts.rows(); ++i) EXPECT_EQ(back.time(i), ts.time(i));
}

TEST(TrialsCsv, RoundTrip) {
  test::TempDir dir;
  std::vector<TrialInfo> t{{"a", "s1", 0.5, 20.05, 0.05}, {"b", "s2", 0.0, 1.0 / 3.0, 0.01}};
  write_trials_csv(t, dir / "trials.csv");
  const auto back = read_trials_csv(dir / "trials.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].duration_s, t[1].duration_s);
  EXPECT_EQ(back[0].origin_t, 0.5);
}

TEST(Io, UnwritablePathIsIoError) {
  try {
    write_text_file("/proc/definitely/not/here.csv", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Error::Kind::io);
  }
}
