#include "tecue/io.hpp"

#include "csv_util.hpp"
#include "tecue/error.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace tecue {

namespace fs = std::filesystem;
using detail::format_double;

namespace {

struct CsvRows {
  std::string source;
  std::vector<std::vector<std::string>> rows;
};

CsvRows read_csv(const fs::path& path, const std::string& header) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!detail::next_line(in, line) || line != header) {
    throw_data(path.string() + ": expected header '" + header + "'");
  }
  const std::size_t width = detail::split_csv(header).size();
  CsvRows out{path.string(), {}};
  std::size_t row = 0;
  while (detail::next_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto cells = detail::split_csv(line);
    if (cells.size() != width) {
      throw_data(out.source + ": expected " + std::to_string(width) + " cells", row);
    }
    out.rows.push_back(std::move(cells));
  }
  return out;
}

double cell_double(const CsvRows& csv, std::size_t row, const std::string& cell) {
  auto v = detail::parse_double(cell);
  if (!v) throw_data(csv.source + ": non-numeric cell '" + cell + "'", row + 1);
  return *v;
}

std::int64_t cell_int(const CsvRows& csv, std::size_t row, const std::string& cell) {
  const double v = cell_double(csv, row, cell);
  if (v != std::floor(v)) throw_data(csv.source + ": expected an integer, got '" + cell + "'", row + 1);
  return static_cast<std::int64_t>(v);
}

Direction cell_direction(const CsvRows& csv, std::size_t row, const std::string& cell) {
  if (cell == "src2tgt") return Direction::src2tgt;
  if (cell == "tgt2src") return Direction::tgt2src;
  throw_data(csv.source + ": unknown direction '" + cell + "'", row + 1);
}

fs::path meta_path(const fs::path& path) { return fs::path(path.string() + ".meta"); }

std::map<std::string, std::string> read_meta(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t row = 0;
  while (detail::next_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw_data(path.string() + ": expected key=value", row);
    kv[std::string(detail::trim(std::string_view(line).substr(0, eq)))] =
        std::string(detail::trim(std::string_view(line).substr(eq + 1)));
  }
  return kv;
}

const std::string& meta_get(const std::map<std::string, std::string>& kv, const fs::path& path,
                            const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw_data(path.string() + ": missing key '" + key + "'");
  return it->second;
}

double meta_double(const std::map<std::string, std::string>& kv, const fs::path& path,
                   const std::string& key) {
  const auto& s = meta_get(kv, path, key);
  auto v = detail::parse_double(s);
  if (!v) throw_data(path.string() + ": non-numeric value for '" + key + "'");
  return *v;
}

}  // namespace

void write_text_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw_io("write to '" + path.string() + "' failed");
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TeTable te_table(const DetectionTrace& trace) {
  TeTable t;
  t.direction = trace.raw.direction;
  t.t = trace.raw.t;
  t.te_raw = trace.raw.te_raw;
  t.te_filtered = trace.filtered;
  t.threshold = trace.des.threshold;
  t.cue = trace.cue;
  return t;
}

void write_te_csv(const TeTable& table, const fs::path& path) {
  const std::size_t n = table.size();
  if (table.te_raw.size() != n || table.te_filtered.size() != n || table.threshold.size() != n ||
      table.cue.size() != n) {
    throw_data("TE table columns differ in length");
  }
  std::string s = "t,te_raw,te_filtered,threshold,cue\n";
  for (std::size_t i = 0; i < n; ++i) {
    s += format_double(table.t[i]) + ',' + format_double(table.te_raw[i]) + ',' +
         format_double(table.te_filtered[i]) + ',' + format_double(table.threshold[i]) + ',' +
         (table.cue[i] ? '1' : '0') + '\n';
  }
  write_text_file(path, s);
}

TeTable read_te_csv(const fs::path& path, Direction direction) {
  const auto csv = read_csv(path, "t,te_raw,te_filtered,threshold,cue");
  TeTable t;
  t.direction = direction;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& c = csv.rows[r];
    t.t.push_back(cell_double(csv, r, c[0]));
    t.te_raw.push_back(cell_double(csv, r, c[1]));
    t.te_filtered.push_back(cell_double(csv, r, c[2]));
    t.threshold.push_back(cell_double(csv, r, c[3]));
    if (c[4] != "0" && c[4] != "1") throw_data(csv.source + ": cue must be 0 or 1", r + 1);
    t.cue.push_back(c[4] == "1");
  }
  return t;
}

void write_events_csv(const std::vector<EventRecord>& events, const fs::path& path) {
  std::string s = "trial,direction,start_t,end_t,peak_te\n";
  for (const auto& e : events) {
    s += e.trial + ',' + to_string(e.event.direction) + ',' + format_double(e.event.start_t) + ',' +
         format_double(e.event.end_t) + ',' + format_double(e.event.peak_te) + '\n';
  }
  write_text_file(path, s);
}

std::vector<EventRecord> read_events_csv(const fs::path& path) {
  const auto csv = read_csv(path, "trial,direction,start_t,end_t,peak_te");
  std::vector<EventRecord> out;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& c = csv.rows[r];
    EventRecord e;
    e.trial = c[0];
    e.event.direction = cell_direction(csv, r, c[1]);
    e.event.start_t = cell_double(csv, r, c[2]);
    e.event.end_t = cell_double(csv, r, c[3]);
    e.event.peak_te = cell_double(csv, r, c[4]);
    out.push_back(std::move(e));
  }
  return out;
}

void write_grid(const CueGrid& grid, const fs::path& path) {
  std::string s = "ix,iy,count\n";
  for (std::int64_t ix = 0; ix < grid.nx; ++ix) {
    for (std::int64_t iy = 0; iy < grid.ny; ++iy) {
      const auto c = grid.at(ix, iy);
      if (c != 0) s += std::to_string(ix) + ',' + std::to_string(iy) + ',' + std::to_string(c) + '\n';
    }
  }
  write_text_file(path, s);
  std::string meta;
  meta += "origin_x=" + format_double(grid.origin_x) + '\n';
  meta += "origin_y=" + format_double(grid.origin_y) + '\n';
  meta += "cell_size_m=" + format_double(grid.cell_size_m) + '\n';
  meta += "nx=" + std::to_string(grid.nx) + '\n';
  meta += "ny=" + std::to_string(grid.ny) + '\n';
  meta += std::string("direction=") + to_string(grid.direction) + '\n';
  write_text_file(meta_path(path), meta);
}

CueGrid read_grid(const fs::path& path) {
  const auto mp = meta_path(path);
  const auto kv = read_meta(mp);
  CueGrid g;
  g.origin_x = meta_double(kv, mp, "origin_x");
  g.origin_y = meta_double(kv, mp, "origin_y");
  g.cell_size_m = meta_double(kv, mp, "cell_size_m");
  g.nx = static_cast<std::int64_t>(meta_double(kv, mp, "nx"));
  g.ny = static_cast<std::int64_t>(meta_double(kv, mp, "ny"));
  if (kv.count("direction")) g.direction = parse_direction(kv.at("direction"));
  if (g.nx < 0 || g.ny < 0) throw_data(mp.string() + ": negative grid size");
  g.counts.assign(static_cast<std::size_t>(g.nx * g.ny), 0);

  const auto csv = read_csv(path, "ix,iy,count");
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto ix = cell_int(csv, r, csv.rows[r][0]);
    const auto iy = cell_int(csv, r, csv.rows[r][1]);
    if (ix < 0 || iy < 0 || ix >= g.nx || iy >= g.ny) {
      throw_data(csv.source + ": cell outside the grid", r + 1);
    }
    g.counts[static_cast<std::size_t>(ix * g.ny + iy)] = cell_int(csv, r, csv.rows[r][2]);
  }
  return g;
}

void write_histogram(const CueHistogram& hist, const fs::path& path) {
  std::string s = "bin,t_start,count\n";
  for (std::size_t k = 0; k < hist.counts.size(); ++k) {
    s += std::to_string(k) + ',' + format_double(hist.bin_start(k)) + ',' +
         std::to_string(hist.counts[k]) + '\n';
  }
  write_text_file(path, s);
  std::string meta;
  meta += "bin_dt=" + format_double(hist.bin_dt) + '\n';
  meta += "n_bins=" + std::to_string(hist.counts.size()) + '\n';
  meta += "n_trials=" + std::to_string(hist.n_trials) + '\n';
  meta += std::string("direction=") + to_string(hist.direction) + '\n';
  meta += std::string("counting=") + to_string(hist.counting) + '\n';
  write_text_file(meta_path(path), meta);
}

CueHistogram read_histogram(const fs::path& path) {
  const auto mp = meta_path(path);
  const auto kv = read_meta(mp);
  CueHistogram h;
  h.bin_dt = meta_double(kv, mp, "bin_dt");
  h.n_trials = static_cast<std::int64_t>(meta_double(kv, mp, "n_trials"));
  h.direction = parse_direction(meta_get(kv, mp, "direction"));
  h.counting = parse_histogram_counting(meta_get(kv, mp, "counting"));
  const auto n_bins = static_cast<std::size_t>(meta_double(kv, mp, "n_bins"));

  const auto csv = read_csv(path, "bin,t_start,count");
  if (csv.rows.size() != n_bins) throw_data(csv.source + ": bin count disagrees with metadata");
  h.counts.resize(n_bins);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    if (cell_int(csv, r, csv.rows[r][0]) != static_cast<std::int64_t>(r)) {
      throw_data(csv.source + ": bins out of order", r + 1);
    }
    h.counts[r] = cell_int(csv, r, csv.rows[r][2]);
  }
  return h;
}

void write_peaks_csv(const std::vector<PeakRecord>& peaks, const fs::path& path) {
  std::string s = "trial,scenario,direction,t_peak,peak_te\n";
  for (const auto& p : peaks) {
    s += p.trial + ',' + p.scenario + ',' + to_string(p.direction) + ',' + format_double(p.t_peak) +
         ',' + format_double(p.peak_te) + '\n';
  }
  write_text_file(path, s);
}

std::vector<PeakRecord> read_peaks_csv(const fs::path& path) {
  const auto csv = read_csv(path, "trial,scenario,direction,t_peak,peak_te");
  std::vector<PeakRecord> out;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& c = csv.rows[r];
    out.push_back({c[0], c[1], cell_direction(csv, r, c[2]), cell_double(csv, r, c[3]),
                   cell_double(csv, r, c[4])});
  }
  return out;
}

void write_report_csv(const std::vector<PeakStudyRow>& rows, const fs::path& path) {
  std::string s = "direction,n_a,n_b,t_stat,p_value\n";
  for (const auto& r : rows) {
    s += std::string(to_string(r.direction)) + ',' + std::to_string(r.n_a) + ',' +
         std::to_string(r.n_b) + ',' + format_double(r.t_stat) + ',' + format_double(r.p_value) + '\n';
  }
  write_text_file(path, s);
}

std::vector<PeakStudyRow> read_report_csv(const fs::path& path) {
  const auto csv = read_csv(path, "direction,n_a,n_b,t_stat,p_value");
  std::vector<PeakStudyRow> out;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& c = csv.rows[r];
    out.push_back({cell_direction(csv, r, c[0]), static_cast<std::size_t>(cell_int(csv, r, c[1])),
                   static_cast<std::size_t>(cell_int(csv, r, c[2])), cell_double(csv, r, c[3]),
                   cell_double(csv, r, c[4])});
  }
  return out;
}

void write_trials_csv(const std::vector<TrialInfo>& trials, const fs::path& path) {
  std::string s = "trial,scenario,origin_t,duration_s,dt\n";
  for (const auto& t : trials) {
    s += t.trial + ',' + t.scenario + ',' + format_double(t.origin_t) + ',' +
         format_double(t.duration_s) + ',' + format_double(t.dt) + '\n';
  }
  write_text_file(path, s);
}

std::vector<TrialInfo> read_trials_csv(const fs::path& path) {
  const auto csv = read_csv(path, "trial,scenario,origin_t,duration_s,dt");
  std::vector<TrialInfo> out;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& c = csv.rows[r];
    out.push_back({c[0], c[1], cell_double(csv, r, c[2]), cell_double(csv, r, c[3]),
                   cell_double(csv, r, c[4])});
  }
  return out;
}

void write_trial_csv(const TimeSeries& ts, const fs::path& path) {
  std::string s = "t";
  for (const auto& ch : ts.channels) s += ',' + ch;
  s += '\n';
  for (Eigen::Index r = 0; r < ts.rows(); ++r) {
    s += format_double(ts.time(r));
    for (Eigen::Index c = 0; c < ts.data.cols(); ++c) s += ',' + format_double(ts.data(r, c));
    s += '\n';
  }
  write_text_file(path, s);
}

}  // namespace tecue
