#include "tecue/config.hpp"

#include "csv_util.hpp"
#include "tecue/error.hpp"
#include "tecue/io.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace tecue {

namespace {

using detail::format_double;

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

std::vector<std::string> split_list(const std::string& v) {
  if (detail::trim(v).empty()) return {};
  return detail::split_csv(v);
}

double to_double(const std::string& key, const std::string& v) {
  auto d = detail::parse_double(v);
  if (!d || !std::isfinite(*d)) throw_config(key + ": expected a number, got '" + v + "'");
  return *d;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 9.0e15) throw_config(key + ": expected an integer, got '" + v + "'");
  return static_cast<std::int64_t>(d);
}

std::uint64_t to_seed(const std::string& key, const std::string& v) {
  const auto s = detail::trim(v);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw_config(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw_config(key + ": expected true or false, got '" + v + "'");
}

std::string list_text(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

struct Key {
  const char* section;
  const char* name;
  std::function<void(Config&, const std::string& key, const std::string& value)> set;
  std::function<std::string(const Config&)> get;
};

GridExtent& extent(Config& c) {
  if (!c.pipeline.grid_extent) c.pipeline.grid_extent = GridExtent{};
  return *c.pipeline.grid_extent;
}

std::string extent_get(const Config& c, double GridExtent::*field) {
  return c.pipeline.grid_extent ? format_double(*c.pipeline.grid_extent.*field) : "";
}

std::string extent_get(const Config& c, std::int64_t GridExtent::*field) {
  return c.pipeline.grid_extent ? std::to_string(*c.pipeline.grid_extent.*field) : "";
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"io", "target_channels",
       [](Config& c, auto&, auto& v) { c.pipeline.target_channels = split_list(v); },
       [](const Config& c) { return join(c.pipeline.target_channels); }},
      {"io", "source_channels",
       [](Config& c, auto&, auto& v) { c.pipeline.source_channels = split_list(v); },
       [](const Config& c) { return join(c.pipeline.source_channels); }},
      {"io", "resample_hz",
       [](Config& c, auto& k, auto& v) { c.pipeline.resample_hz = to_double(k, v); },
       [](const Config& c) { return format_double(c.pipeline.resample_hz); }},
      {"io", "feature",
       [](Config& c, auto& k, auto& v) {
         if (v == "raw") c.pipeline.feature = Feature::raw;
         else if (v == "magnitude") c.pipeline.feature = Feature::magnitude;
         else if (v == "xy_direction") c.pipeline.feature = Feature::xy_direction;
         else throw_config(k + ": unknown feature '" + v + "'");
       },
       [](const Config& c) { return std::string(to_string(c.pipeline.feature)); }},
      {"io", "position_channels",
       [](Config& c, auto&, auto& v) { c.pipeline.position_channels = split_list(v); },
       [](const Config& c) { return join(c.pipeline.position_channels); }},

      {"embedding", "d",
       [](Config& c, auto& k, auto& v) { c.pipeline.d = static_cast<int>(to_int(k, v)); },
       [](const Config& c) { return std::to_string(c.pipeline.d); }},
      {"embedding", "delta_s",
       [](Config& c, auto& k, auto& v) { c.pipeline.delta_s = to_double(k, v); },
       [](const Config& c) { return format_double(c.pipeline.delta_s); }},
      {"embedding", "snap_delta",
       [](Config& c, auto& k, auto& v) { c.pipeline.snap_delta = to_bool(k, v); },
       [](const Config& c) { return std::string(c.pipeline.snap_delta ? "true" : "false"); }},

      {"model", "kind",
       [](Config& c, auto&, auto& v) { c.pipeline.kind = parse_model_kind(v); },
       [](const Config& c) { return std::string(to_string(c.pipeline.kind)); }},
      {"model", "hidden",
       [](Config& c, auto& k, auto& v) {
         c.pipeline.arch.hidden.clear();
         if (v == "none") return;
         for (const auto& s : split_list(v)) c.pipeline.arch.hidden.push_back(static_cast<int>(to_int(k, s)));
       },
       [](const Config& c) {
         if (c.pipeline.arch.hidden.empty()) return std::string("none");
         std::string s;
         for (std::size_t i = 0; i < c.pipeline.arch.hidden.size(); ++i) {
           s += (i ? "," : "") + std::to_string(c.pipeline.arch.hidden[i]);
         }
         return s;
       }},
      {"model", "epochs",
       [](Config& c, auto& k, auto& v) { c.pipeline.train.epochs = static_cast<int>(to_int(k, v)); },
       [](const Config& c) { return std::to_string(c.pipeline.train.epochs); }},
      {"model", "learning_rate",
       [](Config& c, auto& k, auto& v) { c.pipeline.train.learning_rate = to_double(k, v); },
       [](const Config& c) { return format_double(c.pipeline.train.learning_rate); }},
      {"model", "batch_size",
       [](Config& c, auto& k, auto& v) { c.pipeline.train.batch_size = static_cast<int>(to_int(k, v)); },
       [](const Config& c) { return std::to_string(c.pipeline.train.batch_size); }},
      {"model", "seed",
       [](Config& c, auto& k, auto& v) { c.pipeline.train.seed = to_seed(k, v); },
       [](const Config& c) { return std::to_string(c.pipeline.train.seed); }},
      {"model", "te_mode",
       [](Config& c, auto&, auto& v) { c.pipeline.te_mode = parse_te_mode(v); },
       [](const Config& c) { return std::string(to_string(c.pipeline.te_mode)); }},
      {"model", "directions",
       [](Config& c, auto& k, auto& v) {
         if (v == "both") c.pipeline.directions = DirectionSet::both;
         else if (v == "src2tgt") c.pipeline.directions = DirectionSet::src2tgt;
         else if (v == "tgt2src") c.pipeline.directions = DirectionSet::tgt2src;
         else throw_config(k + ": expected both, src2tgt or tgt2src");
       },
       [](const Config& c) { return std::string(to_string(c.pipeline.directions)); }},

      {"detector", "alpha",
       [](Config& c, auto& k, auto& v) { c.pipeline.detector.alpha = to_double(k, v); },
       [](const Config& c) { return format_double(c.pipeline.detector.alpha); }},
      {"detector", "beta",
       [](Config& c, auto& k, auto& v) { c.pipeline.detector.beta = to_double(k, v); },
       [](const Config& c) { return format_double(c.pipeline.detector.beta); }},
      {"detector", "gamma",
       [](Config& c, auto& k, auto& v) { c.pipeline.detector.gamma = to_double(k, v); },
       [](const Config& c) { return format_double(c.pipeline.detector.gamma); }},
      {"detector", "hp_cutoff_hz",
       [](Config& c, auto& k, auto& v) { c.pipeline.detector.hp_cutoff_hz = to_double(k, v); },
       [](const Config& c) { return format_double(c.pipeline.detector.hp_cutoff_hz); }},
      {"detector", "des_mode",
       [](Config& c, auto&, auto& v) { c.pipeline.detector.des_mode = parse_des_mode(v); },
       [](const Config& c) { return std::string(to_string(c.pipeline.detector.des_mode)); }},
      {"detector", "warmup_s",
       [](Config& c, auto& k, auto& v) {
         if (v.empty()) c.pipeline.detector.warmup_s.reset();
         else c.pipeline.detector.warmup_s = to_double(k, v);
       },
       [](const Config& c) {
         return c.pipeline.detector.warmup_s ? format_double(*c.pipeline.detector.warmup_s) : std::string();
       }},

      {"aggregate", "bin_dt",
       [](Config& c, auto& k, auto& v) { c.pipeline.bin_dt = to_double(k, v); },
       [](const Config& c) { return format_double(c.pipeline.bin_dt); }},
      {"aggregate", "counting",
       [](Config& c, auto&, auto& v) { c.pipeline.counting = parse_histogram_counting(v); },
       [](const Config& c) { return std::string(to_string(c.pipeline.counting)); }},
      {"aggregate", "cell_size_m",
       [](Config& c, auto& k, auto& v) { c.pipeline.cell_size_m = to_double(k, v); },
       [](const Config& c) { return format_double(c.pipeline.cell_size_m); }},
      {"aggregate", "grid_origin_x",
       [](Config& c, auto& k, auto& v) { if (!v.empty()) extent(c).origin_x = to_double(k, v); },
       [](const Config& c) { return extent_get(c, &GridExtent::origin_x); }},
      {"aggregate", "grid_origin_y",
       [](Config& c, auto& k, auto& v) { if (!v.empty()) extent(c).origin_y = to_double(k, v); },
       [](const Config& c) { return extent_get(c, &GridExtent::origin_y); }},
      {"aggregate", "grid_nx",
       [](Config& c, auto& k, auto& v) { if (!v.empty()) extent(c).nx = to_int(k, v); },
       [](const Config& c) { return extent_get(c, &GridExtent::nx); }},
      {"aggregate", "grid_ny",
       [](Config& c, auto& k, auto& v) { if (!v.empty()) extent(c).ny = to_int(k, v); },
       [](const Config& c) { return extent_get(c, &GridExtent::ny); }},
      {"aggregate", "peak_smoothing",
       [](Config& c, auto& k, auto& v) { c.pipeline.peak_smoothing = static_cast<int>(to_int(k, v)); },
       [](const Config& c) { return std::to_string(c.pipeline.peak_smoothing); }},

      {"synth", "kind",
       [](Config& c, auto& k, auto& v) {
         if (v == "var1") c.synth.kind = SynthKind::var1;
         else if (v == "cue") c.synth.kind = SynthKind::cue;
         else throw_config(k + ": expected var1 or cue");
       },
       [](const Config& c) { return std::string(c.synth.kind == SynthKind::var1 ? "var1" : "cue"); }},
      {"synth", "n_trials",
       [](Config& c, auto& k, auto& v) { c.synth.n_trials = static_cast<int>(to_int(k, v)); },
       [](const Config& c) { return std::to_string(c.synth.n_trials); }},
      {"synth", "seed",
       [](Config& c, auto& k, auto& v) { c.synth.seed = to_seed(k, v); },
       [](const Config& c) { return std::to_string(c.synth.seed); }},
      {"synth", "scenario",
       [](Config& c, auto& k, auto& v) {
         if (v.empty() || v.find(',') != std::string::npos) throw_config(k + ": invalid scenario label");
         c.synth.scenario = v;
       },
       [](const Config& c) { return c.synth.scenario; }},
      {"synth", "n",
       [](Config& c, auto& k, auto& v) { c.synth.n = to_int(k, v); },
       [](const Config& c) { return std::to_string(c.synth.n); }},
      {"synth", "dt",
       [](Config& c, auto& k, auto& v) { c.synth.dt = to_double(k, v); },
       [](const Config& c) { return format_double(c.synth.dt); }},
#define TECUE_SYNTH_DOUBLE(field)                                                   \
  {"synth", #field, [](Config& c, auto& k, auto& v) { c.synth.field = to_double(k, v); }, \
   [](const Config& c) { return format_double(c.synth.field); }}
      TECUE_SYNTH_DOUBLE(a_xx),
      TECUE_SYNTH_DOUBLE(a_xy),
      TECUE_SYNTH_DOUBLE(a_yx),
      TECUE_SYNTH_DOUBLE(a_yy),
      TECUE_SYNTH_DOUBLE(q_xx),
      TECUE_SYNTH_DOUBLE(q_xy),
      TECUE_SYNTH_DOUBLE(q_yy),
      TECUE_SYNTH_DOUBLE(duration_s),
      TECUE_SYNTH_DOUBLE(response_delay_s),
      TECUE_SYNTH_DOUBLE(amplitude),
      TECUE_SYNTH_DOUBLE(noise_sigma),
      TECUE_SYNTH_DOUBLE(ramp_s),
      TECUE_SYNTH_DOUBLE(omega),
#undef TECUE_SYNTH_DOUBLE
      {"synth", "cue_times",
       [](Config& c, auto& k, auto& v) {
         c.synth.cue_times.clear();
         for (const auto& s : split_list(v)) c.synth.cue_times.push_back(to_double(k, s));
       },
       [](const Config& c) { return list_text(c.synth.cue_times); }},
  };
  return table;
}

void set_key(Config& cfg, const std::string& section, const std::string& key, const std::string& value) {
  for (const auto& k : keys()) {
    if (section == k.section && key == k.name) {
      k.set(cfg, section + "." + key, value);
      return;
    }
  }
  throw_config("unknown config key '" + section + "." + key + "'");
}

}  // namespace

const char* to_string(Feature f) noexcept {
  switch (f) {
    case Feature::raw: return "raw";
    case Feature::magnitude: return "magnitude";
    case Feature::xy_direction: return "xy_direction";
  }
  return "?";
}

const char* to_string(DirectionSet d) noexcept {
  switch (d) {
    case DirectionSet::both: return "both";
    case DirectionSet::src2tgt: return "src2tgt";
    case DirectionSet::tgt2src: return "tgt2src";
  }
  return "?";
}

std::vector<Direction> directions_of(DirectionSet d) {
  switch (d) {
    case DirectionSet::both: return {Direction::src2tgt, Direction::tgt2src};
    case DirectionSet::src2tgt: return {Direction::src2tgt};
    case DirectionSet::tgt2src: return {Direction::tgt2src};
  }
  return {};
}

Config parse_config(const std::string& text, const std::string& source_name) {
  static const std::set<std::string> sections = {"io", "embedding", "model", "detector", "aggregate", "synth"};
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (detail::next_line(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find_first_of("#;"); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(lineno) + ": ";
    if (s.front() == '[') {
      if (s.back() != ']') throw_config(where + "malformed section header");
      section = std::string(detail::trim(s.substr(1, s.size() - 2)));
      if (!sections.count(section)) throw_config(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw_config(where + "expected key = value");
    if (section.empty()) throw_config(where + "key outside a section");
    try {
      set_key(cfg, section, std::string(detail::trim(s.substr(0, eq))),
              std::string(detail::trim(s.substr(eq + 1))));
    } catch (const Error& e) {
      throw_config(where + e.what());
    }
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error&) {
    throw_config("cannot read config file '" + path.string() + "'");
  }
  return parse_config(text, path.string());
}

void apply_override(Config& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw_config("override '" + assignment + "' is not of the form section.key=value");
  }
  const std::string_view a = assignment;
  set_key(cfg, std::string(detail::trim(a.substr(0, dot))),
          std::string(detail::trim(a.substr(dot + 1, eq - dot - 1))),
          std::string(detail::trim(a.substr(eq + 1))));
}

std::string config_to_text(const Config& cfg) {
  std::string out;
  std::string section;
  for (const auto& k : keys()) {
    if (section != k.section) {
      if (!section.empty()) out += '\n';
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += std::string(k.name) + " = " + k.get(cfg) + '\n';
  }
  return out;
}

std::vector<std::string> preset_names() { return {"handover", "following", "synth_cue", "synth_var"}; }

Config preset_config(const std::string& name) {
  Config c;
  auto& p = c.pipeline;
  if (name == "handover") {
    p.target_channels = {"receiver_gx", "receiver_gy", "receiver_gz"};
    p.source_channels = {"giver_gx", "giver_gy", "giver_gz"};
    p.resample_hz = 115.0;
    p.feature = Feature::magnitude;
    p.d = 4;
    p.delta_s = 0.14;
    p.te_mode = TeMode::loglik_ratio;
    p.detector.alpha = 0.005;
    p.detector.beta = 0.01;
    p.bin_dt = 0.5;
  } else if (name == "following") {
    p.target_channels = {"follower_ox", "follower_oy", "follower_oz"};
    p.source_channels = {"leader_ox", "leader_oy", "leader_oz"};
    p.position_channels = {"follower_x", "follower_y"};
    p.resample_hz = 200.0;
    p.feature = Feature::xy_direction;
    p.d = 4;
    p.delta_s = 0.1;
    p.te_mode = TeMode::loglik_ratio;
    p.detector.alpha = 0.01;
    p.detector.beta = 0.05;
    p.cell_size_m = 0.5;
  } else if (name == "synth_cue") {
    p.target_channels = {"follower_vx", "follower_vy"};
    p.source_channels = {"leader_vx", "leader_vy"};
    p.position_channels = {"leader_x", "leader_y"};
    p.resample_hz = 20.0;
    p.d = 4;
    p.delta_s = 0.05;
    p.te_mode = TeMode::loglik_ratio;
    p.detector.alpha = factor_for_time_constant(1.0, 0.05);
    p.detector.beta = factor_for_time_constant(0.5, 0.05);
    p.bin_dt = 1.0;
    p.cell_size_m = 1.0;
    c.synth.kind = SynthKind::cue;
    c.synth.n_trials = 5;
    c.synth.dt = 0.05;
  } else if (name == "synth_var") {
    p.target_channels = {"x"};
    p.source_channels = {"y"};
    p.resample_hz = 100.0;
    p.d = 1;
    p.delta_s = 0.01;
    p.te_mode = TeMode::entropy_diff;
    p.detector.alpha = 0.01;
    p.detector.beta = 0.05;
    c.synth.kind = SynthKind::var1;
    c.synth.n_trials = 3;
    c.synth.dt = 0.01;
    c.synth.n = 10000;
  } else {
    throw_config("unknown preset '" + name + "'");
  }
  return c;
}

}  // namespace tecue
