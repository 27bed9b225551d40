#include "bep/experiment.hpp"

#include "bep/besov.hpp"
#include "bep/errors.hpp"
#include "bep/fft.hpp"
#include "bep/inequalities.hpp"
#include "bep/spectral.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace bep {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::string number_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(text);
  while (std::getline(in, cell, sep)) {
    cell = trim(cell);
    if (!cell.empty()) out.push_back(cell);
  }
  return out;
}

// Echo of the resolved config, kept in section order.
class Echo {
 public:
  void add(const std::string& section, const std::string& key, const std::string& value) {
    auto it = std::find_if(sections_.begin(), sections_.end(), [&](const auto& s) { return s.first == section; });
    if (it == sections_.end()) {
      sections_.push_back({section, {}});
      it = std::prev(sections_.end());
    }
    it->second.push_back({key, value});
  }
  std::string text() const {
    std::string out;
    for (const auto& [section, entries] : sections_) {
      if (!out.empty()) out += "\n";
      out += "[" + section + "]\n";
      for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
    }
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections_;
};

// One INI section with consumed-key tracking; leftovers are unknown keys.
class Section {
 public:
  Section(std::string name, const pt::ptree* tree, Echo& echo) : name_(std::move(name)), tree_(tree), echo_(echo) {}

  bool present() const { return tree_ != nullptr; }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (tree_ == nullptr) return std::nullopt;
    const auto child = tree_->get_child_optional(key);
    if (!child) return std::nullopt;
    return trim(child->data());
  }

  std::string text(const std::string& key, const std::optional<std::string>& fallback) {
    const auto v = raw(key);
    if (!v && !fallback) fail(key, "is required");
    const std::string out = v ? *v : *fallback;
    echo_.add(name_, key, out);
    return out;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const auto v = raw(key);
    double out;
    if (v) {
      out = parse_double(key, *v);
    } else {
      if (!fallback) fail(key, "is required");
      out = *fallback;
    }
    echo_.add(name_, key, number_text(out));
    return out;
  }

  std::optional<double> optional_number(const std::string& key) {
    const auto v = raw(key);
    if (!v) return std::nullopt;
    const double out = parse_double(key, *v);
    echo_.add(name_, key, number_text(out));
    return out;
  }

  long integer(const std::string& key, std::optional<long> fallback = std::nullopt) {
    const auto v = raw(key);
    long out;
    if (v) {
      out = parse_integer(key, *v);
    } else {
      if (!fallback) fail(key, "is required");
      out = *fallback;
    }
    echo_.add(name_, key, std::to_string(out));
    return out;
  }

  bool flag(const std::string& key, bool fallback) {
    const auto v = raw(key);
    bool out = fallback;
    if (v) {
      if (*v == "true") out = true;
      else if (*v == "false") out = false;
      else fail(key, "must be true or false");
    }
    echo_.add(name_, key, out ? "true" : "false");
    return out;
  }

  std::string choice(const std::string& key, const std::vector<std::string>& allowed,
                     std::optional<std::string> fallback = std::nullopt) {
    const auto v = raw(key);
    if (!v && !fallback) fail(key, "is required");
    const std::string out = v ? *v : *fallback;
    if (std::find(allowed.begin(), allowed.end(), out) == allowed.end()) fail(key, "has unknown value '" + out + "'");
    echo_.add(name_, key, out);
    return out;
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
    const auto v = raw(key);
    std::vector<double> out;
    if (v) {
      for (const auto& cell : split(*v, ',')) out.push_back(parse_double(key, cell));
    } else {
      out = fallback;
    }
    std::string echoed;
    for (double x : out) echoed += (echoed.empty() ? "" : ", ") + number_text(x);
    echo_.add(name_, key, echoed);
    return out;
  }

  std::optional<std::vector<std::string>> names(const std::string& key) {
    const auto v = raw(key);
    if (!v) return std::nullopt;
    auto out = split(*v, ',');
    std::string echoed;
    for (const auto& s : out) echoed += (echoed.empty() ? "" : ", ") + s;
    echo_.add(name_, key, echoed);
    return out;
  }

  void finish() const {
    if (tree_ == nullptr) return;
    for (const auto& [key, child] : *tree_) {
      if (!used_.count(key)) throw ConfigError("[" + name_ + "] unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("[" + name_ + "] " + key + " " + what);
  }

 private:
  double parse_double(const std::string& key, const std::string& v) const {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    double out = 0.0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(out)) fail(key, "is not a number: '" + v + "'");
    return out;
  }
  long parse_integer(const std::string& key, const std::string& v) const {
    long out = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || end != v.data() + v.size()) fail(key, "is not an integer: '" + v + "'");
    return out;
  }

  std::string name_;
  const pt::ptree* tree_;
  Echo& echo_;
  std::set<std::string> used_;
};

DataClass parse_data_class(const std::string& text) {
  if (text.size() > 2 && (text.rfind("s=", 0) == 0 || text.rfind("p=", 0) == 0)) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str() + 2, &end);
    if (end != text.c_str() + text.size()) throw ConfigError("[analysis] data_class: malformed number in " + text);
    if (text[0] == 's') {
      if (!(v >= 0.0 && v <= 1.5)) throw ConfigError("[analysis] data_class: s must lie in [0, 3/2]");
      return {DataClassKind::neg_sobolev, v};
    }
    if (!(v >= 1.0 && v <= 2.0)) throw ConfigError("[analysis] data_class: p must lie in [1, 2]");
    return {DataClassKind::lp, v};
  }
  throw ConfigError("[analysis] data_class must look like s=1.5 or p=1");
}

const std::vector<std::string> kModeNames{"linear-decay", "nonlinear-run", "norm-suite", "inequality-suite"};

// Sections each mode may contain besides [experiment].
const std::map<ExperimentMode, std::set<std::string>> kModeSections{
    {ExperimentMode::linear_decay, {"profile", "time", "norms", "analysis"}},
    {ExperimentMode::nonlinear_run, {"grid", "solver", "initial", "norms", "analysis"}},
    {ExperimentMode::norm_suite, {"grid", "initial", "input", "norms"}},
    {ExperimentMode::inequality_suite, {"inequality"}},
};

void parse_grid(Section& grid, ExperimentConfig& c) {
  const long n = grid.integer("n", 32);
  const double L = grid.number("L", 100.0);
  try {
    c.solver.grid = Grid(static_cast<int>(n), L);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("[grid] ") + e.what());
  }
}

void parse_initial(Section& s, ExperimentConfig& c) {
  InitialParams& p = c.initial;
  p.family = s.choice("family", {"gaussian_bump", "spectral_powerlaw"}, "gaussian_bump") == "gaussian_bump"
                 ? InitialParams::Family::gaussian_bump
                 : InitialParams::Family::spectral_powerlaw;
  const std::string balance = s.choice("balance", {"strict", "match", "zero_mean"}, "strict");
  p.balance = balance == "strict" ? InitialParams::Balance::strict
              : balance == "match" ? InitialParams::Balance::match
                                   : InitialParams::Balance::zero_mean;
  p.amplitude1 = s.number("amplitude1", 1e-3);
  p.amplitude2 = s.number("amplitude2", p.amplitude1);
  p.velocity1 = s.number("velocity1", 0.0);
  p.velocity2 = s.number("velocity2", 0.0);
  if (p.family == InitialParams::Family::gaussian_bump) {
    p.width = s.number("width", 5.0);
    p.offset = s.number("offset", 0.0);
    if (!(p.width > 0.0)) s.fail("width", "must be positive");
  } else {
    p.sigma = s.number("sigma", 0.0);
    p.cutoff = s.number("cutoff", 1.0);
    if (!(p.cutoff > 0.0)) s.fail("cutoff", "must be positive");
  }
  p.seed = c.seed;
}

void parse_solver(Section& s, ExperimentConfig& c) {
  SolverConfig& cfg = c.solver;
  cfg.pressure.gamma = s.number("gamma", 2.0);
  if (!(cfg.pressure.gamma > 1.0)) s.fail("gamma", "must exceed 1");
  const std::string dt = s.text("dt", std::string("auto"));
  if (dt == "auto") {
    cfg.dt = 0.0;
  } else {
    char* end = nullptr;
    cfg.dt = std::strtod(dt.c_str(), &end);
    if (end != dt.c_str() + dt.size() || !(cfg.dt > 0.0)) s.fail("dt", "must be auto or a positive number");
  }
  cfg.t_end = s.number("t_end");
  cfg.cfl_number = s.number("cfl", 0.3);
  cfg.output_cadence = s.number("cadence", 0.5);
  if (!(cfg.t_end > 0.0)) s.fail("t_end", "must be positive");
  if (!(cfg.cfl_number > 0.0 && cfg.cfl_number <= 1.0)) s.fail("cfl", "must lie in (0, 1]");
  if (!(cfg.output_cadence > 0.0)) s.fail("cadence", "must be positive");
  cfg.diagnostic_orders.clear();
  for (double k : s.numbers("diagnostic_orders", {0, 1, 2})) {
    if (k != std::floor(k) || k < 0 || k > 3) s.fail("diagnostic_orders", "entries must be integers in [0, 3]");
    cfg.diagnostic_orders.push_back(static_cast<int>(k));
  }
  cfg.include_enthalpy = s.flag("enthalpy", true);
  c.write_checkpoint = s.choice("checkpoint", {"final", "none"}, "final") == "final";
}

void parse_profile(Section& s, ExperimentConfig& c) {
  c.branch = s.choice("branch", {"sum", "difference"}, "sum") == "sum" ? Branch::sum : Branch::difference;
  SpectralProfile& p = c.profile;
  if (s.choice("family", {"powerlaw", "gaussian"}, "powerlaw") == "powerlaw") {
    p = SpectralProfile::powerlaw(s.number("sigma", 0.05), s.number("cutoff", 1.0));
    if (!(p.cutoff > 0.0)) s.fail("cutoff", "must be positive");
  } else {
    p = SpectralProfile::gaussian(s.number("width", 1.0));
    if (!(p.width > 0.0)) s.fail("width", "must be positive");
  }
  p.density_weight = s.number("density_weight", 1.0);
  p.velocity_weight = s.number("velocity_weight", 0.0);
  p.transverse_weight = s.number("transverse_weight", 0.0);
}

void parse_time(Section& s, ExperimentConfig& c) {
  TimeSampling& t = c.sampling;
  t.logarithmic = s.choice("spacing", {"log", "linear"}, "log") == "log";
  t.t_min = s.number("t_min", t.logarithmic ? 1.0 : 0.0);
  t.t_max = s.number("t_max", 1e4);
  t.samples = static_cast<int>(s.integer("samples", 81));
  if (t.samples < 2) s.fail("samples", "must be at least 2");
  if (!(t.t_max > t.t_min) || t.t_min < 0.0) s.fail("t_max", "must exceed t_min >= 0");
  if (t.logarithmic && !(t.t_min > 0.0)) s.fail("t_min", "must be positive for log spacing");
}

void parse_norms(const pt::ptree* tree, Echo& echo, ExperimentConfig& c) {
  if (tree == nullptr || tree->empty()) throw ConfigError("[norms] the norm list is empty");
  for (const auto& [key, child] : *tree) {
    if (key == "t") throw ConfigError("[norms] 't' is reserved for the time column");
    if (!child.empty()) throw ConfigError("[norms] malformed entry '" + key + "'");
    NormSpec spec = parse_norm_spec(trim(child.data()));
    const std::vector<std::string> radial{"density", "velocity", "field", "total"};
    const auto& fields = c.mode == ExperimentMode::linear_decay ? radial : quantity_names();
    const bool checkpoint_input = c.mode == ExperimentMode::norm_suite && !c.input_checkpoint.empty();
    if (!checkpoint_input && std::find(fields.begin(), fields.end(), spec.field) == fields.end()) {
      throw ConfigError("[norms] " + key + ": unknown field '" + spec.field + "' for mode " + mode_name(c.mode));
    }
    if (c.mode == ExperimentMode::linear_decay && spec.kind == NormKind::lp && spec.param != 2.0) {
      throw ConfigError("[norms] " + key + ": linear runs support lp:2 only");
    }
    c.norms.push_back({key, spec});
    echo.add("norms", key, format_norm_spec(spec));
  }
}

void check_keys(const std::vector<std::string>& keys, const ExperimentConfig& c, const std::string& what) {
  for (const auto& k : keys) {
    const bool known = std::any_of(c.norms.begin(), c.norms.end(), [&](const NamedNorm& n) { return n.key == k; });
    if (!known) throw ConfigError("[analysis] " + what + " names unknown norm '" + k + "'");
  }
}

void parse_analysis(Section& s, ExperimentConfig& c) {
  AnalysisSettings& a = c.analysis;
  a.data_class = parse_data_class(s.text("data_class", std::string("s=1.5")));
  a.t0 = s.optional_number("t0");
  a.t1 = s.optional_number("t1");
  a.transient = s.number("transient", 1.0);
  a.monitor_factor = s.number("monitor_factor", 1.1);
  a.decay = s.names("decay");
  a.monitor = s.names("monitor");
  for (const auto* list : {&a.decay, &a.monitor}) {
    if (*list) check_keys(**list, c, "a check list");
  }
  if (c.mode == ExperimentMode::linear_decay) {
    a.tolerances.linear = s.number("tolerance", 0.03);
    a.envelope_t0 = s.number("envelope_t0", 1.0);
    a.envelope_t1 = s.number("envelope_t1", 20.0);
    a.envelope_max = s.number("envelope_max", -0.45);
    a.envelope = s.names("envelope");
    if (a.envelope) check_keys(*a.envelope, c, "envelope");
  } else {
    a.tolerances.nonlinear = s.number("tolerance", 0.15);
    a.data_radius = s.optional_number("data_radius");
    a.margin = s.number("margin", 1.0);
    a.compare_gap = s.number("compare_gap", 0.3);
    a.energy = s.flag("energy", true);
    if (const auto pairs = s.names("compare")) {
      for (const auto& p : *pairs) {
        const auto colon = p.find(':');
        if (colon == std::string::npos) s.fail("compare", "entries must look like disparity_key:carrier_key");
        a.compare.emplace_back(p.substr(0, colon), p.substr(colon + 1));
        check_keys({a.compare.back().first, a.compare.back().second}, c, "compare");
      }
    }
    if (!a.data_radius && c.initial.family != InitialParams::Family::gaussian_bump) {
      s.fail("data_radius", "is required for non-gaussian data");
    }
  }
}

void parse_inequality(Section& s, ExperimentConfig& c) {
  InequalitySettings& q = c.inequality;
  q.fields = static_cast<int>(s.integer("fields", q.fields));
  q.n = static_cast<int>(s.integer("n", q.n));
  q.band = static_cast<int>(s.integer("band", q.band));
  q.l.clear();
  for (double l : s.numbers("l", {0, 1, 2})) {
    if (l != std::floor(l) || l < 0 || l > 2) s.fail("l", "entries must be 0, 1 or 2");
    q.l.push_back(static_cast<int>(l));
  }
  q.s = s.numbers("s", q.s);
  q.besov_s = s.numbers("besov_s", q.besov_s);
  q.hls_n = static_cast<int>(s.integer("hls_n", q.hls_n));
  q.hls_p = s.number("hls_p", q.hls_p);
  q.hls_widths = s.numbers("hls_widths", q.hls_widths);
  if (q.fields < 1 || q.n < 4 || q.n % 2 != 0 || q.band < 1 || 2 * q.band >= q.n) {
    s.fail("fields", "or n/band out of range (n even, 1 <= band < n/2)");
  }
}

}  // namespace

std::vector<double> TimeSampling::times() const {
  std::vector<double> out(samples);
  for (int i = 0; i < samples; ++i) {
    const double f = static_cast<double>(i) / (samples - 1);
    out[i] = logarithmic ? t_min * std::pow(t_max / t_min, f) : t_min + (t_max - t_min) * f;
  }
  out.back() = t_max;
  return out;
}

std::string mode_name(ExperimentMode mode) { return kModeNames[static_cast<int>(mode)]; }

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }

  ExperimentConfig c;
  Echo echo;
  auto child = [&](const std::string& name) -> const pt::ptree* {
    const auto it = tree.find(name);
    return it == tree.not_found() ? nullptr : &it->second;
  };

  Section exp("experiment", child("experiment"), echo);
  if (!exp.present()) throw ConfigError("config: [experiment] section is required");
  const std::string mode = exp.choice("mode", kModeNames);
  c.mode = static_cast<ExperimentMode>(std::find(kModeNames.begin(), kModeNames.end(), mode) - kModeNames.begin());
  const long seed = exp.integer("seed", 1);
  if (seed < 0) exp.fail("seed", "must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.output = exp.text("output", std::string());
  exp.finish();

  const auto& allowed = kModeSections.at(c.mode);
  for (const auto& [name, sub] : tree) {
    if (!sub.data().empty() && sub.empty()) throw ConfigError("config: key '" + name + "' outside a section");
    if (name == "experiment") continue;
    if (!allowed.count(name)) throw ConfigError("config: section [" + name + "] is not used by mode " + mode);
  }

  switch (c.mode) {
    case ExperimentMode::linear_decay: {
      Section profile("profile", child("profile"), echo);
      parse_profile(profile, c);
      profile.finish();
      Section time("time", child("time"), echo);
      parse_time(time, c);
      time.finish();
      parse_norms(child("norms"), echo, c);
      Section analysis("analysis", child("analysis"), echo);
      parse_analysis(analysis, c);
      analysis.finish();
      break;
    }
    case ExperimentMode::nonlinear_run: {
      Section grid("grid", child("grid"), echo);
      parse_grid(grid, c);
      grid.finish();
      Section solver("solver", child("solver"), echo);
      parse_solver(solver, c);
      solver.finish();
      Section initial("initial", child("initial"), echo);
      parse_initial(initial, c);
      initial.finish();
      parse_norms(child("norms"), echo, c);
      Section analysis("analysis", child("analysis"), echo);
      parse_analysis(analysis, c);
      analysis.finish();
      break;
    }
    case ExperimentMode::norm_suite: {
      Section input("input", child("input"), echo);
      if (input.present()) {
        c.input_checkpoint = input.text("checkpoint", std::nullopt);
        input.finish();
        if (child("grid") || child("initial")) {
          throw ConfigError("config: [input] checkpoint excludes [grid] and [initial]");
        }
      } else {
        Section grid("grid", child("grid"), echo);
        parse_grid(grid, c);
        grid.finish();
        Section initial("initial", child("initial"), echo);
        parse_initial(initial, c);
        initial.finish();
      }
      parse_norms(child("norms"), echo, c);
      break;
    }
    case ExperimentMode::inequality_suite: {
      Section ineq("inequality", child("inequality"), echo);
      parse_inequality(ineq, c);
      ineq.finish();
      break;
    }
  }
  c.echo = echo.text();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string format_series(const std::vector<std::string>& keys, const std::vector<NormSeries>& series) {
  std::string out = "t";
  for (const auto& k : keys) out += "\t" + k;
  out += "\n";
  std::size_t rows = series.empty() ? 0 : series.front().size();
  for (const auto& s : series) rows = std::min(rows, s.size());
  for (std::size_t i = 0; i < rows; ++i) {
    out += number_text(series.front().times[i]);
    for (const auto& s : series) out += "\t" + number_text(s.values[i]);
    out += "\n";
  }
  return out;
}

std::string format_diagnostics(const std::vector<EnergyDiagnostics>& diagnostics) {
  std::string out = "t\tdelta\tk\tenergy\tdissipation\tdissipation_next\tcross\treference\tenergy_rate\t"
                    "cross_rate\tgradient_norm\tdisparity\tlaplacian_phi\tfield_gradient\tidentity_defect\n";
  for (const auto& d : diagnostics) {
    for (const auto& o : d.orders) {
      out += number_text(d.time) + "\t" + number_text(d.delta) + "\t" + std::to_string(o.k);
      for (double v : {o.energy, o.dissipation, o.dissipation_next, o.cross, o.reference, o.energy_rate, o.cross_rate,
                       o.gradient_norm, o.disparity, o.laplacian_phi, o.field_gradient, o.identity_defect}) {
        out += "\t" + number_text(v);
      }
      out += "\n";
    }
  }
  return out;
}

std::vector<double> norm_table(const Checkpoint& checkpoint, const std::vector<NormSpec>& specs) {
  const bool is_state = checkpoint.labels == state_labels();
  const SpectralField all = to_spectral(checkpoint.field);
  std::optional<SpectralState> state;
  if (is_state) state.emplace(all, checkpoint.time);
  std::vector<double> out;
  for (const auto& spec : specs) {
    SpectralField f = all;
    if (is_state) {
      f = select_quantity(*state, spec.field);
    } else if (spec.field != "total") {
      const auto it = std::find(checkpoint.labels.begin(), checkpoint.labels.end(), spec.field);
      if (it == checkpoint.labels.end()) throw ConfigError("norms: checkpoint has no component '" + spec.field + "'");
      const auto c = static_cast<int>(it - checkpoint.labels.begin());
      f = SpectralField(all.grid(), all.coeffs().col(c));
    }
    out.push_back(evaluate(spec, f));
  }
  return out;
}

namespace {

Verdict refusal(const std::string& check, const std::string& quantity, int l, const std::string& why) {
  Verdict v;
  v.check = check;
  v.quantity = quantity + " (" + why + ")";
  v.l = l;
  v.data_class = "-";
  v.predicted = std::numeric_limits<double>::quiet_NaN();
  v.measured = std::numeric_limits<double>::quiet_NaN();
  return v;
}

Verdict bound_row(const std::string& check, const std::string& quantity, int l, double measured, double bound) {
  Verdict v;
  v.check = check;
  v.quantity = quantity;
  v.l = l;
  v.data_class = "-";
  v.predicted = bound;
  v.measured = measured;
  v.tolerance = 0.0;
  v.pass = measured <= bound;
  return v;
}

bool negative_order(const NormSpec& s) {
  return s.kind == NormKind::besov || (s.kind == NormKind::hdot && s.param < 0.0);
}

std::vector<std::string> default_keys(const ExperimentConfig& c, bool negative) {
  std::vector<std::string> out;
  for (const auto& n : c.norms) {
    if (negative_order(n.spec) == negative) out.push_back(n.key);
  }
  return out;
}

const NormSeries& series_for(const ExperimentConfig& c, const std::vector<NormSeries>& series, const std::string& key) {
  for (std::size_t i = 0; i < c.norms.size(); ++i) {
    if (c.norms[i].key == key) return series[i];
  }
  throw ConfigError("unknown norm key '" + key + "'");
}

Quantity quantity_of(const NormSpec& spec) {
  return spec.field == "n_diff" ? Quantity::disparity : Quantity::carrier;
}

void add_decay_rows(const ExperimentConfig& c, const std::vector<NormSeries>& series, SeriesSource source,
                    const std::vector<std::string>& keys, double t0, double t1, std::vector<Verdict>& out) {
  for (const auto& key : keys) {
    const NormSeries& s = series_for(c, series, key);
    const Quantity q = quantity_of(s.spec);
    try {
      const DecayFit fit = fit_decay(s, t0, t1);
      Verdict v = compare_to_prediction(fit, source, s.spec.derivative_order, c.analysis.data_class, q,
                                        c.analysis.tolerances);
      v.quantity = key;
      out.push_back(v);
    } catch (const Error& e) {
      out.push_back(refusal("decay", key, s.spec.derivative_order, e.what()));
    }
  }
}

void add_monitor_rows(const ExperimentConfig& c, const std::vector<NormSeries>& series,
                      const std::vector<std::string>& keys, double t_end, std::vector<Verdict>& out) {
  for (const auto& key : keys) {
    const NormSeries& s = series_for(c, series, key);
    try {
      Verdict v = negative_norm_monitor(s, t_end, c.analysis.transient, c.analysis.monitor_factor);
      v.quantity = key;
      out.push_back(v);
    } catch (const Error& e) {
      out.push_back(refusal("monitor", key, s.spec.derivative_order, e.what()));
    }
  }
}

void run_linear(const ExperimentConfig& c, ExperimentResult& r) {
  const auto times = c.sampling.times();
  for (const auto& n : c.norms) {
    NormSeries s = norm_evolution(c.profile, c.branch, n.spec, times);
    s.provenance = "linear " + std::string(c.branch == Branch::sum ? "sum" : "difference");
    r.series.push_back(std::move(s));
  }
  const AnalysisSettings& a = c.analysis;
  if (c.branch == Branch::sum) {
    const auto decay = a.decay.value_or(default_keys(c, false));
    add_decay_rows(c, r.series, SeriesSource::linear, decay, a.t0.value_or(100.0), a.t1.value_or(1e4), r.verdicts);
  } else {
    const auto keys = a.envelope.value_or(default_keys(c, false));
    for (const auto& key : keys) {
      const NormSeries& s = series_for(c, r.series, key);
      try {
        const ExponentialFit fit = fit_exponential(s, a.envelope_t0, a.envelope_t1);
        Verdict v;
        v.check = "envelope";
        v.quantity = key;
        v.l = s.spec.derivative_order;
        v.data_class = "-";
        v.predicted = -0.5;
        v.tolerance = a.envelope_max + 0.5;
        v.measured = fit.envelope_rate;
        v.pass = fit.envelope_rate <= a.envelope_max;
        v.t0 = a.envelope_t0;
        v.t1 = a.envelope_t1;
        r.verdicts.push_back(v);
      } catch (const Error& e) {
        r.verdicts.push_back(refusal("envelope", key, s.spec.derivative_order, e.what()));
      }
    }
  }
  add_monitor_rows(c, r.series, a.monitor.value_or(default_keys(c, true)), c.sampling.t_max, r.verdicts);
}

double mean_drift(Complex now, Complex start, double scale) {
  const double ref = std::abs(start) > 0.0 ? std::abs(start) : scale;
  return ref > 0.0 ? std::abs(now - start) / ref : std::abs(now - start);
}

void run_nonlinear(const ExperimentConfig& c, ExperimentResult& r, std::optional<SpectralState>& final_state) {
  const SpectralState initial = make_initial(c.initial, c.solver.grid);
  std::vector<NormSpec> specs;
  for (const auto& n : c.norms) specs.push_back(n.spec);
  // Norm requests that cannot be evaluated (a negative order on a field
  // with a mean) are configuration errors; catch them before running.
  for (const auto& n : c.norms) {
    try {
      evaluate(n.spec, select_quantity(initial, n.spec.field));
    } catch (const InfiniteNormError& e) {
      throw ConfigError("[norms] " + n.key + ": " + e.what());
    }
  }
  RunResult run_result = run(initial, c.solver, specs);
  r.series = std::move(run_result.norms);
  r.diagnostics = std::move(run_result.diagnostics);
  final_state = run_result.final_state;
  if (run_result.status == RunStatus::failed) {
    r.status = run_result.message;
    r.exit_code = kExitRuntimeError;
  }

  const AnalysisSettings& a = c.analysis;
  const double radius = a.data_radius.value_or(3.0 * c.initial.width + std::abs(c.initial.offset));
  const double t_wrap = TrustWindow::make(c.solver.grid.box_length(), radius, a.margin).t_wrap;
  const double t_last = r.series.empty() ? run_result.final_state.time : r.series.front().times.back();
  const double t1 = std::min({a.t1.value_or(t_wrap), t_wrap, t_last});
  const double t0 = a.t0.value_or(std::max(5.0, a.transient));

  // Conservation of each species' mass and of the charge.
  const SpectralState& end = run_result.final_state;
  const double scale1 = l2_norm(initial.density(0)), scale2 = l2_norm(initial.density(1));
  Verdict mass1 = bound_row("mass", "n1", 0, mean_drift(end.q.mean_mode(0), initial.q.mean_mode(0), scale1), 1e-10);
  Verdict mass2 = bound_row("mass", "n2", 0, mean_drift(end.q.mean_mode(4), initial.q.mean_mode(4), scale2), 1e-10);
  const Complex charge = end.q.mean_mode(0) - end.q.mean_mode(4);
  const double charge_ref = std::max(std::abs(initial.q.mean_mode(0)) + std::abs(initial.q.mean_mode(4)), scale1 + scale2);
  Verdict neutral = bound_row("charge", "n1-n2", 0, charge_ref > 0.0 ? std::abs(charge) / charge_ref : 0.0, 1e-10);
  for (Verdict* v : {&mass1, &mass2, &neutral}) {
    v->t0 = 0.0;
    v->t1 = end.time;
    r.verdicts.push_back(*v);
  }

  add_decay_rows(c, r.series, SeriesSource::nonlinear, a.decay.value_or(default_keys(c, false)), t0, t1, r.verdicts);
  for (const auto& [disp, carrier] : a.compare) {
    try {
      const DecayFit fd = fit_decay(series_for(c, r.series, disp), t0, t1);
      const DecayFit fc = fit_decay(series_for(c, r.series, carrier), t0, t1);
      Verdict v = compare_exponents(fd, fc, a.compare_gap);
      v.quantity = disp + "-vs-" + carrier;
      r.verdicts.push_back(v);
    } catch (const Error& e) {
      r.verdicts.push_back(refusal("compare", disp + "-vs-" + carrier, 0, e.what()));
    }
  }
  add_monitor_rows(c, r.series, a.monitor.value_or(default_keys(c, true)), t1, r.verdicts);

  if (a.energy && r.diagnostics.size() >= 3) {
    for (const auto& e : energy_inequality_report(r.diagnostics)) {
      Verdict ly = bound_row("energy-lyapunov", "ratio/delta", e.k, e.max_ratio_over_delta, kEnergyHarnessK);
      ly.pass = e.lyapunov_pass;
      Verdict cross = bound_row("energy-cross", "C", e.k, e.cross_C, 1.0);
      cross.pass = e.cross_pass;
      Verdict id = bound_row("poisson-identity", "relative defect", e.k,
                             std::max(e.max_identity_defect, e.max_poisson_mismatch), 1e-10);
      for (Verdict* v : {&ly, &cross, &id}) {
        v->t0 = r.diagnostics.front().time;
        v->t1 = r.diagnostics.back().time;
        r.verdicts.push_back(*v);
      }
    }
  }
}

void run_norm_suite(const ExperimentConfig& c, ExperimentResult& r) {
  std::vector<NormSpec> specs;
  for (const auto& n : c.norms) specs.push_back(n.spec);
  const Checkpoint source = c.input_checkpoint.empty()
                                ? make_checkpoint(make_initial(c.initial, c.solver.grid), c.echo)
                                : read_checkpoint(c.input_checkpoint);
  const auto values = norm_table(source, specs);
  for (std::size_t i = 0; i < values.size(); ++i) r.table.emplace_back(c.norms[i], values[i]);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw RuntimeFailure("cannot write " + path.string());
}

}  // namespace

std::vector<Verdict> inequality_suite(const InequalitySettings& q, std::uint64_t seed) {
  std::vector<Verdict> out;
  const double two_pi = 2.0 * std::numbers::pi;

  // Random band-limited zero-mean fields on boxes of varying size.
  std::mt19937_64 gen(stream_seed(seed, "inequality-fields"));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> box(0.5, 50.0);
  std::map<std::pair<int, double>, double> worst_sobolev;
  std::map<std::pair<int, double>, double> worst_besov;
  for (int i = 0; i < q.fields; ++i) {
    const Grid grid(q.n, box(gen));
    RealField f(grid, 1);
    for (Eigen::Index p = 0; p < f.values().size(); ++p) f.values().data()[p] = normal(gen);
    SpectralField s = to_spectral(f);
    const auto geo = geometry(grid);
    for (int i0 = 0; i0 < q.n; ++i0)
      for (int i1 = 0; i1 < q.n; ++i1)
        for (int i2 = 0; i2 <= q.n / 2; ++i2) {
          const int k0 = grid.wavenumber(i0), k1 = grid.wavenumber(i1), k2 = grid.wavenumber(i2);
          if (std::abs(k0) > q.band || std::abs(k1) > q.band || std::abs(k2) > q.band) {
            s.coeffs().row(grid.mode_index(i0, i1, i2)).setZero();
          }
        }
    s.coeffs().row(0).setZero();
    for (int l : q.l) {
      for (double sv : q.s) {
        auto& w = worst_sobolev[{l, sv}];
        w = std::max(w, check_neg_sobolev_interpolation(s, l, sv));
      }
      for (double sv : q.besov_s) {
        auto& w = worst_besov[{l, sv}];
        w = std::max(w, check_besov_interpolation(s, l, sv));
      }
    }
  }
  for (const auto& [key, worst] : worst_sobolev) {
    Verdict v = bound_row("sobolev-interpolation", "max ratio", key.first, worst, 1.0 + 1e-10);
    v.data_class = "s=" + number_text(key.second);
    out.push_back(v);
  }
  for (const auto& [key, worst] : worst_besov) {
    Verdict v = bound_row("besov-interpolation", "max ratio", key.first, worst,
                          besov_interpolation_constant(key.first, key.second));
    v.data_class = "s=" + number_text(key.second);
    out.push_back(v);
  }

  // Equality on single shells |xi| = 2 pi m / L.
  double shell_defect = 0.0;
  for (const double L : {two_pi, 5.0, 37.0}) {
    const Grid grid(q.n, L);
    for (int m = 1; m <= q.band; ++m) {
      const SpectralField f = to_spectral(sample(grid, [&](double x, double y, double) {
        return std::cos(two_pi * m * x / L) + 0.5 * std::sin(two_pi * m * y / L);
      }));
      for (int l : q.l)
        for (double sv : q.s) shell_defect = std::max(shell_defect, std::abs(check_neg_sobolev_interpolation(f, l, sv) - 1.0));
    }
  }
  out.push_back(bound_row("sobolev-interpolation-shell", "|ratio - 1|", 0, shell_defect, 1e-10));

  double partition = 0.0;
  for (const Grid& grid : {Grid(q.n, two_pi), Grid(32, 100.0), Grid(64, 13.0), Grid(16, 0.3)}) {
    partition = std::max(partition, BesovPartition::partition_defect(grid));
  }
  out.push_back(bound_row("partition-of-unity", "max defect", 0, partition, 1e-10));

  // Odd quintic factors with a vanishing first moment keep the negative-order
  // sum well converged at the resolved widths.
  const double a = 2.184183774028483;
  const Profile odd = [a](double x, double y, double z) {
    auto g = [a](double t) { return std::pow(t * (t * t - a * a), 5) * std::exp(-t * t); };
    return g(x) * g(y) * g(z);
  };
  const Grid hls_grid(q.hls_n, static_cast<double>(q.hls_n));
  const auto ratios = check_hls_embedding(hls_grid, odd, q.hls_p, q.hls_widths);
  if (ratios.size() < 2) {
    out.push_back(refusal("hls-dilation", "spread", 0, "fewer than two resolved widths"));
  } else {
    double lo = ratios.front().ratio, hi = lo;
    for (const auto& d : ratios) {
      lo = std::min(lo, d.ratio);
      hi = std::max(hi, d.ratio);
    }
    Verdict v = bound_row("hls-dilation", "relative spread", 0, hi / lo - 1.0, 1e-6);
    v.data_class = "p=" + number_text(q.hls_p);
    out.push_back(v);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
  ExperimentResult r;
  r.status = "completed";
  std::optional<SpectralState> final_state;
  switch (c.mode) {
    case ExperimentMode::linear_decay:
      run_linear(c, r);
      break;
    case ExperimentMode::nonlinear_run:
      run_nonlinear(c, r, final_state);
      break;
    case ExperimentMode::norm_suite:
      run_norm_suite(c, r);
      break;
    case ExperimentMode::inequality_suite:
      r.verdicts = inequality_suite(c.inequality, c.seed);
      break;
  }
  if (r.exit_code == kExitPass) {
    const bool all_pass = std::all_of(r.verdicts.begin(), r.verdicts.end(), [](const Verdict& v) { return v.pass; });
    if (!all_pass) r.exit_code = kExitVerdictFailure;
  }

  if (!c.output.empty()) {
    const fs::path dir(c.output);
    fs::create_directories(dir);
    write_file(dir / "config.ini", c.echo);
    write_file(dir / "report.tsv", format_report(r.verdicts));
    write_file(dir / "status.txt", r.status + "\n");
    if (!r.series.empty()) {
      std::vector<std::string> keys;
      for (const auto& n : c.norms) keys.push_back(n.key);
      write_file(dir / "series.tsv", format_series(keys, r.series));
    }
    if (!r.diagnostics.empty()) write_file(dir / "diagnostics.tsv", format_diagnostics(r.diagnostics));
    if (c.mode == ExperimentMode::norm_suite) {
      std::string table = "key\tspec\tvalue\n";
      for (const auto& [norm, value] : r.table) table += norm.key + "\t" + format_norm_spec(norm.spec) + "\t" + number_text(value) + "\n";
      write_file(dir / "norms.tsv", table);
    }
    if (final_state && c.write_checkpoint) write_checkpoint((dir / "final.ckpt").string(), make_checkpoint(*final_state, c.echo));
  }
  return r;
}

int ReportSummary::exit_code() const {
  if (runtime_failures > 0) return kExitRuntimeError;
  return failed > 0 ? kExitVerdictFailure : kExitPass;
}

ReportSummary summarize_reports(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("report: not a directory: " + dir);
  std::vector<fs::path> reports;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "report.tsv") reports.push_back(entry.path());
  }
  if (reports.empty()) throw ConfigError("report: no report.tsv below " + dir);
  std::sort(reports.begin(), reports.end());

  ReportSummary out;
  for (const auto& path : reports) {
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    std::vector<Verdict> verdicts;
    try {
      verdicts = parse_report(text.str());
    } catch (const PreconditionError& e) {
      throw ConfigError("report: " + path.string() + ": " + e.what());
    }
    const std::string where = fs::relative(path.parent_path(), dir).string();
    std::ifstream status_in(path.parent_path() / "status.txt");
    std::string status;
    std::getline(status_in, status);
    if (!status.empty() && status != "completed") {
      ++out.runtime_failures;
      out.lines.push_back(where + "\truntime\t" + status);
    }
    for (const auto& v : verdicts) {
      (v.pass ? out.passed : out.failed) += 1;
      out.lines.push_back(where + "\t" + v.check + "\t" + v.quantity + "\tl=" + std::to_string(v.l) + "\t" +
                          v.data_class + "\tpredicted=" + number_text(v.predicted) + "\tmeasured=" +
                          number_text(v.measured) + "\t" + (v.pass ? "PASS" : "FAIL"));
    }
  }
  return out;
}

}  // namespace bep
