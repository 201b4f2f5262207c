#include "qrom/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "qrom/errors.hpp"

namespace qrom {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

double to_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError(what + ": '" + text + "' is not a number");
  return v;
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw ConfigError("sweep count must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

// "a:b:n"
std::vector<double> parse_range(const std::string& text, const std::string& what) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError(what + ": expected start:stop:count, got '" + text + "'");
  const double n = to_number(parts[2], what);
  if (n != static_cast<int>(n)) throw ConfigError(what + ": count must be an integer");
  return linspace(to_number(parts[0], what), to_number(parts[1], what), static_cast<int>(n));
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig cfg;
  cfg.source_ = source;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (cfg.values_.count(key))
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  return parse(in, path.string());
}

std::string KeyValueConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(source_ + ": missing key '" + key + "'");
  used_.insert(key);
  return it->second;
}

std::string KeyValueConfig::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double KeyValueConfig::number(const std::string& key) const {
  return to_number(text(key), source_ + ": " + key);
}

double KeyValueConfig::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int KeyValueConfig::integer(const std::string& key) const {
  const double v = number(key);
  if (v != static_cast<int>(v)) throw ConfigError(source_ + ": " + key + " must be an integer");
  return static_cast<int>(v);
}

int KeyValueConfig::integer(const std::string& key, int fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool KeyValueConfig::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto v = text(key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(source_ + ": " + key + " must be true or false");
}

std::vector<std::string> KeyValueConfig::unused_keys() const {
  std::vector<std::string> unused;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) unused.push_back(k);
  return unused;
}

std::vector<std::string> param_names(const Scenario& scenario) {
  switch (scenario.potential) {
    case PotentialKind::None: return {};
    case PotentialKind::Field: return {"Ex", "Ey"};
    case PotentialKind::Pyramids: {
      std::vector<std::string> names;
      for (std::size_t k = 0; k < scenario.pyramids.size(); ++k)
        names.push_back("p" + std::to_string(k + 1));
      return names;
    }
  }
  return {};
}

ScenarioParams parse_params(const Scenario& scenario, const std::string& text) {
  const auto names = param_names(scenario);
  const std::string t = trim(text);
  if (!t.empty() && t[0] == '@') {
    const auto it = scenario.named_params.find(t.substr(1));
    if (it == scenario.named_params.end())
      throw ConfigError("scenario has no parameter set '" + t.substr(1) + "'");
    return it->second;
  }
  ScenarioParams p{std::vector<double>(names.size(), 0.0)};
  for (const auto& item : split(t, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("parameter '" + item + "' must be name=value");
    const std::string name = trim(item.substr(0, eq));
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw ConfigError("unknown parameter '" + name + "'");
    p.values[static_cast<std::size_t>(it - names.begin())] =
        to_number(trim(item.substr(eq + 1)), "parameter " + name);
  }
  return p;
}

std::vector<int> parse_mode_list(const std::string& text) {
  std::vector<int> modes;
  auto as_int = [](const std::string& s) {
    const double v = to_number(s, "mode list");
    if (v != static_cast<int>(v) || v < 1) throw ConfigError("mode counts must be positive integers");
    return static_cast<int>(v);
  };
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const int a = as_int(trim(text.substr(0, colon)));
    const int b = as_int(trim(text.substr(colon + 1)));
    if (b < a) throw ConfigError("empty mode range '" + text + "'");
    for (int m = a; m <= b; ++m) modes.push_back(m);
  } else {
    for (const auto& item : split(text, ',')) modes.push_back(as_int(item));
  }
  if (modes.empty()) throw ConfigError("empty mode list");
  return modes;
}

Scenario parse_scenario(const KeyValueConfig& cfg) {
  Scenario sc;
  sc.name = cfg.text("name", "scenario");

  auto& st = sc.structure;
  st.lx = cfg.number("domain.lx");
  st.ly = cfg.number("domain.ly");
  st.h = cfg.number("grid.h");
  st.layout.rows = cfg.integer("dots.rows", 0);
  st.layout.cols = cfg.integer("dots.cols", st.layout.rows);
  st.layout.dot_size = cfg.number("dots.size", 0.0);
  st.layout.gap = cfg.number("dots.gap", 0.0);
  st.layout.spacer = cfg.number("dots.spacer", 0.0);
  st.barrier = {cfg.number("material.barrier.mass"), cfg.number("material.barrier.band_edge", 0.0)};
  st.well = {cfg.number("material.well.mass", st.barrier.mass_ratio),
             cfg.number("material.well.band_edge", st.barrier.band_edge)};
  const Boundary all = parse_boundary(cfg.text("bc", "dirichlet"));
  st.bc.left = parse_boundary(cfg.text("bc.left", to_string(all)));
  st.bc.right = parse_boundary(cfg.text("bc.right", to_string(all)));
  st.bc.bottom = parse_boundary(cfg.text("bc.bottom", to_string(all)));
  st.bc.top = parse_boundary(cfg.text("bc.top", to_string(all)));
  st.validate();

  const std::string kind = cfg.text("potential.terms", "none");
  if (kind == "none") {
    sc.potential = PotentialKind::None;
  } else if (kind == "field") {
    sc.potential = PotentialKind::Field;
  } else if (kind == "pyramids") {
    sc.potential = PotentialKind::Pyramids;
    const double base = cfg.number("pyramids.base");
    if (cfg.has("pyramids.centers")) {
      for (const auto& c : split(cfg.text("pyramids.centers"), ';')) {
        const auto xy = split(c, ' ');
        if (xy.size() != 2) throw ConfigError("pyramids.centers entries must be 'x y'");
        sc.pyramids.push_back({to_number(xy[0], "pyramid x"), to_number(xy[1], "pyramid y"), base});
      }
    } else {
      sc.pyramids = default_pyramids(st.lx, st.ly, base);
    }
  } else {
    throw ConfigError("potential.terms must be none, field or pyramids");
  }

  // Training plan: per-parameter sweeps, then all-equal sweep, then explicit
  // configurations, then (optionally) the all-zero configuration.
  const auto names = param_names(sc);
  sc.plan.n_states = cfg.integer("train.states", 6);
  if (cfg.has("train.sweep")) {
    for (const auto& item : split(cfg.text("train.sweep"), ';')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("train.sweep entries are name:start:stop:count");
      const std::string name = trim(item.substr(0, colon));
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) throw ConfigError("train.sweep: unknown parameter '" + name + "'");
      for (double v : parse_range(item.substr(colon + 1), "train.sweep")) {
        ScenarioParams p{std::vector<double>(names.size(), 0.0)};
        p.values[static_cast<std::size_t>(it - names.begin())] = v;
        sc.plan.configs.push_back(p);
      }
    }
  }
  if (cfg.has("train.sweep_all")) {
    for (double v : parse_range(cfg.text("train.sweep_all"), "train.sweep_all"))
      sc.plan.configs.push_back({std::vector<double>(names.size(), v)});
  }
  if (cfg.has("train.configs")) {
    for (const auto& item : split(cfg.text("train.configs"), ';'))
      sc.plan.configs.push_back(parse_params(sc, item));
  }
  if (cfg.flag("train.include_zero", false))
    sc.plan.configs.push_back({std::vector<double>(names.size(), 0.0)});

  sc.dns_states = cfg.integer("dns.states", 8);
  sc.eigen.tol = cfg.number("dns.tol", sc.eigen.tol);
  sc.kinetic = parse_kinetic_scheme(cfg.text("rom.kinetic", "stiffness"));
  sc.solve_modes = cfg.integer("solve.modes", 13);
  sc.report.report_states = cfg.integer("report.states", sc.dns_states);
  sc.report.trained_states = cfg.integer("report.trained_states", sc.plan.n_states);
  sc.report.cluster_gap = cfg.number("report.cluster_gap", kDefaultClusterGap);

  for (const auto& [key, value] : cfg.entries()) {
    if (key.rfind("params.", 0) == 0) {
      (void)cfg.text(key);
      sc.named_params[key.substr(7)] = parse_params(sc, value);
    }
  }

  sc.resolved = cfg.entries();

  const auto unused = cfg.unused_keys();
  if (!unused.empty()) {
    std::string list;
    for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError("unknown scenario keys: " + list);
  }
  if (sc.dns_states < 1) throw ConfigError("dns.states must be >= 1");
  if (sc.report.report_states > sc.dns_states)
    throw ConfigError("report.states cannot exceed dns.states");
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(KeyValueConfig::load(path));
}

ScenarioFields build_fields(const Scenario& scenario) {
  Grid grid = build_grid(scenario.structure);
  auto [mass, base] = sample_mass_and_base(scenario.structure, grid);
  PotentialAssembly assembly{std::move(base), {}};
  const auto names = param_names(scenario);
  if (scenario.potential == PotentialKind::Field) {
    auto [sx, sy] = field_terms(grid);
    assembly.terms.push_back({names[0], std::move(sx)});
    assembly.terms.push_back({names[1], std::move(sy)});
  } else if (scenario.potential == PotentialKind::Pyramids) {
    auto shapes = pyramid_terms(scenario.pyramids, grid);
    for (std::size_t k = 0; k < shapes.size(); ++k)
      assembly.terms.push_back({names[k], std::move(shapes[k])});
  }
  return {std::move(grid), std::move(mass), std::move(assembly)};
}

}  // namespace qrom
