#include "mvpp/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace mvpp {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Section {
 public:
  Section(const ConfigFile& f, const std::string& name) : name_(name), values_(f.section(name)) {}

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  const ConfigValue& raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing key '" + key + "' in section [" + name_ + "]");
    return it->second;
  }

  std::string str(const std::string& key, const std::string& fallback = "\x01") const {
    if (!has(key) && fallback != "\x01") return fallback;
    return raw(key).text;
  }

  double real(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_real(raw(key).text, raw(key).line);
  }

  double real(const std::string& key) const { return parse_real(raw(key).text, raw(key).line); }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    return parse_int(raw(key).text, raw(key).line);
  }

  std::vector<double> reals(const std::string& key) const {
    const auto& v = raw(key);
    std::vector<double> out;
    for (const auto& tok : split(replace_commas(v.text), ' ')) out.push_back(parse_real(tok, v.line));
    if (out.empty()) throw ConfigError("key '" + key + "' is empty", v.line);
    return out;
  }

  std::vector<std::int64_t> integers(const std::string& key) const {
    const auto& v = raw(key);
    std::vector<std::int64_t> out;
    for (const auto& tok : split(replace_commas(v.text), ' ')) out.push_back(parse_int(tok, v.line));
    if (out.empty()) throw ConfigError("key '" + key + "' is empty", v.line);
    return out;
  }

  // Rows separated by ';', entries by spaces or commas.
  Matrix matrix(const std::string& key) const {
    const auto& v = raw(key);
    Matrix m;
    for (const auto& row : split(v.text, ';')) {
      std::vector<double> r;
      for (const auto& tok : split(replace_commas(row), ' ')) r.push_back(parse_real(tok, v.line));
      m.push_back(r);
    }
    if (m.empty()) throw ConfigError("key '" + key + "' is empty", v.line);
    return m;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string t = raw(key).text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError("key '" + key + "' expects a boolean, got '" + raw(key).text + "'", raw(key).line);
  }

  int line(const std::string& key) const { return has(key) ? raw(key).line : 0; }

  static double parse_real(const std::string& s, int line) {
    try {
      std::size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("expected a number, got '" + s + "'", line);
  }

  static std::int64_t parse_int(const std::string& s, int line) {
    try {
      std::size_t pos = 0;
      long long v = std::stoll(s, &pos);
      if (pos == s.size()) return v;
      // Accept integral scientific notation such as 1e5.
      double d = std::stod(s, &pos);
      if (pos == s.size() && d == static_cast<double>(static_cast<std::int64_t>(d))) return static_cast<std::int64_t>(d);
    } catch (const std::exception&) {
    }
    throw ConfigError("expected an integer, got '" + s + "'", line);
  }

 private:
  static std::string replace_commas(std::string s) {
    std::replace(s.begin(), s.end(), ',', ' ');
    return s;
  }

  std::string name_;
  const std::map<std::string, ConfigValue>& values_;
};

ReplacementKernel build_kernel(const Section& s) {
  const std::string type = s.str("type");
  try {
    if (type == "dcolour") {
      ReplacementKernel k = kernel::DColour{s.matrix("rows")};
      try {
        validate_kernel(k);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid kernel: ") + e.what(), s.line("rows"));
      }
      return k;
    }
    if (type == "gaussian") {
      auto mean = s.reals("mean");
      return gaussian_walk(mean, s.has("cov") ? s.matrix("cov") : Matrix{{1.0}});
    }
    if (type == "lattice") {
      auto probs = s.reals("probs");
      return lattice_table_walk(s.integers("values"), probs);
    }
    if (type == "constant") return constant_walk(s.integer("step", 1));
    if (type == "stable") return kernel::StableWalk{s.real("alpha"), s.real("scale", 1.0), s.real("skew", 0.0)};
    if (type == "mminf") return kernel::MMInfQueue{s.real("lambda", 1.0), s.real("mu", 1.0)};
    if (type == "kdiscrete") {
      auto shifts = s.integers("shifts");
      return kernel::KDiscrete{static_cast<int>(shifts.size()), shifts, {}};
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid kernel: ") + e.what(), s.line("type"));
  }
  throw ConfigError("unknown kernel type '" + type + "'", s.line("type"));
}

Colour parse_colour(const std::string& tok, const ReplacementKernel& k, int line) {
  if (std::holds_alternative<kernel::DColour>(k)) return FiniteIndex{static_cast<int>(Section::parse_int(tok, line))};
  if (std::holds_alternative<kernel::StableWalk>(k)) return make_real({Section::parse_real(tok, line)});
  if (const auto* w = std::get_if<kernel::RandomWalk>(&k); w && !w->lattice) {
    std::vector<double> v;
    for (const auto& c : split(tok, ',')) v.push_back(Section::parse_real(c, line));
    return make_real(v);
  }
  return Colour{Section::parse_int(tok, line)};
}

// atoms = colour:weight; colour:weight ... with comma-separated components for vector colours.
AtomicMeasure build_m0(const Section& s, const ReplacementKernel& k) {
  const auto& v = s.raw("atoms");
  AtomicMeasure m;
  for (const auto& item : split(v.text, ';')) {
    auto colon = item.find(':');
    std::string colour = trim(item.substr(0, colon));
    double w = colon == std::string::npos ? 1.0 : Section::parse_real(trim(item.substr(colon + 1)), v.line);
    if (!(w > 0.0)) throw ConfigError("atom weights must be positive", v.line);
    m.add(parse_colour(colour, k, v.line), w);
  }
  if (m.empty()) throw ConfigError("m0 has no atoms", v.line);
  return m;
}

ReferenceLaw parse_law(const std::string& text, int line) {
  auto parts = split(text, ':');
  if (parts.empty()) throw ConfigError("empty law", line);
  auto num = [&](std::size_t i, double fallback) {
    return parts.size() > i ? Section::parse_real(parts[i], line) : fallback;
  };
  if (parts[0] == "normal") return law::Normal{num(1, 0.0), num(2, 1.0)};
  if (parts[0] == "poisson") return law::Poisson{num(1, 1.0)};
  if (parts[0] == "uniform") return law::Uniform01{};
  throw ConfigError("unknown law '" + text + "'", line);
}

RenormalisationPlan build_plan(const Section& s) {
  const std::string preset = s.str("preset");
  try {
    if (preset == "brw") return presets::brw(s.real("m", 0.0), s.real("sigma2", 1.0));
    if (preset == "ergodic") return presets::ergodic(parse_law(s.str("law"), s.line("law")));
    if (preset == "stable")
      return presets::stable(s.real("alpha"), s.real("scale", 1.0), s.real("skew", 0.0), s.real("m", 0.0));
    if (preset == "kdiscrete")
      return presets::kdiscrete(static_cast<int>(s.integer("kappa", 2)), s.real("m", 0.0), s.real("sigma2", 1.0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid plan: ") + e.what(), s.line("preset"));
  }
  throw ConfigError("unknown plan preset '" + preset + "'", s.line("preset"));
}

}  // namespace

ConfigError::ConfigError(const std::string& msg, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}

const std::map<std::string, ConfigValue>& ConfigFile::section(const std::string& name) const {
  auto it = sections.find(name);
  if (it == sections.end()) throw ConfigError("missing section [" + name + "]");
  return it->second;
}

ConfigFile parse_config_text(const std::string& text) {
  ConfigFile f;
  std::istringstream is(text);
  std::string raw, current;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string l = trim(raw.substr(0, raw.find('#')));
    // A ';' inside a value separates list items, so only a leading ';' starts a comment.
    if (l.empty() || l.front() == ';') continue;
    if (l.front() == '[') {
      if (l.back() != ']' || l.size() < 3) throw ConfigError("malformed section header '" + l + "'", line);
      current = trim(l.substr(1, l.size() - 2));
      if (f.sections.count(current)) throw ConfigError("duplicate section [" + current + "]", line);
      f.sections[current];
      f.section_lines[current] = line;
      continue;
    }
    auto eq = l.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + l + "'", line);
    if (current.empty()) throw ConfigError("key outside of any section", line);
    std::string key = trim(l.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key", line);
    auto& sec = f.sections[current];
    if (sec.count(key)) throw ConfigError("duplicate key '" + key + "'", line);
    sec[key] = {trim(l.substr(eq + 1)), line};
  }
  return f;
}

ConfigFile load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ExperimentConfig build_experiment(const ConfigFile& f) {
  ExperimentConfig c;
  for (const char* required : {"experiment", "kernel", "m0", "plan", "run"})
    if (!f.has(required)) throw ConfigError(std::string("missing section [") + required + "]");
  Section exp(f, "experiment"), ker(f, "kernel"), m0(f, "m0"), plan(f, "plan"), run(f, "run");
  c.name = exp.str("name");
  if (c.name.empty() || c.name.find_first_of("/\\ ") != std::string::npos)
    throw ConfigError("experiment name must be a non-empty word", exp.line("name"));
  std::string kind = exp.str("kind", "theorem");
  if (kind == "theorem")
    c.kind = ExperimentKind::Theorem;
  else if (kind == "profile")
    c.kind = ExperimentKind::Profile;
  else
    throw ConfigError("unknown experiment kind '" + kind + "'", exp.line("kind"));

  c.kernel = build_kernel(ker);
  c.m0 = build_m0(m0, c.kernel);
  c.plan = build_plan(plan);

  c.n_grid = run.integers("n_grid");
  for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
    if (c.n_grid[i] < 1) throw ConfigError("n_grid entries must be positive", run.line("n_grid"));
    if (i > 0 && c.n_grid[i] <= c.n_grid[i - 1]) throw ConfigError("n_grid must be strictly increasing", run.line("n_grid"));
  }
  std::int64_t replicas = run.integer("replicas", 1);
  if (replicas < 1) throw ConfigError("replicas must be at least 1", run.line("replicas"));
  c.replicas = static_cast<std::size_t>(replicas);
  std::int64_t pairs = run.integer("pairs", 10);
  if (pairs < 1) throw ConfigError("pairs must be at least 1", run.line("pairs"));
  c.pairs = static_cast<std::size_t>(pairs);
  if (run.has("direction")) c.direction = run.reals("direction");
  std::int64_t seed = run.integer("seed", 1);
  if (seed < 0) throw ConfigError("seed must be non-negative", run.line("seed"));
  c.seed = static_cast<std::uint64_t>(seed);
  c.out_dir = run.str("out", ".");
  c.emit_svg = run.boolean("emit_svg", false);
  return c;
}

}  // namespace mvpp
