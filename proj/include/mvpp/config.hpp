#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvpp/kernels.hpp"
#include "mvpp/measures.hpp"

namespace mvpp {

// Raised for malformed or incomplete configs; the message starts with "line N:" when a line is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

struct ConfigValue {
  std::string text;
  int line = 0;
};

// Flat `[section]` / `key = value` text; `#` and `;` start comments.
struct ConfigFile {
  std::map<std::string, std::map<std::string, ConfigValue>> sections;
  std::map<std::string, int> section_lines;

  bool has(const std::string& section) const { return sections.count(section) > 0; }
  const std::map<std::string, ConfigValue>& section(const std::string& name) const;
};

ConfigFile parse_config_text(const std::string& text);
ConfigFile load_config_file(const std::string& path);

enum class ExperimentKind { Theorem, Profile };

struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::Theorem;
  ReplacementKernel kernel;
  AtomicMeasure m0;
  RenormalisationPlan plan;
  std::vector<std::int64_t> n_grid;
  std::size_t replicas = 1;
  std::size_t pairs = 10;
  std::vector<double> direction{1.0};
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool emit_svg = false;
};

ExperimentConfig build_experiment(const ConfigFile& f);

}  // namespace mvpp
