#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace gkplab {

using json = nlohmann::json;

// Bad user input: reported with exit code 2 before any output is written.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ParamType { Real, Integer, Count, Text, Flag };

struct ParamSpec {
  std::string name;  // JSON key; the command-line flag uses dashes
  ParamType type;
  json def;
  std::string help;
};

enum class PlotKind { None, Lines, LogLines, Map };

struct Table {
  std::string name;  // file stem inside a reproduce bundle
  std::string units;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;
  PlotKind plot = PlotKind::Lines;
};

struct RunContext {
  json params;  // normalized: every key present, typed
  std::uint64_t seed = 1;
  int threads = 1;
};

struct Experiment {
  std::string name, help;
  std::vector<ParamSpec> params;
  std::function<std::vector<Table>(const RunContext&)> run;
};

const std::vector<Experiment>& experiments();
const std::vector<Experiment>& figures();
const Experiment* find_in(const std::vector<Experiment>& list, const std::string& name);

// Fills defaults and checks keys and types; throws ConfigError.
json normalize_params(const Experiment& e, const json& given);

std::string fmt(double v);

}  // namespace gkplab
