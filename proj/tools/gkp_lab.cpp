#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "experiments.hpp"
#include "gkp/common.hpp"

using namespace gkplab;

namespace {

struct Config {
  std::string experiment;
  bool figure = false;
  json params = json::object();
  std::uint64_t seed = 1;
  json threads = 1;  // integer or "auto"
  bool threads_set = false;
  std::string output;
  bool gnuplot = false;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string flag_name(std::string s) {
  for (auto& ch : s)
    if (ch == '_') ch = '-';
  return s;
}

json parse_value(const ParamSpec& p, const std::string& text) {
  const std::string where = "--" + flag_name(p.name);
  auto number = [&] {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw ConfigError(where + " expects a number, got '" + text + "'");
    }
    if (used != text.size()) throw ConfigError(where + " expects a number, got '" + text + "'");
    return v;
  };
  switch (p.type) {
    case ParamType::Real:
      return number();
    case ParamType::Integer: {
      double v = number();
      if (v != std::floor(v)) throw ConfigError(where + " expects an integer");
      return static_cast<long>(v);
    }
    case ParamType::Count:
      return number();
    case ParamType::Text:
      return text;
    case ParamType::Flag:
      return true;
  }
  return nullptr;
}

int resolve_threads(const json& t) {
  if (t.is_string()) {
    if (t.get<std::string>() != "auto") throw ConfigError("'threads' must be a positive integer or \"auto\"");
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  if (!t.is_number_integer() || t.get<long>() < 1 || t.get<long>() > 1024)
    throw ConfigError("'threads' must be a positive integer or \"auto\"");
  return static_cast<int>(t.get<long>());
}

json parse_threads(const std::string& s) {
  if (s == "auto") return s;
  try {
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("threads must be a positive integer or \"auto\", got '" + s + "'");
}

void load_config_file(const std::string& path, Config& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed config '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> keys = {"experiment", "params", "seed", "output", "threads", "gnuplot"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
      throw ConfigError("unknown config key '" + it.key() + "'");
  if (j.contains("experiment")) {
    if (!j["experiment"].is_string()) throw ConfigError("'experiment' must be a string");
    cfg.experiment = j["experiment"];
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("'params' must be an object");
    cfg.params = j["params"];
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("'output' must be a string");
    cfg.output = j["output"];
  }
  if (j.contains("threads")) {
    cfg.threads = j["threads"];
    cfg.threads_set = true;
  }
  if (j.contains("gnuplot")) {
    if (!j["gnuplot"].is_boolean()) throw ConfigError("'gnuplot' must be true or false");
    cfg.gnuplot = j["gnuplot"];
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string render_csv(const Table& t, const Config& cfg, const json& params) {
  std::ostringstream os;
  json canonical = {{"experiment", cfg.experiment}, {"params", params}, {"seed", cfg.seed}};
  os << "# gkp-lab " << GKP_VERSION << '\n';
  os << "# experiment: " << cfg.experiment << (cfg.figure ? " (" + t.name + ")" : "") << '\n';
  os << "# config_hash: " << hex(fnv1a(canonical.dump())) << '\n';
  os << "# seed: " << cfg.seed << '\n';
  os << "# params: " << params.dump() << '\n';
  os << "# units: " << t.units << '\n';
  for (const auto& n : t.notes) os << "# note: " << n << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
    os << '\n';
  }
  return os.str();
}

bool numeric(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return *end == '\0';
}

std::string render_gnuplot(const Table& t, const std::string& csv_path) {
  std::ostringstream os;
  const std::string file = std::filesystem::path(csv_path).filename().string();
  os << "set datafile separator ','\n";
  os << "set key autotitle columnhead\n";
  os << "file = '" << file << "'\n";
  std::vector<int> ycols;
  const auto& first = t.rows.empty() ? std::vector<std::string>() : t.rows.front();
  for (std::size_t i = 1; i < first.size(); ++i)
    if (numeric(first[i])) ycols.push_back(static_cast<int>(i) + 1);
  switch (t.plot) {
    case PlotKind::Map: {
      int z = 3;
      for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i] == "rms_sq") z = static_cast<int>(i) + 1;
      os << "set view map\nset xlabel '" << t.columns[0] << "'\nset ylabel '" << t.columns[1] << "'\n";
      os << "splot file using 1:2:" << z << " with points pointtype 5 palette notitle\n";
      break;
    }
    case PlotKind::Lines:
    case PlotKind::LogLines:
    case PlotKind::None: {
      if (t.plot == PlotKind::LogLines) os << "set logscale xy\n";
      const bool indexed = t.plot == PlotKind::None || first.empty() || !numeric(first[0]);
      os << "set xlabel '" << (indexed ? "row" : t.columns[0]) << "'\n";
      os << "plot ";
      for (std::size_t k = 0; k < ycols.size(); ++k)
        os << (k ? ", \\\n     " : "") << "file using " << (indexed ? "0" : "1") << ':' << ycols[k]
           << " with linespoints";
      os << '\n';
      break;
    }
  }
  os << "pause mouse close\n";
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

int execute(Config cfg) {
  const auto& list = cfg.figure ? figures() : experiments();
  const Experiment* e = find_in(list, cfg.experiment);
  if (!e) {
    e = find_in(figures(), cfg.experiment);
    if (!e) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    cfg.figure = true;
  }
  RunContext ctx;
  ctx.params = normalize_params(*e, cfg.params);
  ctx.seed = cfg.seed;
  ctx.threads = resolve_threads(cfg.threads);
  if (cfg.gnuplot && cfg.output.empty() && !cfg.figure) throw ConfigError("--gnuplot needs --out");

  std::vector<Table> tables = e->run(ctx);

  if (cfg.figure) {
    std::string dir = cfg.output.empty() ? cfg.experiment : cfg.output;
    std::filesystem::create_directories(dir);
    for (const auto& t : tables) {
      std::string path = (std::filesystem::path(dir) / (cfg.experiment + "_" + t.name + ".csv")).string();
      write_file(path, render_csv(t, cfg, ctx.params));
      if (cfg.gnuplot) write_file(path + ".gp", render_gnuplot(t, path));
      std::cerr << "wrote " << path << '\n';
    }
    return 0;
  }
  std::string text;
  for (std::size_t i = 0; i < tables.size(); ++i) text += (i ? "\n" : "") + render_csv(tables[i], cfg, ctx.params);
  if (cfg.output.empty()) {
    std::cout << text;
  } else {
    write_file(cfg.output, text);
    if (cfg.gnuplot) write_file(cfg.output + ".gp", render_gnuplot(tables.front(), cfg.output));
  }
  return 0;
}

// Accept "fock sbs ..." and "lattice info <name>" as spellings of the flat commands.
std::vector<std::string> rewrite_args(int argc, char** argv) {
  std::vector<std::string> a(argv + 1, argv + argc);
  static const std::map<std::string, std::string> fock = {
      {"sbs", "fock-sbs"}, {"lindblad", "fock-lindblad"}, {"spectrum", "fock-spectrum"}, {"wigner", "wigner"}};
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    if (a[i] == "fock" && fock.count(a[i + 1])) {
      a[i] = fock.at(a[i + 1]);
      a.erase(a.begin() + static_cast<long>(i) + 1);
      break;
    }
    if (a[i] == "lattice" && a[i + 1] == "info") {
      a[i] = "lattice-info";
      a.erase(a.begin() + static_cast<long>(i) + 1);
      if (i + 1 < a.size() && !a[i + 1].empty() && a[i + 1][0] != '-') a.insert(a.begin() + static_cast<long>(i) + 1, "--name");
      break;
    }
  }
  std::reverse(a.begin(), a.end());
  return a;
}

struct Bound {
  CLI::App* app;
  const Experiment* exp;
  bool figure;
  std::map<std::string, std::string> text;
  std::map<std::string, bool> flags;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GKP code laboratory: lattices, Monte Carlo decoding, O2O codes, Fock-space simulation"};
  app.set_version_flag("--version", std::string(GKP_VERSION));
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::string config_path, seed_text, threads_text, out;
  bool gnuplot = false, dump_config = false;
  app.add_option("--config", config_path, "JSON config {experiment, params, seed, output, threads, gnuplot}");
  app.add_option("--seed", seed_text, "master seed (64-bit)");
  app.add_option("--threads", threads_text, "worker threads or 'auto' (fallback: GKPLAB_THREADS)");
  app.add_option("--out", out, "output CSV path (directory for reproduce)");
  app.add_flag("--gnuplot", gnuplot, "also write a gnuplot script next to each CSV");
  app.add_flag("--dump-config", dump_config, "print the normalized config as JSON and exit");

  std::vector<std::unique_ptr<Bound>> bound;
  auto bind = [&](CLI::App* parent, const Experiment& e, bool figure) {
    auto b = std::make_unique<Bound>();
    b->app = parent->add_subcommand(e.name, e.help);
    b->app->fallthrough();
    b->exp = &e;
    b->figure = figure;
    for (const auto& p : e.params) {
      std::string help = p.help + " [" + (p.def.is_string() ? p.def.get<std::string>() : p.def.dump()) + "]";
      if (p.type == ParamType::Flag)
        b->app->add_flag("--" + flag_name(p.name), b->flags[p.name], help);
      else
        b->app->add_option("--" + flag_name(p.name), b->text[p.name], help);
    }
    bound.push_back(std::move(b));
  };
  for (const auto& e : experiments()) bind(&app, e, false);
  CLI::App* reproduce = app.add_subcommand("reproduce", "run a canned figure sweep into a CSV bundle");
  reproduce->require_subcommand(1);
  reproduce->fallthrough();
  for (const auto& e : figures()) bind(reproduce, e, true);

  try {
    app.parse(rewrite_args(argc, argv));
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Config cfg;
    if (!config_path.empty()) load_config_file(config_path, cfg);
    for (const auto& b : bound) {
      if (!b->app->parsed()) continue;
      if (!cfg.experiment.empty() && cfg.experiment != b->exp->name)
        throw ConfigError("command '" + b->exp->name + "' conflicts with config experiment '" + cfg.experiment + "'");
      cfg.experiment = b->exp->name;
      cfg.figure = b->figure;
      for (const auto& p : b->exp->params) {
        if (p.type == ParamType::Flag) {
          if (b->flags[p.name]) cfg.params[p.name] = true;
        } else if (b->app->count("--" + flag_name(p.name))) {
          cfg.params[p.name] = parse_value(p, b->text[p.name]);
        }
      }
    }
    if (cfg.experiment.empty()) {
      std::cerr << app.help();
      return 2;
    }
    if (!seed_text.empty()) {
      std::size_t used = 0;
      try {
        cfg.seed = std::stoull(seed_text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != seed_text.size() || seed_text[0] == '-')
        throw ConfigError("--seed expects a non-negative integer");
    }
    if (!threads_text.empty()) {
      cfg.threads = parse_threads(threads_text);
    } else if (!cfg.threads_set) {
      if (const char* env = std::getenv("GKPLAB_THREADS"); env && *env) cfg.threads = parse_threads(env);
    }
    if (!out.empty()) cfg.output = out;
    if (gnuplot) cfg.gnuplot = true;
    if (dump_config) {
      const Experiment* e = find_in(cfg.figure ? figures() : experiments(), cfg.experiment);
      if (!e) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
      resolve_threads(cfg.threads);
      json j = {{"experiment", cfg.experiment}, {"params", normalize_params(*e, cfg.params)},
                {"seed", cfg.seed},             {"threads", cfg.threads},
                {"gnuplot", cfg.gnuplot}};
      if (!cfg.output.empty()) j["output"] = cfg.output;
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    return execute(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "gkp-lab: config error: " << e.what() << '\n';
    return 2;
  } catch (const gkp::Error& e) {
    std::cerr << "gkp-lab: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "gkp-lab: " << e.what() << '\n';
    return 3;
  }
}
