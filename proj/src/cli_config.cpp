#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "mdp/cli.hpp"
#include "mdp/errors.hpp"
#include "mdp/format.hpp"

namespace mdp {

namespace {

const std::set<std::string> kCommands = {"rate-curve", "clt-check", "lln-check",
                                         "legendre",   "path-rate", "validate"};

const std::set<std::string>& command_keys(const std::string& command) {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"rate-curve",
       {"dist", "n", "r", "an_exponent", "replications", "horizon", "t_grid", "tail",
        "seed"}},
      {"clt-check", {"dist", "n", "r", "replications", "seed"}},
      {"lln-check", {"dist", "r", "n_list", "replications", "seed"}},
      {"legendre", {"dist", "x", "x_grid", "seed"}},
      {"path-rate",
       {"dist", "sigma2", "path_file", "endpoint_a", "endpoint_T", "segments", "seed"}},
      {"validate", {"dist", "seed"}},
  };
  return keys.at(command);
}

bool known_anywhere(const std::string& key) {
  if (key == "version" || key == "command") return true;
  for (const auto& c : kCommands) {
    if (command_keys(c).count(key)) return true;
  }
  return false;
}

std::map<std::string, std::string> command_defaults(const std::string& command) {
  if (command == "rate-curve") {
    return {{"dist", "exponential:1"}, {"n", "100"},          {"r", "0.25"},
            {"an_exponent", "0.9"},    {"replications", "10000"}, {"horizon", "auto"},
            {"t_grid", "linspace:0.025:1:40"}, {"tail", "upper"}, {"seed", "42"}};
  }
  if (command == "clt-check") {
    return {{"dist", "poisson:1"}, {"n", "10000"}, {"r", "0.25"},
            {"replications", "5000"}, {"seed", "42"}};
  }
  if (command == "lln-check") {
    return {{"dist", "exponential:1"}, {"r", "0.25"}, {"n_list", "100,1000,10000"},
            {"replications", "1000"}, {"seed", "42"}};
  }
  if (command == "legendre") {
    return {{"dist", "normal:0,1"}, {"x_grid", "linspace:-3:3:25"}, {"seed", "42"}};
  }
  if (command == "path-rate") {
    return {{"dist", "normal:0,1"}, {"sigma2", "auto"}, {"segments", "8"}, {"seed", "42"}};
  }
  if (command == "validate") {
    return {{"dist", "exponential:1"}, {"seed", "42"}};
  }
  throw UsageError("unknown command: " + command);
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

// Parses the sectioned key=value format. Returns global keys and per-section
// maps, validating every key against its section's command.
struct ParsedFile {
  std::map<std::string, std::string> global;
  std::map<std::string, std::map<std::string, std::string>> sections;
};

ParsedFile parse_config_text(const std::string& text) {
  ParsedFile out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      if (!kCommands.count(section)) {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unknown section [" + section + "]");
      }
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      if (!known_anywhere(key)) {
        throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" +
                          key + "'");
      }
      out.global[key] = value;
    } else {
      if (!command_keys(section).count(key)) {
        throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" +
                          key + "' in section [" + section + "]");
      }
      out.sections[section][key] = value;
    }
  }
  return out;
}

}  // namespace

std::optional<std::string> preset_text(const std::string& name) {
  if (name == "example1") {
    return std::string(
        "version=1\n"
        "[rate-curve]\n"
        "dist=exponential:1\n"
        "n=100\n"
        "r=0.25\n"
        "an_exponent=0.9\n"
        "replications=10000\n"
        "horizon=auto\n"
        "t_grid=linspace:0.025:1:40\n"
        "tail=upper\n"
        "seed=42\n");
  }
  if (name == "example2") {
    return std::string(
        "version=1\n"
        "[rate-curve]\n"
        "dist=poisson:1\n"
        "n=100\n"
        "r=0.25\n"
        "an_exponent=0.9\n"
        "replications=10000\n"
        "horizon=auto\n"
        "t_grid=linspace:0.025:1:40\n"
        "tail=upper\n"
        "seed=42\n");
  }
  return std::nullopt;
}

CliConfig parse_args(const std::vector<std::string>& args) {
  if (args.empty()) {
    throw UsageError(
        "usage: mdp rate-curve|clt-check|lln-check|legendre|path-rate|validate "
        "[--config FILE] [--set key=value]... [--out DIR] [--plot] [--raw] "
        "[--seed N] [--threads N]");
  }
  CliConfig cli;
  cli.command = args[0];
  if (!kCommands.count(cli.command)) {
    throw UsageError("unknown command: " + cli.command);
  }
  for (size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    auto need_value = [&](const char* flag) -> const std::string& {
      if (i + 1 >= args.size()) throw UsageError(std::string(flag) + " needs a value");
      return args[++i];
    };
    if (a == "--config") {
      cli.config_path = need_value("--config");
    } else if (a == "--set") {
      const std::string& kv = need_value("--set");
      const size_t eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value");
      cli.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    } else if (a == "--out") {
      cli.output_dir = need_value("--out");
    } else if (a == "--plot") {
      cli.plot = true;
    } else if (a == "--raw") {
      cli.raw = true;
    } else if (a == "--seed") {
      cli.seed = parse_uint64(need_value("--seed"));
    } else if (a == "--threads") {
      cli.threads = static_cast<int>(parse_int(need_value("--threads")));
      if (cli.threads < 0) throw UsageError("--threads must be >= 0");
    } else {
      throw UsageError("unknown flag: " + a);
    }
  }
  return cli;
}

std::map<std::string, std::string> resolve_keys(const CliConfig& cli) {
  const auto& valid = command_keys(cli.command);
  std::map<std::string, std::string> keys = command_defaults(cli.command);

  if (cli.config_path) {
    std::string text;
    if (auto preset = preset_text(*cli.config_path)) {
      text = *preset;
    } else {
      std::ifstream in(*cli.config_path);
      if (!in) throw ConfigError("cannot read config file: " + *cli.config_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    const ParsedFile parsed = parse_config_text(text);
    for (const auto& [k, v] : parsed.global) {
      if (valid.count(k)) keys[k] = v;
    }
    auto it = parsed.sections.find(cli.command);
    if (it != parsed.sections.end()) {
      for (const auto& [k, v] : it->second) keys[k] = v;
    }
  }

  if (const char* env = std::getenv("MDP_SEED")) {
    keys["seed"] = env;
    parse_uint64(keys["seed"]);  // validate early
  }
  for (const auto& [k, v] : cli.overrides) {
    if (!valid.count(k)) {
      throw ConfigError("unknown key '" + k + "' for command " + cli.command);
    }
    keys[k] = v;
  }
  if (cli.seed) keys["seed"] = format_int(static_cast<int64_t>(*cli.seed));
  return keys;
}

DistributionSpec parse_dist(const std::string& text) {
  const size_t colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) parts.push_back(item);
    return parts;
  };
  if (kind == "exponential") {
    return DistributionSpec::exponential(parse_double(rest));
  }
  if (kind == "poisson") {
    return DistributionSpec::poisson(parse_double(rest));
  }
  if (kind == "normal") {
    const auto parts = split(rest, ',');
    if (parts.size() != 2) throw ConfigError("normal wants mean,stdev: " + text);
    return DistributionSpec::normal(parse_double(parts[0]), parse_double(parts[1]));
  }
  if (kind == "bernoulli") {
    const auto parts = split(rest, ',');
    if (parts.size() != 2) throw ConfigError("bernoulli wants p,offset: " + text);
    return DistributionSpec::bernoulli_shifted(parse_double(parts[0]), parse_double(parts[1]));
  }
  if (kind == "table") {
    std::vector<std::pair<double, double>> atoms;
    for (const auto& entry : split(rest, ',')) {
      const size_t at = entry.find('@');
      if (at == std::string::npos) {
        throw ConfigError("table wants value@prob entries: " + text);
      }
      atoms.emplace_back(parse_double(entry.substr(0, at)),
                         parse_double(entry.substr(at + 1)));
    }
    return DistributionSpec::table(std::move(atoms));
  }
  throw ConfigError("unknown distribution: " + text);
}

namespace {

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.rfind("linspace:", 0) == 0) {
    std::istringstream in(text.substr(9));
    std::string lo_s, hi_s, k_s;
    if (!std::getline(in, lo_s, ':') || !std::getline(in, hi_s, ':') ||
        !std::getline(in, k_s, ':')) {
      throw ConfigError("linspace wants lo:hi:count: " + text);
    }
    const double lo = parse_double(lo_s);
    const double hi = parse_double(hi_s);
    const int64_t k = parse_int(k_s);
    if (k < 1) throw ConfigError("linspace count must be >= 1");
    for (int64_t i = 0; i < k; ++i) {
      grid.push_back(k == 1 ? hi : lo + (hi - lo) * static_cast<double>(i) /
                                            static_cast<double>(k - 1));
    }
    return grid;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) grid.push_back(parse_double(item));
  return grid;
}

}  // namespace

ExperimentConfig make_experiment_config(const std::map<std::string, std::string>& keys) {
  ExperimentConfig config;
  config.dist = parse_dist(keys.at("dist"));
  config.n = parse_int(keys.at("n"));
  config.r = parse_double(keys.at("r"));
  config.an_exponent = parse_double(keys.at("an_exponent"));
  config.replications = parse_int(keys.at("replications"));
  config.master_seed = parse_uint64(keys.at("seed"));
  const std::string& horizon = keys.at("horizon");
  config.horizon = horizon == "auto" ? 0.0 : parse_double(horizon);
  const std::string& tail = keys.at("tail");
  if (tail == "upper") {
    config.tail = Tail::Upper;
  } else if (tail == "lower") {
    config.tail = Tail::Lower;
  } else if (tail == "both") {
    config.tail = Tail::Both;
  } else {
    throw ConfigError("tail must be upper, lower or both");
  }
  const std::string& grid = keys.at("t_grid");
  config.t_grid = grid == "auto"
                      ? default_t_grid(config.dist, config.n, config.r,
                                       config.an_exponent, config.replications)
                      : parse_grid(grid);
  config.validate();
  return config;
}

std::string manifest_text(const std::string& command,
                          const std::map<std::string, std::string>& keys) {
  std::string out = "version=1\ncommand=" + command + "\n[" + command + "]\n";
  for (const auto& [k, v] : keys) out += k + "=" + v + "\n";
  return out;
}

}  // namespace mdp
