#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mdp/cli.hpp"
#include "mdp/errors.hpp"
#include "mdp/format.hpp"
#include "mdp/rate_functions.hpp"

namespace mdp {

namespace {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  if (!out.good()) throw IoError("write failed: " + path.string());
}

std::filesystem::path prepare_output_dir(const CliConfig& cli) {
  std::filesystem::path dir(cli.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec && !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory: " + dir.string());
  }
  return dir;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

std::string rate_curve_csv(const std::vector<RateRow>& rows) {
  std::string out = "t,hits,censored,p_hat,empirical_rate,theoretical_rate,ci_low,ci_high\n";
  for (const RateRow& row : rows) {
    out += format_double(row.t) + "," + format_int(row.hits) + "," +
           format_int(row.censored) + "," + format_double(row.p_hat) + "," +
           format_double(row.empirical_rate) + "," + format_double(row.theoretical_rate) +
           "," + format_double(row.ci_low) + "," + format_double(row.ci_high) + "\n";
  }
  return out;
}

std::string deviations_csv(const std::vector<Deviation>& devs) {
  std::string out = "replication,deviation,censored\n";
  for (size_t i = 0; i < devs.size(); ++i) {
    out += format_int(static_cast<int64_t>(i)) + ",";
    out += devs[i].censored ? "inf" : format_double(devs[i].value);
    out += devs[i].censored ? ",1\n" : ",0\n";
  }
  return out;
}

std::string rate_curve_svg(const std::vector<RateRow>& rows) {
  // Fixed canvas; series carry their data coordinates verbatim and a single
  // transform maps data space to pixels, so the plot never recomputes values.
  const double width = 800, height = 560;
  const double ml = 70, mr = 20, mt = 20, mb = 60;
  const double plot_w = width - ml - mr, plot_h = height - mt - mb;
  double xmax = 0.0, ymax = 0.0;
  for (const RateRow& row : rows) {
    xmax = std::max(xmax, row.t);
    if (std::isfinite(row.empirical_rate)) ymax = std::max(ymax, row.empirical_rate);
    ymax = std::max(ymax, row.theoretical_rate);
  }
  if (xmax <= 0.0) xmax = 1.0;
  if (ymax <= 0.0) ymax = 1.0;
  ymax *= 1.05;
  const double sx = plot_w / xmax, sy = plot_h / ymax;

  std::string emp_points, theo_points;
  for (const RateRow& row : rows) {
    if (std::isfinite(row.empirical_rate)) {
      if (!emp_points.empty()) emp_points += " ";
      emp_points += format_double(row.t) + "," + format_double(row.empirical_rate);
    }
    if (!theo_points.empty()) theo_points += " ";
    theo_points += format_double(row.t) + "," + format_double(row.theoretical_rate);
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\"" << ml + plot_w
      << "\" y2=\"" << mt + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << mt + plot_h << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmax * i / 5.0;
    const double px = ml + sx * xv;
    svg << "<line x1=\"" << px << "\" y1=\"" << mt + plot_h << "\" x2=\"" << px
        << "\" y2=\"" << mt + plot_h + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << mt + plot_h + 20
        << "\" text-anchor=\"middle\" font-size=\"12\">" << tick_label(xv) << "</text>\n";
    const double yv = ymax * i / 5.0;
    const double py = mt + plot_h - sy * yv;
    svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << py << "\" x2=\"" << ml << "\" y2=\""
        << py << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << ml - 9 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-size=\"12\">" << tick_label(yv) << "</text>\n";
  }
  svg << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"14\">t</text>\n";
  svg << "<text x=\"18\" y=\"" << mt + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
      << mt + plot_h / 2 << ")\">rate</text>\n";
  // legend
  svg << "<line x1=\"" << ml + 14 << "\" y1=\"" << mt + 14 << "\" x2=\"" << ml + 44
      << "\" y2=\"" << mt + 14 << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  svg << "<text x=\"" << ml + 50 << "\" y=\"" << mt + 18
      << "\" font-size=\"12\">empirical rate</text>\n";
  svg << "<line x1=\"" << ml + 14 << "\" y1=\"" << mt + 32 << "\" x2=\"" << ml + 44
      << "\" y2=\"" << mt + 32 << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
  svg << "<text x=\"" << ml + 50 << "\" y=\"" << mt + 36
      << "\" font-size=\"12\">theoretical rate</text>\n";
  // data series in data coordinates
  svg << "<g transform=\"translate(" << ml << " " << mt + plot_h << ") scale(" << sx
      << " -" << sy << ")\">\n";
  svg << "<polyline id=\"theoretical\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\""
      << " vector-effect=\"non-scaling-stroke\" points=\"" << theo_points << "\"/>\n";
  svg << "<polyline id=\"empirical\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\""
      << " vector-effect=\"non-scaling-stroke\" points=\"" << emp_points << "\"/>\n";
  svg << "</g>\n</svg>\n";
  return svg.str();
}

namespace {

std::map<std::string, std::string> echo_experiment_keys(const ExperimentConfig& config) {
  std::map<std::string, std::string> keys;
  keys["dist"] = config.dist.describe();
  keys["n"] = format_int(config.n);
  keys["r"] = format_double(config.r);
  keys["an_exponent"] = format_double(config.an_exponent);
  keys["replications"] = format_int(config.replications);
  keys["horizon"] = format_double(config.resolved_horizon());
  std::string grid;
  for (size_t i = 0; i < config.t_grid.size(); ++i) {
    if (i) grid += ",";
    grid += format_double(config.t_grid[i]);
  }
  keys["t_grid"] = grid;
  keys["tail"] = config.tail == Tail::Upper   ? "upper"
                 : config.tail == Tail::Lower ? "lower"
                                              : "both";
  keys["seed"] = format_int(static_cast<int64_t>(config.master_seed));
  return keys;
}

}  // namespace

int cmd_rate_curve(const CliConfig& cli) {
  const auto keys = resolve_keys(cli);
  const ExperimentConfig config = make_experiment_config(keys);

  const auto start = std::chrono::steady_clock::now();
  const std::vector<Deviation> devs = scaled_deviations(config, cli.threads);
  const RateCurve curve = fold_rate_curve(config, devs);
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start).count();

  const auto dir = prepare_output_dir(cli);
  const auto& primary = config.tail == Tail::Lower ? curve.lower : curve.upper;
  write_file(dir / "rate_curve.csv", rate_curve_csv(primary));
  if (config.tail == Tail::Both) {
    write_file(dir / "rate_curve_lower.csv", rate_curve_csv(curve.lower));
  }
  if (cli.plot) write_file(dir / "rate_curve.svg", rate_curve_svg(primary));
  if (cli.raw) write_file(dir / "deviations.csv", deviations_csv(devs));
  write_file(dir / "manifest.txt", manifest_text("rate-curve", echo_experiment_keys(config)));

  std::cout << "rate-curve: " << primary.size() << " rows, " << config.replications
            << " replications (" << curve.censored_total << " censored), "
            << tick_label(wall) << " s -> " << (dir / "rate_curve.csv").string() << "\n";
  return 0;
}

int cmd_clt_check(const CliConfig& cli) {
  const auto keys = resolve_keys(cli);
  const DistributionSpec dist = parse_dist(keys.at("dist"));
  const int64_t n = parse_int(keys.at("n"));
  const double r = parse_double(keys.at("r"));
  const int64_t replications = parse_int(keys.at("replications"));
  const uint64_t seed = parse_uint64(keys.at("seed"));

  const CltReport report = clt_check(dist, n, r, replications, seed, cli.threads);

  const auto dir = prepare_output_dir(cli);
  std::map<std::string, std::string> echo = {
      {"dist", dist.describe()}, {"n", format_int(n)},
      {"r", format_double(r)},   {"replications", format_int(replications)},
      {"seed", keys.at("seed")}};
  write_file(dir / "manifest.txt", manifest_text("clt-check", echo));

  std::cout << "sample_var: " << format_double(report.sample_var) << "\n"
            << "target_var: " << format_double(report.target_var) << "\n"
            << "ks_distance: " << format_double(report.ks_distance) << "\n"
            << "censored: " << report.censored << "\n";
  return 0;
}

int cmd_lln_check(const CliConfig& cli) {
  const auto keys = resolve_keys(cli);
  const DistributionSpec dist = parse_dist(keys.at("dist"));
  const double r = parse_double(keys.at("r"));
  const int64_t replications = parse_int(keys.at("replications"));
  const uint64_t seed = parse_uint64(keys.at("seed"));
  std::vector<int64_t> n_list;
  {
    std::istringstream in(keys.at("n_list"));
    std::string item;
    while (std::getline(in, item, ',')) n_list.push_back(parse_int(item));
  }

  const auto points = lln_check(dist, r, n_list, replications, seed, cli.threads);

  const auto dir = prepare_output_dir(cli);
  std::map<std::string, std::string> echo = {
      {"dist", dist.describe()}, {"r", format_double(r)},
      {"n_list", keys.at("n_list")}, {"replications", format_int(replications)},
      {"seed", keys.at("seed")}};
  write_file(dir / "manifest.txt", manifest_text("lln-check", echo));

  std::cout << "n,median_abs_dev\n";
  for (const LlnPoint& p : points) {
    std::cout << p.n << "," << format_double(p.median_abs_dev) << "\n";
  }
  return 0;
}

int cmd_legendre(const CliConfig& cli) {
  auto keys = resolve_keys(cli);
  const DistributionSpec dist = parse_dist(keys.at("dist"));
  std::vector<double> xs;
  if (keys.count("x")) {
    keys.erase("x_grid");
    xs.push_back(parse_double(keys.at("x")));
  } else {
    const std::string& grid = keys.at("x_grid");
    if (grid.rfind("linspace:", 0) != 0) throw ConfigError("x_grid wants linspace:lo:hi:k");
    std::istringstream in(grid.substr(9));
    std::string lo_s, hi_s, k_s;
    std::getline(in, lo_s, ':');
    std::getline(in, hi_s, ':');
    std::getline(in, k_s, ':');
    const double lo = parse_double(lo_s), hi = parse_double(hi_s);
    const int64_t k = parse_int(k_s);
    if (k < 1) throw ConfigError("x_grid count must be >= 1");
    for (int64_t i = 0; i < k; ++i) {
      xs.push_back(k == 1 ? hi : lo + (hi - lo) * static_cast<double>(i) /
                                          static_cast<double>(k - 1));
    }
  }

  const auto dir = prepare_output_dir(cli);
  std::map<std::string, std::string> echo(keys.begin(), keys.end());
  echo["dist"] = dist.describe();
  write_file(dir / "manifest.txt", manifest_text("legendre", echo));

  std::cout << "x,closed_form,numeric\n";
  for (double x : xs) {
    const auto closed = legendre_closed_form(dist, x);
    std::cout << format_double(x) << ","
              << (closed ? format_double(*closed) : std::string("-")) << ","
              << format_double(legendre_numeric(dist, x)) << "\n";
  }
  return 0;
}

int cmd_path_rate(const CliConfig& cli) {
  const auto keys = resolve_keys(cli);
  const DistributionSpec dist = parse_dist(keys.at("dist"));
  const std::string& sigma2_key = keys.at("sigma2");
  const double sigma2 = sigma2_key == "auto" ? dist.sigma2() : parse_double(sigma2_key);
  const bool have_path = keys.count("path_file") > 0;
  const bool have_endpoint = keys.count("endpoint_a") > 0 || keys.count("endpoint_T") > 0;
  if (!have_path && !have_endpoint) {
    throw ConfigError("path-rate: supply path_file=FILE or endpoint_a=A endpoint_T=T");
  }

  std::ostringstream report;
  if (have_path) {
    std::ifstream in(keys.at("path_file"));
    if (!in) throw ConfigError("cannot read path file: " + keys.at("path_file"));
    std::vector<Knot> knots;
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string t_s, v_s, extra;
      if (!(ls >> t_s)) continue;  // blank line
      if (t_s[0] == '#') continue;
      if (!(ls >> v_s) || (ls >> extra)) {
        throw ConfigError("path file: expected 't value' per line, got: " + line);
      }
      knots.push_back({parse_double(t_s), parse_double(v_s)});
    }
    const PiecewisePath path(std::move(knots));  // validates knot ordering
    report << "path: " << path.knots().size() << " knots, T=" << format_double(path.duration())
           << "\n";
    report << "quadratic_action: " << format_double(quadratic_action(path, sigma2)) << "\n";
    report << "legendre_action: " << format_double(legendre_action(path, dist)) << "\n";
  }
  if (have_endpoint) {
    if (!keys.count("endpoint_a") || !keys.count("endpoint_T")) {
      throw ConfigError("path-rate: endpoint mode needs both endpoint_a and endpoint_T");
    }
    const double a = parse_double(keys.at("endpoint_a"));
    const double T = parse_double(keys.at("endpoint_T"));
    const int segments = static_cast<int>(parse_int(keys.at("segments")));
    report << "endpoint_infimum: " << format_double(endpoint_action_infimum(a, T, sigma2))
           << "\n";
    report << "endpoint_minimized: "
           << format_double(endpoint_action_minimized(a, T, sigma2, segments)) << "\n";
  }

  const auto dir = prepare_output_dir(cli);
  std::map<std::string, std::string> echo(keys.begin(), keys.end());
  echo["dist"] = dist.describe();
  echo["sigma2"] = format_double(sigma2);
  write_file(dir / "manifest.txt", manifest_text("path-rate", echo));
  std::cout << report.str();
  return 0;
}

int cmd_validate(const CliConfig& cli) {
  const auto keys = resolve_keys(cli);
  const DistributionSpec dist = parse_dist(keys.at("dist"));
  const AssumptionReport report = check_assumptions(dist);

  const auto dir = prepare_output_dir(cli);
  std::map<std::string, std::string> echo = {{"dist", dist.describe()},
                                             {"seed", keys.at("seed")}};
  write_file(dir / "manifest.txt", manifest_text("validate", echo));

  std::cout << "dist: " << dist.describe() << "\n";
  std::cout << "mu: " << format_double(dist.mu()) << "\n";
  std::cout << "sigma2: " << format_double(dist.sigma2()) << "\n";
  std::cout << "assumption1: " << (report.assumption1_holds ? "holds" : "fails") << " ("
            << report.assumption1_detail << ")\n";
  if (report.assumption2_holds) {
    const auto& w = *report.assumption2_witness;
    std::cout << "assumption2: holds (theta=" << format_double(w.theta)
              << ", v=" << format_double(w.v) << ", b=" << format_double(w.b) << ")\n";
  } else {
    std::cout << "assumption2: fails (no witness on the searched grid)\n";
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args) {
  try {
    const CliConfig cli = parse_args(args);
    if (cli.command == "rate-curve") return cmd_rate_curve(cli);
    if (cli.command == "clt-check") return cmd_clt_check(cli);
    if (cli.command == "lln-check") return cmd_lln_check(cli);
    if (cli.command == "legendre") return cmd_legendre(cli);
    if (cli.command == "path-rate") return cmd_path_rate(cli);
    if (cli.command == "validate") return cmd_validate(cli);
    throw UsageError("unknown command: " + cli.command);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mdp
