// Command line front end: builds multiphoton coherent states for bilayer
// graphene and writes coefficient tables, observables, densities, time
// series and period estimates as deterministic CSV/JSON.
#include <algorithm>
#include <atomic>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "bgmcs/io.hpp"

namespace {

struct CommonOpts {
  int m = 1;
  int j = 0;
  double r = 0.0;
  double theta = 0.0;
  double omega_c = 1.0;
  double k = 0.0;
  double tol = bgmcs::kDefaultTol;
  int n_cap = bgmcs::kDefaultNCap;
  std::vector<double> f_values;
  std::string out;
  std::string config_file;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--m", o.m, "annihilation power m (>= 1)");
  cmd->add_option("--j", o.j, "sector offset j, 0 <= j < m");
  cmd->add_option("--r", o.r, "modulus of the eigenvalue alpha")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--theta", o.theta, "phase of the eigenvalue alpha, radians");
  cmd->add_option("--omega-c", o.omega_c, "effective cyclotron frequency");
  cmd->add_option("--k", o.k, "plane-wave number along y");
  cmd->add_option("--tol", o.tol, "relative amplitude tolerance of the tail cutoff");
  cmd->add_option("--n-cap", o.n_cap, "highest Fock level ever retained");
  cmd->add_option("--f", o.f_values,
                  "weight table f(1),f(2),... (comma separated; f(n)=1 past the end)")
      ->delimiter(',');
  cmd->add_option("--out", o.out, "output file; '-' or empty writes to stdout");
  cmd->add_option("--config", o.config_file,
                  "flat key=value file of long option names; flags override");
}

std::string trimmed(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

// The config file is expanded into --key=value tokens inserted right after
// the subcommand name. Keys already present on the command line are skipped,
// which is what makes explicit flags win.
void expand_config_tokens(std::vector<std::string>& tokens) {
  std::string path;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == "--config" && i + 1 < tokens.size())
      path = tokens[i + 1];
    else if (tokens[i].rfind("--config=", 0) == 0)
      path = tokens[i].substr(9);
  }
  if (path.empty()) return;
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open " + path);

  std::set<std::string> given;
  for (const auto& t : tokens)
    if (t.rfind("--", 0) == 0) given.insert(t.substr(0, t.find('=')));

  std::vector<std::string> injected;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string body = trimmed(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::runtime_error("config: line " + std::to_string(lineno) +
                               " is not key=value");
    const std::string key = trimmed(body.substr(0, eq));
    std::string val = trimmed(body.substr(eq + 1));
    if (val.size() >= 2 && (val.front() == '"' || val.front() == '\'') &&
        val.back() == val.front())
      val = val.substr(1, val.size() - 2);
    const std::string flag = "--" + key;
    if (given.count(flag)) continue;
    injected.push_back(flag + "=" + val);
  }
  tokens.insert(tokens.begin() + 1, injected.begin(), injected.end());
}

bgmcs::ModelParams make_params(const CommonOpts& o) {
  bgmcs::ModelParams p;
  p.omega_c = o.omega_c;
  p.wavenumber = o.k;
  p.m_order = o.m;
  p.j_index = o.j;
  p.alpha = std::polar(o.r, o.theta);
  p.tol = o.tol;
  p.n_cap = o.n_cap;
  if (!o.f_values.empty()) p.weight = bgmcs::WeightFunction::from_table(o.f_values);
  p.validate();
  return p;
}

// Output is composed fully in memory first, so a failed run never leaves a
// partially written file behind.
void write_output(const std::string& body, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + path);
  f << body;
  f.flush();
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

// Accepts "lo..hi:N", a comma list, or a single number.
std::vector<double> parse_grid_spec(const std::string& spec) {
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const auto colon = spec.find(':', dots + 2);
    if (colon == std::string::npos)
      throw std::invalid_argument("grid spec '" + spec + "' needs the form lo..hi:N");
    const double lo = std::stod(spec.substr(0, dots));
    const double hi = std::stod(spec.substr(dots + 2, colon - dots - 2));
    const int n = std::stoi(spec.substr(colon + 1));
    if (n < 1) throw std::invalid_argument("grid spec '" + spec + "' needs N >= 1");
    if (n == 1) return {lo};
    return bgmcs::linspace(lo, hi, n);
  }
  std::vector<double> values;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    values.push_back(std::stod(item));
  }
  if (values.empty()) throw std::invalid_argument("empty grid spec '" + spec + "'");
  return values;
}

unsigned scan_thread_count(std::size_t points) {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MCS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) threads = static_cast<unsigned>(v);
  }
  if (static_cast<std::size_t>(threads) > points)
    threads = static_cast<unsigned>(points);
  return threads;
}

void run_coeffs(const CommonOpts& o, const std::string& format) {
  const auto table = bgmcs::normalize(bgmcs::build_coefficients(make_params(o)));
  if (format == "json")
    write_output(bgmcs::table_to_json(table).dump(2) + "\n", o.out);
  else
    write_output(bgmcs::table_to_csv(table), o.out);
}

void run_observables(const CommonOpts& o, const std::string& format, bool skip_check) {
  const auto params = make_params(o);
  const auto table = bgmcs::normalize(bgmcs::build_coefficients(params));
  const auto check = skip_check ? bgmcs::CrossCheck::off : bgmcs::CrossCheck::on;
  const auto rep = bgmcs::uncertainty_product(table, check);
  if (format == "json") {
    bgmcs::json j;
    j["params"] = bgmcs::params_to_json(params);
    j["mean_s"] = {rep.mean_s[0], rep.mean_s[1]};
    j["mean_s2"] = {rep.mean_s2[0], rep.mean_s2[1]};
    j["sigma_q"] = rep.sigma_q;
    j["sigma_p"] = rep.sigma_p;
    j["product"] = rep.product;
    j["mean_energy"] = rep.mean_energy;
    write_output(j.dump(2) + "\n", o.out);
  } else {
    write_output(bgmcs::report_csv_header(params) + bgmcs::report_csv_row(params, rep),
                 o.out);
  }
}

void run_scan(const CommonOpts& o, const std::string& r_spec, const std::string& theta_spec,
              const std::string& quantity, bool cross_check) {
  if (quantity != "hur" && quantity != "energy" && quantity != "all")
    throw std::invalid_argument("scan: --quantity must be hur, energy or all");
  const auto rs = parse_grid_spec(r_spec);
  const auto thetas = parse_grid_spec(theta_spec);
  std::vector<bgmcs::ModelParams> grid;
  grid.reserve(rs.size() * thetas.size());
  for (const double r : rs)
    for (const double theta : thetas) {
      CommonOpts point = o;
      point.r = r;
      point.theta = theta;
      grid.push_back(make_params(point));
    }

  std::vector<bgmcs::ObservableReport> results(grid.size());
  std::vector<std::string> failures(grid.size());
  std::atomic<std::size_t> cursor{0};
  const auto check = cross_check ? bgmcs::CrossCheck::on : bgmcs::CrossCheck::off;
  auto worker = [&] {
    for (std::size_t i = cursor.fetch_add(1); i < grid.size(); i = cursor.fetch_add(1)) {
      try {
        const auto table = bgmcs::normalize(bgmcs::build_coefficients(grid[i]));
        results[i] = bgmcs::uncertainty_product(table, check);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const unsigned n_threads = scan_thread_count(grid.size());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!failures[i].empty())
      throw std::runtime_error("scan point " + std::to_string(i) + ": " + failures[i]);

  std::ostringstream out;
  CommonOpts header = o;
  header.r = rs.front();
  header.theta = thetas.front();
  out << "# scan quantity=" << quantity << " points=" << grid.size() << "\n";
  out << bgmcs::report_csv_header(make_params(header));
  for (std::size_t i = 0; i < grid.size(); ++i)
    out << bgmcs::report_csv_row(grid[i], results[i]);
  write_output(out.str(), o.out);
}

void run_density(const CommonOpts& o, const std::string& format, double t, double x_min,
                 double x_max, int x_points, bool custom_range) {
  const auto params = make_params(o);
  const auto table = bgmcs::normalize(bgmcs::build_coefficients(params));
  const auto basis = bgmcs::make_basis(params, table.entries.back().level);
  const auto xs = custom_range ? bgmcs::linspace(x_min, x_max, x_points)
                               : bgmcs::default_grid(basis, x_points);
  const auto grid =
      (t == 0.0) ? bgmcs::density(table, basis, xs) : bgmcs::density(table, basis, xs, t);
  if (format == "json")
    write_output(bgmcs::density_to_json(params, grid).dump(2) + "\n", o.out);
  else
    write_output(bgmcs::density_to_csv(params, grid), o.out);
}

void run_evolve(const CommonOpts& o, double t) {
  const auto params = make_params(o);
  const auto table = bgmcs::normalize(bgmcs::build_coefficients(params));
  const auto state = bgmcs::evolve(table, t);
  write_output(bgmcs::state_to_json(params, state, t).dump(2) + "\n", o.out);
}

void run_autocorr(const CommonOpts& o, const std::string& format, double t_min, double t_max,
                  int t_points) {
  const auto params = make_params(o);
  const auto table = bgmcs::normalize(bgmcs::build_coefficients(params));
  const auto series = bgmcs::autocorrelation(table, bgmcs::linspace(t_min, t_max, t_points));
  if (format == "json") {
    bgmcs::json j;
    j["params"] = bgmcs::params_to_json(params);
    j["t"] = series.t;
    bgmcs::json re = bgmcs::json::array(), im = bgmcs::json::array(),
                abs2 = bgmcs::json::array();
    for (const auto& c : series.c) {
      re.push_back(c.real());
      im.push_back(c.imag());
      abs2.push_back(std::norm(c));
    }
    j["re"] = re;
    j["im"] = im;
    j["abs2"] = abs2;
    write_output(j.dump(2) + "\n", o.out);
  } else {
    write_output(bgmcs::autocorr_to_csv(params, series), o.out);
  }
}

void run_period(const CommonOpts& o, double t_max, int t_points, double threshold) {
  const auto params = make_params(o);
  const auto table = bgmcs::normalize(bgmcs::build_coefficients(params));
  const auto spectral = bgmcs::spectral_period(table);
  const auto series = bgmcs::autocorrelation(table, bgmcs::linspace(0.0, t_max, t_points));
  const auto peaks = bgmcs::revival_times(series, threshold);
  std::optional<double> tau_corr;
  if (!peaks.empty()) tau_corr = peaks.front();
  const auto j = bgmcs::period_to_json(params, spectral, bgmcs::revival_period(params),
                                       tau_corr, threshold);
  write_output(j.dump(2) + "\n", o.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiphoton coherent states for bilayer graphene in a magnetic field"};
  app.name("bgmcs");
  app.require_subcommand(1);

  CommonOpts coeffs_opts;
  std::string coeffs_format = "json";
  auto* coeffs = app.add_subcommand("coeffs", "write the coefficient table");
  add_common(coeffs, coeffs_opts);
  coeffs->add_option("--format", coeffs_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  CommonOpts obs_opts;
  std::string obs_format = "csv";
  bool obs_skip_check = false;
  auto* obs = app.add_subcommand("observables", "uncertainty product and mean energy");
  add_common(obs, obs_opts);
  obs->add_option("--format", obs_format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}));
  obs->add_flag("--skip-cross-check", obs_skip_check,
                "skip the matrix-element consistency check");

  CommonOpts scan_opts;
  std::string scan_r = "0..1:11";
  std::string scan_theta = "0";
  std::string scan_quantity = "all";
  bool scan_cross = false;
  auto* scan = app.add_subcommand("scan", "observables over an alpha grid (CSV)");
  add_common(scan, scan_opts);
  scan->remove_option(scan->get_option("--r"));
  scan->remove_option(scan->get_option("--theta"));
  scan->add_option("--r", scan_r, "r grid: lo..hi:N, comma list, or single value");
  scan->add_option("--theta", scan_theta, "theta grid: lo..hi:N, comma list, or single value");
  scan->add_option("--quantity", scan_quantity, "hur, energy or all (row schema is fixed)");
  scan->add_flag("--cross-check", scan_cross,
                 "run the matrix-element consistency check at every point");

  CommonOpts dens_opts;
  std::string dens_format = "csv";
  double dens_t = 0.0, dens_xmin = 0.0, dens_xmax = 0.0;
  int dens_points = 2001;
  auto* dens = app.add_subcommand("density", "position probability density");
  add_common(dens, dens_opts);
  dens->add_option("--format", dens_format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}));
  dens->add_option("--t", dens_t, "evolution time");
  auto* xmin_opt = dens->add_option("--x-min", dens_xmin, "grid start (default: auto span)");
  auto* xmax_opt = dens->add_option("--x-max", dens_xmax, "grid end (default: auto span)");
  dens->add_option("--x-points", dens_points, "number of grid points");

  CommonOpts evolve_opts;
  double evolve_t = 0.0;
  auto* evolve = app.add_subcommand("evolve", "time-evolved state amplitudes (JSON)");
  add_common(evolve, evolve_opts);
  evolve->add_option("--t", evolve_t, "evolution time")->required();

  CommonOpts auto_opts;
  std::string auto_format = "csv";
  double auto_tmin = 0.0, auto_tmax = 25.0;
  int auto_points = 5001;
  auto* autoc = app.add_subcommand("autocorr", "autocorrelation time series");
  add_common(autoc, auto_opts);
  autoc->add_option("--format", auto_format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}));
  autoc->add_option("--t-min", auto_tmin, "window start");
  autoc->add_option("--t-max", auto_tmax, "window end");
  autoc->add_option("--t-points", auto_points, "number of samples");

  CommonOpts period_opts;
  double period_tmax = 25.0, period_threshold = 0.9;
  int period_points = 5001;
  auto* period = app.add_subcommand("period", "spectral and revival period estimate (JSON)");
  add_common(period, period_opts);
  period->add_option("--t-max", period_tmax, "autocorrelation window end");
  period->add_option("--t-points", period_points, "autocorrelation samples");
  period->add_option("--threshold", period_threshold, "fidelity level counted as a revival");

  try {
    std::vector<std::string> tokens(argv + 1, argv + argc);
    expand_config_tokens(tokens);
    std::reverse(tokens.begin(), tokens.end());
    app.parse(std::move(tokens));
    if (coeffs->parsed()) run_coeffs(coeffs_opts, coeffs_format);
    if (obs->parsed()) run_observables(obs_opts, obs_format, obs_skip_check);
    if (scan->parsed())
      run_scan(scan_opts, scan_r, scan_theta, scan_quantity, scan_cross);
    if (dens->parsed()) {
      const bool has_min = xmin_opt->count() > 0;
      const bool has_max = xmax_opt->count() > 0;
      const bool custom = has_min || has_max;
      if (has_min != has_max)
        throw std::invalid_argument("density: give both --x-min and --x-max or neither");
      run_density(dens_opts, dens_format, dens_t, dens_xmin, dens_xmax, dens_points, custom);
    }
    if (evolve->parsed()) run_evolve(evolve_opts, evolve_t);
    if (autoc->parsed()) run_autocorr(auto_opts, auto_format, auto_tmin, auto_tmax, auto_points);
    if (period->parsed()) run_period(period_opts, period_tmax, period_points, period_threshold);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
