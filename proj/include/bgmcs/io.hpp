// Serialization: coefficient tables to/from JSON, observables / densities /
// autocorrelation series to CSV with '#' metadata headers. All floating
// point goes through 17-significant-digit formatting so files are
// deterministic byte for byte and doubles survive a round trip exactly.
#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bgmcs/dynamics.hpp"
#include "bgmcs/fock.hpp"
#include "bgmcs/states.hpp"
#include "bgmcs/observables.hpp"
#include "bgmcs/wavefunctions.hpp"

namespace bgmcs {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline json params_to_json(const ModelParams& p) {
  json j;
  j["omega_c"] = p.omega_c;
  j["k"] = p.wavenumber;
  j["m"] = p.m_order;
  j["j"] = p.j_index;
  j["alpha_re"] = p.alpha.real();
  j["alpha_im"] = p.alpha.imag();
  j["tol"] = p.tol;
  j["n_cap"] = p.n_cap;
  json w;
  if (p.weight.is_ones()) {
    w["kind"] = "constant-one";
  } else {
    w["kind"] = "user-table";
    w["values"] = p.weight.table_values();
  }
  j["weight"] = w;
  return j;
}

inline ModelParams params_from_json(const json& j) {
  ModelParams p;
  p.omega_c = j.at("omega_c").get<double>();
  p.wavenumber = j.at("k").get<double>();
  p.m_order = j.at("m").get<int>();
  p.j_index = j.at("j").get<int>();
  p.alpha = {j.at("alpha_re").get<double>(), j.at("alpha_im").get<double>()};
  p.tol = j.at("tol").get<double>();
  p.n_cap = j.at("n_cap").get<int>();
  const json& w = j.at("weight");
  const std::string kind = w.at("kind").get<std::string>();
  if (kind == "constant-one") {
    p.weight = WeightFunction::ones();
  } else if (kind == "user-table") {
    p.weight = WeightFunction::from_table(w.at("values").get<std::vector<double>>());
  } else {
    throw std::invalid_argument("params_from_json: unknown weight kind " + kind);
  }
  return p;
}

inline json table_to_json(const CoefficientTable& table) {
  json j;
  j["params"] = params_to_json(table.params);
  json entries = json::array();
  for (const auto& e : table.entries)
    entries.push_back({e.n, e.level, e.coeff.real(), e.coeff.imag()});
  j["entries"] = entries;
  j["norm_const"] = table.norm_const;
  j["tail_bound"] = table.tail_bound;
  return j;
}

inline CoefficientTable table_from_json(const json& j) {
  CoefficientTable table;
  table.params = params_from_json(j.at("params"));
  double sum = 0.0;
  for (const auto& row : j.at("entries")) {
    if (!row.is_array() || row.size() != 4)
      throw std::invalid_argument("table_from_json: entry rows must be [n, level, re, im]");
    CoefficientEntry e;
    e.n = row[0].get<int>();
    e.level = row[1].get<int>();
    e.coeff = {row[2].get<double>(), row[3].get<double>()};
    sum += std::norm(e.coeff);
    table.entries.push_back(e);
  }
  if (table.entries.empty())
    throw std::invalid_argument("table_from_json: no entries");
  table.norm_const = j.at("norm_const").get<double>();
  table.tail_bound = j.at("tail_bound").get<double>();
  table.truncation_n = table.entries.back().n;
  table.normalized = std::abs(sum - 1.0) <= 1e-12;
  return table;
}

// One '# key=value ...' metadata line shared by all CSV writers.
inline std::string csv_metadata(const ModelParams& p) {
  std::ostringstream out;
  out << "# m=" << p.m_order << " j=" << p.j_index
      << " alpha_re=" << format_double(p.alpha.real())
      << " alpha_im=" << format_double(p.alpha.imag())
      << " omega_c=" << format_double(p.omega_c)
      << " k=" << format_double(p.wavenumber)
      << " tol=" << format_double(p.tol)
      << " n_cap=" << p.n_cap
      << " f=" << (p.weight.is_ones() ? "ones" : "table");
  if (!p.weight.is_ones()) {
    out << ":";
    const auto& vals = p.weight.table_values();
    for (std::size_t i = 0; i < vals.size(); ++i)
      out << (i ? "," : "") << format_double(vals[i]);
  }
  out << "\n";
  return out.str();
}

inline std::string table_to_csv(const CoefficientTable& table) {
  std::ostringstream out;
  out << csv_metadata(table.params);
  out << "# norm_const=" << format_double(table.norm_const)
      << " tail_bound=" << format_double(table.tail_bound) << "\n";
  out << "# columns: n,level,re,im\n";
  for (const auto& e : table.entries)
    out << e.n << "," << e.level << "," << format_double(e.coeff.real()) << ","
        << format_double(e.coeff.imag()) << "\n";
  return out.str();
}

inline std::string report_csv_header(const ModelParams& p) {
  return csv_metadata(p) +
         "# columns: alpha_re,alpha_im,m,j,sigma_q,sigma_p,product,mean_energy\n";
}

inline std::string report_csv_row(const ModelParams& p, const ObservableReport& rep) {
  std::ostringstream out;
  out << format_double(p.alpha.real()) << "," << format_double(p.alpha.imag()) << ","
      << p.m_order << "," << p.j_index << "," << format_double(rep.sigma_q) << ","
      << format_double(rep.sigma_p) << "," << format_double(rep.product) << ","
      << format_double(rep.mean_energy) << "\n";
  return out.str();
}

inline std::string density_to_csv(const ModelParams& p, const DensityGrid& grid) {
  std::ostringstream out;
  out << csv_metadata(p);
  out << "# t=" << format_double(grid.time) << "\n";
  out << "# columns: x,rho\n";
  for (std::size_t i = 0; i < grid.x.size(); ++i)
    out << format_double(grid.x[i]) << "," << format_double(grid.rho[i]) << "\n";
  return out.str();
}

inline json density_to_json(const ModelParams& p, const DensityGrid& grid) {
  json j;
  j["params"] = params_to_json(p);
  j["t"] = grid.time;
  j["x"] = grid.x;
  j["rho"] = grid.rho;
  return j;
}

inline std::string autocorr_to_csv(const ModelParams& p, const AutocorrSeries& series) {
  std::ostringstream out;
  out << csv_metadata(p);
  out << "# columns: t,re,im,abs2\n";
  for (std::size_t i = 0; i < series.t.size(); ++i)
    out << format_double(series.t[i]) << "," << format_double(series.c[i].real()) << ","
        << format_double(series.c[i].imag()) << "," << format_double(std::norm(series.c[i]))
        << "\n";
  return out.str();
}

inline json state_to_json(const ModelParams& p, const SpinorState& state, double t) {
  json j;
  j["params"] = params_to_json(p);
  j["t"] = t;
  json terms = json::array();
  for (const auto& term : state.terms)
    terms.push_back({term.level, term.amplitude.real(), term.amplitude.imag()});
  j["terms"] = terms;
  return j;
}

inline json period_to_json(const ModelParams& p, const SpectralPeriod& sp,
                           double tau_revival, std::optional<double> tau_correlation,
                           double threshold) {
  json j;
  j["params"] = params_to_json(p);
  j["mean_energy"] = sp.mean_energy;
  j["bracket_levels"] = {sp.level_low, sp.level_high};
  j["bracket_energies"] = {energy_level(sp.level_low, p.omega_c),
                           energy_level(sp.level_high, p.omega_c)};
  j["tau_spectral"] = sp.tau;
  j["tau_revival"] = tau_revival;
  if (tau_correlation)
    j["tau_correlation"] = *tau_correlation;
  else
    j["tau_correlation"] = nullptr;
  j["threshold"] = threshold;
  return j;
}

}  // namespace bgmcs
