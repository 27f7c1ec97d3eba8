#include "symindex/reports_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "symindex/errors.hpp"

namespace symindex {
namespace {

using nlohmann::json;

std::string join_vec(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

// One CSV line from already-quoted fields.
std::string line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
  return out;
}

std::string direction_name(ScalingDirection d) {
  return d == ScalingDirection::ToZero ? "to-zero" : "to-infinity";
}

json sector_json(const SectorEstimate& s) {
  json j;
  j["c0"] = s.c0;
  j["kappa"] = s.kappa;
  j["satisfied"] = s.satisfied;
  if (!s.worst_x.empty()) j["worst_x"] = s.worst_x;
  if (!s.worst_xi.empty()) j["worst_xi"] = s.worst_xi;
  return j;
}

void stamp(json& j, const RunStamp& st) {
  j["config_hash"] = st.config_hash;
  j["version"] = st.version;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
  std::string out = "\"";
  for (char c : raw) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string symbol_table_csv(const std::vector<SymbolRow>& rows, const RunStamp& st) {
  std::string out = "x,xi,re,im,abs_err,config_hash,version\n";
  for (const SymbolRow& r : rows)
    out += line({csv_field(join_vec(r.x)), csv_field(join_vec(r.xi)),
                 format_double(r.value.re), format_double(r.value.im),
                 format_double(r.abs_err), csv_field(st.config_hash),
                 csv_field(st.version)});
  return out;
}

std::string empirical_symbol_csv(const std::vector<SymbolEstimate>& rows,
                                 const RunStamp& st) {
  std::string out = "t,re,im,se_re,se_im,used_paths,warning,config_hash,version\n";
  for (const SymbolEstimate& e : rows)
    out += line({format_double(e.t), format_double(e.value.re),
                 format_double(e.value.im), format_double(e.se_re),
                 format_double(e.se_im), std::to_string(e.used_paths),
                 csv_field(e.warning), csv_field(st.config_hash),
                 csv_field(st.version)});
  return out;
}

std::string ensemble_csv(const PathEnsemble& ens, const RunStamp& st) {
  std::string out = "path,time,state,max_dist,exploded,config_hash,version\n";
  const std::size_t nt = ens.times.size();
  for (long p = 0; p < ens.paths(); ++p) {
    const bool bad = std::binary_search(ens.exploded.begin(), ens.exploded.end(), p);
    for (std::size_t j = 0; j < nt; ++j)
      out += line({std::to_string(p), format_double(ens.times[j]),
                   csv_field(join_vec(ens.state_at(p, j))),
                   format_double(ens.path_max[std::size_t(p)][j]),
                   bad ? "1" : "0", csv_field(st.config_hash),
                   csv_field(st.version)});
  }
  return out;
}

std::string bound_report_csv(const BoundCheckReport& rep, const RunStamp& st) {
  std::string out = "t,r,p_hat,ci_low,ci_high,bound,pass,config_hash,version\n";
  for (const BoundCell& c : rep.cells)
    out += line({format_double(c.t), format_double(c.r), format_double(c.p_hat),
                 format_double(c.ci_low), format_double(c.ci_high),
                 format_double(c.bound), c.pass ? "1" : "0",
                 csv_field(st.config_hash), csv_field(st.version)});
  return out;
}

std::string lower_report_csv(const LowerBoundReport& rep, const RunStamp& st) {
  std::string out = "t,r,q_hat,h,product,config_hash,version\n";
  for (const LowerCell& c : rep.cells)
    out += line({format_double(c.t), format_double(c.r), format_double(c.q_hat),
                 format_double(c.h), format_double(c.product),
                 csv_field(st.config_hash), csv_field(st.version)});
  return out;
}

std::string scaling_report_csv(const ScalingReport& rep, const RunStamp& st) {
  std::string out = "t,median,q90,config_hash,version\n";
  for (const ScalingLevel& l : rep.levels)
    out += line({format_double(l.t), format_double(l.median),
                 format_double(l.q90), csv_field(st.config_hash),
                 csv_field(st.version)});
  return out;
}

std::string index_report_json(const IndexReport& rep, const RunStamp& st) {
  json j;
  stamp(j, st);
  json& idx = j["indices"];
  idx = json::object();
  auto put = [&idx](const char* k, const std::optional<double>& v) {
    if (v) idx[k] = *v;
  };
  put("beta0", rep.beta0);
  put("beta0_lower", rep.beta0_lower);
  put("delta0_upper", rep.delta0_upper);
  put("delta0", rep.delta0);
  put("beta_inf", rep.beta_inf);
  put("beta_inf_lower", rep.beta_inf_lower);
  put("delta_inf_upper", rep.delta_inf_upper);
  put("delta_inf", rep.delta_inf);
  j["window"] = rep.window;
  j["domain_restricted"] = rep.domain_restricted;
  if (!rep.x.empty()) j["x"] = rep.x;
  if (rep.sector) j["sector"] = sector_json(*rep.sector);
  json grid = json::array();
  for (std::size_t i = 0; i < rep.r_grid.size(); ++i) {
    json row;
    row["r"] = rep.r_grid[i];
    row["H"] = rep.H_of_r[i];
    row["g_H"] = rep.g_H[i];
    if (rep.h_of_r) row["h"] = (*rep.h_of_r)[i];
    if (rep.g_h) row["g_h"] = (*rep.g_h)[i];
    grid.push_back(std::move(row));
  }
  j["grid"] = std::move(grid);
  return j.dump(2) + "\n";
}

std::string bound_report_json(const BoundCheckReport& rep, const RunStamp& st) {
  json j;
  stamp(j, st);
  j["constants"] = {{"c", rep.constants.c},
                    {"c_tilde", rep.constants.c_tilde},
                    {"c_d", rep.constants.c_d}};
  j["z"] = rep.z;
  j["paths"] = rep.paths;
  j["excluded"] = rep.excluded;
  j["all_pass"] = rep.all_pass;
  json cells = json::array();
  for (const BoundCell& c : rep.cells)
    cells.push_back({{"t", c.t},
                     {"r", c.r},
                     {"p_hat", c.p_hat},
                     {"ci_low", c.ci_low},
                     {"ci_high", c.ci_high},
                     {"bound", c.bound},
                     {"pass", c.pass}});
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

std::string lower_report_json(const LowerBoundReport& rep, const RunStamp& st) {
  json j;
  stamp(j, st);
  j["sector"] = sector_json(rep.sector);
  j["c_kappa_hat"] = rep.c_kappa_hat;
  j["trend_slope"] = rep.trend_slope;
  j["flat"] = rep.flat;
  j["inconclusive"] = rep.inconclusive;
  j["paths"] = rep.paths;
  j["excluded"] = rep.excluded;
  json cells = json::array();
  for (const LowerCell& c : rep.cells)
    cells.push_back({{"t", c.t},
                     {"r", c.r},
                     {"q_hat", c.q_hat},
                     {"h", c.h},
                     {"product", c.product}});
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

std::string scaling_report_json(const ScalingReport& rep, const RunStamp& st) {
  json j;
  stamp(j, st);
  j["lambda"] = rep.lambda;
  j["direction"] = direction_name(rep.direction);
  j["verdict"] = rep.verdict;
  j["paths_per_level"] = rep.paths_per_level;
  j["exploded_fraction"] = rep.exploded_fraction;
  json levels = json::array();
  for (const ScalingLevel& l : rep.levels)
    levels.push_back({{"t", l.t}, {"median", l.median}, {"q90", l.q90}});
  j["levels"] = std::move(levels);
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file '" + path + "'");
  out.write(content.data(), std::streamsize(content.size()));
  out.flush();
  if (!out) throw ValidationError("failed writing output file '" + path + "'");
}

}  // namespace symindex
