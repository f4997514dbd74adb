#include "bentcert/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <openssl/evp.h>

#include "bentcert/error.hpp"

namespace bentcert::io {

namespace {

json complex_pair(cplx z) { return json::array({z.real(), z.imag()}); }

json table_to_json(const hyptest::Table& t) { return t; }

hyptest::Table table_from_json(const json& j) { return j.get<hyptest::Table>(); }

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInput(std::string("missing JSON field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("JSON field '") + key + "': " + e.what());
  }
}

}  // namespace

json to_json(const qmat::BipartiteOperator& op) {
  json rows = json::array();
  const auto& e = op.entries();
  for (std::size_t i = 0; i < e.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < e.cols(); ++k) row.push_back(complex_pair(e(i, k)));
    rows.push_back(std::move(row));
  }
  return {{"dA", op.dA()}, {"dB", op.dB()}, {"entries", rows}};
}

qmat::BipartiteOperator operator_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("operator JSON must be an object");
  const int dA = field<int>(j, "dA");
  const int dB = field<int>(j, "dB");
  if (dA < 1 || dB < 1) throw InvalidInput("operator JSON: dimensions must be positive");
  const auto d = static_cast<std::size_t>(dA * dB);
  const json& rows = j.at("entries");
  if (!rows.is_array() || rows.size() != d) throw InvalidInput("operator JSON: expected " + std::to_string(d) + " rows");
  CMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!rows[i].is_array() || rows[i].size() != d)
      throw InvalidInput("operator JSON: row " + std::to_string(i) + " has the wrong length");
    for (std::size_t k = 0; k < d; ++k) {
      const json& z = rows[i][k];
      if (z.is_number()) {
        m(i, k) = z.get<double>();
      } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
        m(i, k) = cplx(z[0].get<double>(), z[1].get<double>());
      } else {
        throw InvalidInput("operator JSON: entry (" + std::to_string(i) + ", " + std::to_string(k) +
                           ") is not a number or [re, im] pair");
      }
    }
  }
  return {dA, dB, std::move(m)};
}

json to_json(const criteria::RadiusReport& r) {
  return {{"lambda_min_rho", r.lambda_min_rho}, {"lambda_min_pt", r.lambda_min_pt}, {"ccnr", r.ccnr},
          {"r_a", r.r_a},
          {"r_b", r.r_b},
          {"r", r.r}};
}

json to_json(const hyptest::TestPlan& p) {
  json j = {{"model", p.model_name},
            {"labels", p.labels},
            {"m", p.m},
            {"c1", p.c1},
            {"c2", p.c2},
            {"r0", p.r0},
            {"noise", p.noise},
            {"lambda_min_fisher", p.lambda_min_fisher},
            {"hs_offset", p.hs_offset},
            {"covariance", p.covariance == hyptest::CovarianceAt::target ? "target" : "prepared"},
            {"dropped", p.dropped},
            {"useful", p.useful()},
            {"p_target", table_to_json(p.p_target)},
            {"p_prepared", table_to_json(p.p_prepared)},
            {"p_covariance", table_to_json(p.p_covariance)},
            {"worst_direction", p.worst_direction}};
  if (p.target) j["target"] = to_json(*p.target);
  if (p.prepared) j["prepared"] = to_json(*p.prepared);
  return j;
}

hyptest::TestPlan plan_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("plan JSON must be an object");
  hyptest::TestPlan p;
  p.model_name = field<std::string>(j, "model");
  p.labels = field<std::vector<std::string>>(j, "labels");
  p.m = field<int>(j, "m");
  p.c1 = field<double>(j, "c1");
  p.c2 = field<double>(j, "c2");
  p.r0 = field<double>(j, "r0");
  p.noise = field<double>(j, "noise");
  p.lambda_min_fisher = field<double>(j, "lambda_min_fisher");
  p.hs_offset = field<double>(j, "hs_offset");
  const auto cov = field<std::string>(j, "covariance");
  if (cov != "target" && cov != "prepared") throw InvalidInput("plan JSON: covariance must be target or prepared");
  p.covariance = cov == "target" ? hyptest::CovarianceAt::target : hyptest::CovarianceAt::prepared;
  p.dropped = field<std::vector<int>>(j, "dropped");
  p.p_target = table_from_json(j.at("p_target"));
  p.p_prepared = table_from_json(j.at("p_prepared"));
  p.p_covariance = table_from_json(j.at("p_covariance"));
  if (j.contains("worst_direction")) p.worst_direction = field<std::vector<double>>(j, "worst_direction");
  if (j.contains("target")) p.target = operator_from_json(j.at("target"));
  if (j.contains("prepared")) p.prepared = operator_from_json(j.at("prepared"));

  const std::size_t L = p.labels.size();
  if (p.dropped.size() != L || p.p_target.size() != L || p.p_prepared.size() != L || p.p_covariance.size() != L)
    throw InvalidInput("plan JSON: per-setting arrays disagree in length");
  int m = 0;
  for (std::size_t l = 0; l < L; ++l) {
    const auto k = p.p_target[l].size();
    if (p.p_prepared[l].size() != k || p.p_covariance[l].size() != k)
      throw InvalidInput("plan JSON: tables disagree for setting " + p.labels[l]);
    if (p.dropped[l] < 0 || static_cast<std::size_t>(p.dropped[l]) >= k)
      throw InvalidInput("plan JSON: dropped outcome out of range for setting " + p.labels[l]);
    m += static_cast<int>(k) - 1;
  }
  if (m != p.m) throw InvalidInput("plan JSON: m does not match the tables");
  return p;
}

simulate::Counts counts_from_json(const json& j, const hyptest::TestPlan& plan) {
  if (!j.is_object() || !j.contains("settings") || !j.at("settings").is_array())
    throw InvalidInput("counts JSON must be {\"settings\": [...]}");
  std::map<std::string, std::size_t> index;
  for (std::size_t l = 0; l < plan.labels.size(); ++l) index[plan.labels[l]] = l;
  simulate::Counts out(plan.labels.size());
  std::vector<bool> seen(plan.labels.size(), false);
  for (const json& s : j.at("settings")) {
    const auto label = field<std::string>(s, "label");
    const auto it = index.find(label);
    if (it == index.end()) throw InvalidInput("counts JSON: unknown setting '" + label + "'");
    if (seen[it->second]) throw InvalidInput("counts JSON: setting '" + label + "' appears twice");
    seen[it->second] = true;
    out[it->second] = field<std::vector<std::int64_t>>(s, "counts");
  }
  for (std::size_t l = 0; l < seen.size(); ++l)
    if (!seen[l]) throw InvalidInput("counts JSON: missing setting '" + plan.labels[l] + "'");
  return out;
}

json counts_to_json(const simulate::Counts& counts, const hyptest::TestPlan& plan) {
  if (counts.size() != plan.labels.size()) throw InvalidInput("counts_to_json: setting count mismatch");
  json settings = json::array();
  for (std::size_t l = 0; l < counts.size(); ++l)
    settings.push_back({{"label", plan.labels[l]}, {"counts", counts[l]}});
  return {{"settings", settings}};
}

json to_json(const simulate::EmpiricalFailure& e) {
  return {{"fraction", e.fraction},   {"ci95", {e.ci95.lo, e.ci95.hi}}, {"analytic", e.analytic},
          {"failures", e.failures},   {"trials", e.trials},             {"t0_sq", e.t0_sq},
          {"p0", e.p0}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  text_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw InvalidInput("CsvWriter: wrong number of columns");
  for (std::size_t i = 0; i < values.size(); ++i) text_ += (i ? "," : "") + format_double(values[i]);
  text_ += '\n';
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

json to_json(const RunManifest& m) {
  return {{"subcommand", m.subcommand}, {"parameters", m.parameters},     {"version", m.version},
          {"seed", m.seed},             {"wall_seconds", m.wall_seconds}, {"output_sha256", m.output_sha256}};
}

const char* version() { return "0.1.0"; }

}  // namespace bentcert::io
