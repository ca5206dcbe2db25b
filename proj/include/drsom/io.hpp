#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "drsom/problems.hpp"
#include "drsom/report.hpp"
#include "drsom/types.hpp"

namespace drsom {

using json = nlohmann::json;

inline constexpr const char* kInstanceFormat = "drsom-instance";
inline constexpr int kInstanceVersion = 1;

/// FNV-1a 64-bit digest, hex-encoded. Used to fingerprint instances and
/// solver configurations in reports.
inline std::string digest(const std::string& payload) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char ch : payload) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

namespace detail {

inline json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline Vector vector_from_json(const json& arr) {
  Vector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v(i) = arr[i].get<double>();
  return v;
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline Matrix matrix_from_json(const json& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r > 0 ? static_cast<int>(rows[0].size()) : 0;
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instance serialization: payloads carry the seed and the full data so a
// benchmark is replayable without re-running the generator.
// ---------------------------------------------------------------------------

inline json to_json(const LpInstance& inst) {
  json j;
  j["format"] = kInstanceFormat;
  j["version"] = kInstanceVersion;
  j["kind"] = "lp";
  j["seed"] = inst.seed;
  j["params"] = {{"n", inst.n},
                 {"m", inst.m},
                 {"r", inst.r},
                 {"p", inst.p},
                 {"eps_smooth", inst.eps_smooth}};
  j["data"] = {{"A", detail::matrix_to_json(inst.A)},
               {"b", detail::vector_to_json(inst.b)},
               {"lambda_reg", inst.lambda_reg}};
  return j;
}

inline json to_json(const SnlInstance& inst) {
  auto edges_to_json = [](const std::vector<SnlEdge>& edges) {
    json arr = json::array();
    for (const auto& e : edges) arr.push_back({e.i, e.j, e.dist});
    return arr;
  };
  json j;
  j["format"] = kInstanceFormat;
  j["version"] = kInstanceVersion;
  j["kind"] = "snl";
  j["seed"] = inst.seed;
  j["params"] = {{"n", inst.n},
                 {"m", inst.m},
                 {"rd", inst.radio_range},
                 {"nf", inst.noise}};
  j["data"] = {{"anchors", detail::matrix_to_json(inst.anchors)},
               {"truth", detail::matrix_to_json(inst.truth)},
               {"sensor_edges", edges_to_json(inst.sensor_edges)},
               {"anchor_edges", edges_to_json(inst.anchor_edges)}};
  return j;
}

inline void check_instance_header(const json& j) {
  if (!j.contains("format") || j["format"] != kInstanceFormat) {
    throw std::runtime_error("instance file: unknown format");
  }
  if (!j.contains("version") ||
      j["version"].get<int>() != kInstanceVersion) {
    throw std::runtime_error("instance file: unsupported version");
  }
}

inline LpInstance lp_from_json(const json& j) {
  check_instance_header(j);
  if (j["kind"] != "lp") throw std::runtime_error("instance file: not an lp instance");
  LpInstance inst;
  inst.seed = j["seed"].get<std::uint64_t>();
  inst.n = j["params"]["n"].get<int>();
  inst.m = j["params"]["m"].get<int>();
  inst.r = j["params"]["r"].get<double>();
  inst.p = j["params"]["p"].get<double>();
  inst.eps_smooth = j["params"]["eps_smooth"].get<double>();
  inst.A = detail::matrix_from_json(j["data"]["A"]);
  inst.b = detail::vector_from_json(j["data"]["b"]);
  inst.lambda_reg = j["data"]["lambda_reg"].get<double>();
  return inst;
}

inline SnlInstance snl_from_json(const json& j) {
  check_instance_header(j);
  if (j["kind"] != "snl") throw std::runtime_error("instance file: not an snl instance");
  SnlInstance inst;
  inst.seed = j["seed"].get<std::uint64_t>();
  inst.n = j["params"]["n"].get<int>();
  inst.m = j["params"]["m"].get<int>();
  inst.radio_range = j["params"]["rd"].get<double>();
  inst.noise = j["params"]["nf"].get<double>();
  inst.anchors = detail::matrix_from_json(j["data"]["anchors"]);
  inst.truth = detail::matrix_from_json(j["data"]["truth"]);
  auto edges_from_json = [](const json& arr) {
    std::vector<SnlEdge> edges;
    for (const auto& e : arr) {
      edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
    }
    return edges;
  };
  inst.sensor_edges = edges_from_json(j["data"]["sensor_edges"]);
  inst.anchor_edges = edges_from_json(j["data"]["anchor_edges"]);
  return inst;
}

inline std::string instance_digest(const json& j) { return digest(j.dump()); }

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json load_instance_json(const std::string& path) {
  const json j = json::parse(read_text_file(path));
  check_instance_header(j);
  return j;
}

// ---------------------------------------------------------------------------
// Trace CSV and summary JSON
// ---------------------------------------------------------------------------

inline constexpr const char* kTraceHeader =
    "k,f,gnorm,lambda_or_mu,delta,rho,step_norm,accepted";

inline std::string trace_to_csv(const std::vector<TraceRecord>& trace) {
  std::string out(kTraceHeader);
  out += "\n";
  char buf[256];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.k, r.f,
                  r.gnorm, r.lambda_or_mu, r.delta, r.rho, r.step_norm,
                  r.accepted ? 1 : 0);
    out += buf;
  }
  return out;
}

inline json summary_to_json(const RunReport& report,
                            const std::string& config_digest,
                            const std::string& inst_digest) {
  json j;
  j["status"] = to_string(report.status);
  j["iterations"] = report.iterations;
  j["f_final"] = report.f_final;
  j["gnorm_final"] = report.gnorm_final;
  j["n_f"] = report.evals.n_f;
  j["n_g"] = report.evals.n_g;
  j["n_hvp"] = report.evals.n_hvp;
  j["wall_seconds"] = report.wall_seconds;
  j["solver"] = report.solver;
  j["config_digest"] = config_digest;
  j["instance_digest"] = inst_digest;
  if (!report.message.empty()) j["message"] = report.message;
  return j;
}

}  // namespace drsom
