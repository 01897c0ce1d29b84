#pragma once

// Instance and matching files (JSON), plus the canonical instance hash used
// to tie a matching file back to the pool it was solved on.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stochkep/exchange_graph.hpp"

namespace stochkep {

inline constexpr int kInstanceFileVersion = 1;

inline nlohmann::json instance_to_json(const ExchangeGraph& g) {
  nlohmann::json j;
  j["version"] = kInstanceFileVersion;
  j["vertices"] = nlohmann::json::array();
  for (const Vertex& v : g.vertices()) {
    j["vertices"].push_back(
        {{"id", v.id}, {"kind", v.kind == VertexKind::Pair ? "pair" : "ndd"}});
  }
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges()) {
    j["edges"].push_back({{"id", e.id},
                          {"src", e.src},
                          {"dst", e.dst},
                          {"weight", e.weight},
                          {"fail_prob", e.fail_prob}});
  }
  return j;
}

inline ExchangeGraph instance_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version") ||
      j.at("version").get<int>() != kInstanceFileVersion) {
    throw std::invalid_argument("unsupported instance file version");
  }
  std::vector<Vertex> vertices;
  for (const auto& jv : j.at("vertices")) {
    Vertex v;
    v.id = jv.at("id").get<int>();
    const std::string kind = jv.at("kind").get<std::string>();
    if (kind == "pair") {
      v.kind = VertexKind::Pair;
    } else if (kind == "ndd") {
      v.kind = VertexKind::Ndd;
    } else {
      throw std::invalid_argument("unknown vertex kind: " + kind);
    }
    vertices.push_back(v);
  }
  std::vector<Edge> edges;
  for (const auto& je : j.at("edges")) {
    Edge e;
    e.id = je.at("id").get<int>();
    e.src = je.at("src").get<int>();
    e.dst = je.at("dst").get<int>();
    e.weight = je.at("weight").get<double>();
    e.fail_prob = je.at("fail_prob").get<double>();
    edges.push_back(e);
  }
  ExchangeGraph g(std::move(vertices), std::move(edges));
  const std::vector<Violation> violations = validate_graph(g);
  if (!violations.empty()) {
    std::string msg = "instance fails validation:";
    for (const Violation& v : violations) {
      msg += "\n  - " + v.message;
      if (v.edge_id >= 0) msg += " (edge " + std::to_string(v.edge_id) + ")";
      if (v.vertex_id >= 0) msg += " (vertex " + std::to_string(v.vertex_id) + ")";
    }
    throw std::invalid_argument(msg);
  }
  return g;
}

// FNV-1a 64-bit over the canonical (sorted keys, no whitespace) JSON text.
inline std::string instance_hash(const ExchangeGraph& g) {
  const std::string text = instance_to_json(g).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline void save_instance(const ExchangeGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << instance_to_json(g).dump(2) << '\n';
}

inline ExchangeGraph load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  nlohmann::json j;
  in >> j;
  return instance_from_json(j);
}

struct MatchingFile {
  std::string instance_hash;
  std::string method;
  Caps caps;
  double objective_value = 0.0;
  Matching matching;
  double solve_seconds = 0.0;
};

inline nlohmann::json matching_to_json(const MatchingFile& mf) {
  nlohmann::json j;
  j["instance_hash"] = mf.instance_hash;
  j["method"] = mf.method;
  j["caps"] = {{"cycle_cap", mf.caps.cycle_cap}, {"chain_cap", mf.caps.chain_cap}};
  j["objective_value"] = mf.objective_value;
  j["cycles"] = nlohmann::json::array();
  for (const Cycle& c : mf.matching.cycles) j["cycles"].push_back(c.edges);
  j["chains"] = nlohmann::json::array();
  for (const Chain& c : mf.matching.chains) j["chains"].push_back(c.edges);
  j["solve_seconds"] = mf.solve_seconds;
  return j;
}

inline MatchingFile matching_from_json(const nlohmann::json& j) {
  MatchingFile mf;
  mf.instance_hash = j.at("instance_hash").get<std::string>();
  mf.method = j.at("method").get<std::string>();
  mf.caps.cycle_cap = j.at("caps").at("cycle_cap").get<int>();
  mf.caps.chain_cap = j.at("caps").at("chain_cap").get<int>();
  mf.objective_value = j.at("objective_value").get<double>();
  for (const auto& jc : j.at("cycles")) {
    Cycle c;
    c.edges = jc.get<std::vector<int>>();
    mf.matching.cycles.push_back(std::move(c));
  }
  for (const auto& jc : j.at("chains")) {
    Chain c;
    c.edges = jc.get<std::vector<int>>();
    mf.matching.chains.push_back(std::move(c));
  }
  mf.solve_seconds = j.at("solve_seconds").get<double>();
  return mf;
}

inline void save_matching(const MatchingFile& mf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << matching_to_json(mf).dump(2) << '\n';
}

inline MatchingFile load_matching(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matching file: " + path);
  nlohmann::json j;
  in >> j;
  return matching_from_json(j);
}

// A loaded matching is only meaningful against the pool it was produced from:
// hashes must agree and the structures must be feasible under the stated caps.
inline void check_matching_against(const ExchangeGraph& g, const MatchingFile& mf) {
  const std::string h = instance_hash(g);
  if (h != mf.instance_hash) {
    throw std::invalid_argument("matching was produced for a different instance (hash " +
                                mf.instance_hash + ", expected " + h + ")");
  }
  if (!is_feasible_matching(g, mf.matching, mf.caps)) {
    throw std::invalid_argument("matching file is infeasible for this instance");
  }
}

}  // namespace stochkep
