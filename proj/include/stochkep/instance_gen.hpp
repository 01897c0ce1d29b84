#pragma once

// Random pool generation. Two modes:
//   * Density  — every donor->patient slot becomes an edge independently with
//                a fixed probability; quick structural benchmarks.
//   * BloodType — pairs carry patient/donor blood types and a patient
//                sensitization tier; pairs enter the pool only when the
//                donor cannot give to their own patient; arcs require blood
//                compatibility and a negative crossmatch draw against the
//                recipient's sensitization.
// Edge weights are unit or uniform; failure probabilities are uniform in a
// configurable range. A seed pins everything: draws happen in one documented
// order (pair attributes, then NDD attributes, then arcs in (src, dst) order,
// with weight and probability drawn the moment an arc is accepted).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochkep/exchange_graph.hpp"
#include "stochkep/rng.hpp"

namespace stochkep {

enum class GenMode { Density, BloodType };
enum class WeightKind { Unit, Uniform };

struct GenConfig {
  int num_pairs = 59;
  int num_ndds = 5;
  GenMode mode = GenMode::Density;
  double density = 0.15;  // Density mode: arc probability per slot
  WeightKind weight_kind = WeightKind::Unit;
  double weight_lo = 1.0;
  double weight_hi = 1.0;
  double prob_lo = 0.1;  // failure probabilities are U[prob_lo, prob_hi]
  double prob_hi = 0.9;
  std::uint64_t seed = 0;
};

namespace detail {

enum class BloodType { O, A, B, AB };

inline BloodType draw_blood_type(std::mt19937_64& rng) {
  const double u = uniform01(rng);
  if (u < 0.44) return BloodType::O;
  if (u < 0.86) return BloodType::A;
  if (u < 0.96) return BloodType::B;
  return BloodType::AB;
}

inline bool blood_compatible(BloodType donor, BloodType patient) {
  switch (donor) {
    case BloodType::O: return true;
    case BloodType::A: return patient == BloodType::A || patient == BloodType::AB;
    case BloodType::B: return patient == BloodType::B || patient == BloodType::AB;
    case BloodType::AB: return patient == BloodType::AB;
  }
  return false;
}

// Sensitization: probability a crossmatch against a random donor is positive.
inline double draw_sensitization(std::mt19937_64& rng) {
  const double u = uniform01(rng);
  if (u < 0.70) return 0.05;
  if (u < 0.90) return 0.45;
  return 0.90;
}

}  // namespace detail

inline void validate_gen_config(const GenConfig& c) {
  if (c.num_pairs < 1) throw std::invalid_argument("need at least one pair");
  if (c.num_ndds < 0) throw std::invalid_argument("negative NDD count");
  if (!(c.density >= 0.0 && c.density <= 1.0)) {
    throw std::invalid_argument("density must lie in [0, 1]");
  }
  if (!(c.prob_lo >= 0.0 && c.prob_lo <= c.prob_hi && c.prob_hi <= 1.0)) {
    throw std::invalid_argument("failure-probability range must satisfy 0 <= lo <= hi <= 1");
  }
  if (c.weight_kind == WeightKind::Uniform &&
      !(c.weight_lo >= 0.0 && c.weight_lo <= c.weight_hi)) {
    throw std::invalid_argument("weight range must satisfy 0 <= lo <= hi");
  }
}

inline ExchangeGraph generate_instance(const GenConfig& cfg) {
  validate_gen_config(cfg);
  std::mt19937_64 rng(cfg.seed);

  const int P = cfg.num_pairs;
  const int V = cfg.num_pairs + cfg.num_ndds;
  std::vector<Vertex> vertices;
  vertices.reserve(V);
  for (int i = 0; i < P; ++i) vertices.push_back({i, VertexKind::Pair});
  for (int i = P; i < V; ++i) vertices.push_back({i, VertexKind::Ndd});

  // Vertex attributes (BloodType mode only).
  std::vector<detail::BloodType> donor_type(V, detail::BloodType::O);
  std::vector<detail::BloodType> patient_type(P, detail::BloodType::O);
  std::vector<double> sensitization(P, 0.0);
  if (cfg.mode == GenMode::BloodType) {
    for (int i = 0; i < P; ++i) {
      // Admit only pairs whose own donor cannot give to their patient.
      for (int tries = 0;; ++tries) {
        if (tries > 100000) {
          throw std::runtime_error("pair admission loop failed to terminate");
        }
        const detail::BloodType pt = detail::draw_blood_type(rng);
        const detail::BloodType dt = detail::draw_blood_type(rng);
        const double pra = detail::draw_sensitization(rng);
        const bool own_crossmatch_ok = uniform01(rng) >= pra;
        if (detail::blood_compatible(dt, pt) && own_crossmatch_ok) continue;
        patient_type[i] = pt;
        donor_type[i] = dt;
        sensitization[i] = pra;
        break;
      }
    }
    for (int i = P; i < V; ++i) donor_type[i] = detail::draw_blood_type(rng);
  }

  std::vector<Edge> edges;
  for (int src = 0; src < V; ++src) {
    for (int dst = 0; dst < P; ++dst) {
      if (src == dst) continue;
      bool arc;
      if (cfg.mode == GenMode::Density) {
        arc = uniform01(rng) < cfg.density;
      } else {
        arc = detail::blood_compatible(donor_type[src], patient_type[dst]) &&
              uniform01(rng) >= sensitization[dst];
      }
      if (!arc) continue;
      Edge e;
      e.id = static_cast<int>(edges.size());
      e.src = src;
      e.dst = dst;
      e.weight = cfg.weight_kind == WeightKind::Unit
                     ? 1.0
                     : uniform_in(rng, cfg.weight_lo, cfg.weight_hi);
      e.fail_prob = uniform_in(rng, cfg.prob_lo, cfg.prob_hi);
      edges.push_back(e);
    }
  }
  return ExchangeGraph(std::move(vertices), std::move(edges));
}

// Conventional pair/NDD split for a requested total pool size (roughly one
// non-directed donor per twelve vertices).
inline GenConfig sized_config(int total_vertices) {
  GenConfig cfg;
  if (total_vertices == 64) {
    cfg.num_pairs = 59;
    cfg.num_ndds = 5;
  } else if (total_vertices == 128) {
    cfg.num_pairs = 118;
    cfg.num_ndds = 10;
  } else {
    if (total_vertices < 2) throw std::invalid_argument("pool too small");
    cfg.num_ndds = total_vertices / 13 + 1;
    cfg.num_pairs = total_vertices - cfg.num_ndds;
  }
  return cfg;
}

}  // namespace stochkep
