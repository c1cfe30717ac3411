#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsft/environment.hpp"
#include "rsft/shift.hpp"

namespace rsft {

// Per-letter bounds 0 < c_e <= exp(phi)|[e] <= C_e plus the analytic tail
// majorants used whenever letters beyond the window are dropped. Tails that
// do not converge are reported as nullopt, never guessed.
struct LetterBounds {
  std::function<double(int)> lower;  // c_e  (encoded letter)
  std::function<double(int)> upper;  // C_e
  // sum_{e > L} C_e, nullopt if the series diverges
  std::function<std::optional<double>(int)> upper_tail_sum;
  // upper bound on sum over in-letters j > L of column b of C_j; this is the
  // per-column tail and may converge even when upper_tail_sum does not
  std::function<double(int, int)> column_tail;  // (b, L)
  // analytic bound on the total in-mass of column b, valid for every b
  // (including beyond the window); nullopt when the model cannot provide one
  std::function<std::optional<double>(int)> column_majorant;
};

// Potential evaluated on cylinder prefixes; the value depends on at most the
// first `depth` symbols of the prefix.
struct PotentialSpec {
  std::string name;
  int depth = 1;                    // d_phi
  double alpha = 1.0;               // Hoelder exponent
  double declared_variation = 0.0;  // V_alpha bound
  std::function<double(const FiberPoint&, std::span<const int>)> eval;
  LetterBounds bounds;
};

// Distortion constants of the Birkhoff-sum bounds. The geometric-series
// constant C = e^{-alpha}/(1-e^{-alpha}) controls |S_n phi(gw)-S_n phi(gt)|
// <= C V_alpha d(w,t)^alpha for n-step preimage pairs; K = 1 + C V_alpha.
struct HolderParams {
  double alpha = 1.0;
  double v_alpha = 0.0;
  double dist_const = 0.0;   // C
  double ratio_bound = 1.0;  // K = 1 + C * v_alpha

  static HolderParams from(double alpha, double v_alpha);
};

// Exact eigendata for solvable oracles (finite alphabet, deterministic or
// periodic). For periodic models one entry per phase.
struct OracleData {
  std::vector<double> lambda;               // per phase
  std::vector<std::vector<double>> nu;      // letter masses per phase
  std::vector<std::vector<double>> rho;     // density values per phase (nu-normalized)
  double theta = 0.0;                       // per-step contraction |lambda_2/lambda_1|^(1/p)
};

// A fully wired model: environment + incidence rule + potential + metadata.
struct ModelSpec {
  std::string name;
  EnvironmentModel env;
  PotentialSpec potential;
  SymbolCodec codec;
  std::vector<int> cylinder_set;  // encoded F for condition (C)
  TruncationParams default_trunc;
  // which structural conditions the model is documented to satisfy
  std::map<std::string, bool> documented;
  std::optional<OracleData> oracle;
  nlohmann::json params;

  nlohmann::json to_json() const;
};

// Gallery: full2, golden_mean, periodic2, nn_walk, growing_walk,
// sparse_deterministic, random_eta. Parameters documented in the README.
ModelSpec builtin(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

std::vector<std::string> builtin_names();

// Cross-checks stored oracle eigendata against a power iteration on the
// weighted letter matrix; models without an oracle pass trivially.
bool verify_oracle(const ModelSpec& model, double tol, std::string* message = nullptr);

// Depth-d tabular potential from CSV rows "s0,s1,...,s_{d-1},value".
PotentialSpec potential_from_csv(const std::string& path, double alpha);

}  // namespace rsft
