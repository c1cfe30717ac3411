#pragma once

#include <json.hpp>

#include "rsft/density.hpp"

namespace rsft {

struct GapFit {
  std::vector<int> ns;
  std::vector<double> rates;    // ||hat L^n g - nu(g) rho_{theta^n x}||_alpha
  std::vector<double> ledgers;  // ledger carried by the iterate at each n
  double theta = 0.0;
  double prefactor = 0.0;       // B
  double fit_residual = 0.0;    // RMS residual of the log-linear fit
  int stride = 1;               // fit over multiples of the environment period
  bool below_resolution = false;
  bool certified = false;       // theta in (0,1) with an acceptable residual
  double floor = 1e-13;

  nlohmann::json to_json() const;
};

// Deviation curve of the normalized iterates from the rank-one limit and its
// log-linear fit. For periodic environments the fit runs on multiples of the
// period so that phase modulation does not pollute the slope.
GapFit gap_fit(const ShiftContext& ctx, const OrbitData& orbit, const DepthFunction& g,
               int n_max, double residual_tol = 0.1);

}  // namespace rsft
