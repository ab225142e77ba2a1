#pragma once

// CLI run configuration and its lossless JSON round trip.

#include <json.hpp>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace kaczeta_cli {

struct BetaRange {
  double lo = 0.0, hi = 0.0, step = 0.0;
  bool operator==(const BetaRange&) const = default;
};

struct RunConfig {
  std::vector<double> lambda = {0.5};
  std::vector<double> J = {1.0};
  std::vector<double> beta = {1.0}; // one value, or a sweep list
  std::optional<BetaRange> beta_range;
  int n = 4;
  int degree = 60;
  std::complex<double> z = 1.0;
  std::string output = "csv"; // json | csv
  bool deterministic = false;
  int threads = 1;

  bool operator==(const RunConfig&) const = default;
};

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["m"] = c.lambda.size();
  j["lambda"] = c.lambda;
  j["J"] = c.J;
  if (c.beta.size() == 1)
    j["beta"] = c.beta[0];
  else
    j["beta"] = c.beta;
  if (c.beta_range)
    j["beta_range"] = {{"lo", c.beta_range->lo},
                       {"hi", c.beta_range->hi},
                       {"step", c.beta_range->step}};
  j["n"] = c.n;
  j["degree"] = c.degree;
  j["z"] = {c.z.real(), c.z.imag()};
  j["output"] = c.output;
  j["deterministic"] = c.deterministic;
  j["threads"] = c.threads;
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  if (j.contains("lambda")) c.lambda = j["lambda"].get<std::vector<double>>();
  if (j.contains("J")) c.J = j["J"].get<std::vector<double>>();
  if (j.contains("beta")) {
    if (j["beta"].is_array())
      c.beta = j["beta"].get<std::vector<double>>();
    else
      c.beta = {j["beta"].get<double>()};
  }
  if (j.contains("beta_range")) {
    BetaRange r;
    r.lo = j["beta_range"]["lo"].get<double>();
    r.hi = j["beta_range"]["hi"].get<double>();
    r.step = j["beta_range"]["step"].get<double>();
    c.beta_range = r;
  }
  if (j.contains("n")) c.n = j["n"].get<int>();
  if (j.contains("degree")) c.degree = j["degree"].get<int>();
  if (j.contains("z")) {
    auto zz = j["z"].get<std::vector<double>>();
    c.z = {zz.at(0), zz.size() > 1 ? zz[1] : 0.0};
  }
  if (j.contains("output")) c.output = j["output"].get<std::string>();
  if (j.contains("deterministic")) c.deterministic = j["deterministic"].get<bool>();
  if (j.contains("threads")) c.threads = j["threads"].get<int>();
  return c;
}

} // namespace kaczeta_cli
