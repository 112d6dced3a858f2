#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "zbm/numeric.hpp"
#include "zbm/process.hpp"

namespace zbm {

// Experiment configuration; defaults give a desk-scale run. A flat key=value
// file can set any field, individual command-line flags override the file.
struct RunConfig {
  double T = 1e6;
  std::size_t n_samples = 200;
  PathModel model = PathModel::prime_sum;
  double x_exponent = 1.0 / 20.0;
  double alpha_max = 1.0;
  std::size_t grid_points = 512;
  TauRange tau_range = TauRange::T_to_2T;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string output_dir = "out";

  // n_samples = 0 is allowed: sample emits an empty CSV with a valid manifest.
  void validate() const {
    if (!(T > 10.0)) throw domain_error("config: T must exceed 10");
    if (!(x_exponent > 0.0 && x_exponent <= 1.0 / 6.0))
      throw domain_error("config: x_exponent must lie in (0, 1/6]");
    if (grid_points < 2) throw domain_error("config: grid_points >= 2");
    if (!(alpha_max > 0.0 && alpha_max <= 4.0))
      throw domain_error("config: alpha_max must lie in (0, 4]");
    if (workers == 0) throw domain_error("config: workers >= 1");
  }

  double mollifier_x() const { return std::pow(T, x_exponent); }
};

inline PathModel parse_model(const std::string& s) {
  if (s == "direct") return PathModel::direct;
  if (s == "prime_sum") return PathModel::prime_sum;
  if (s == "selberg_mollified") return PathModel::selberg_mollified;
  throw domain_error("unknown model: " + s);
}

inline TauRange parse_tau_range(const std::string& s) {
  if (s == "zero_to_T") return TauRange::zero_to_T;
  if (s == "T_to_2T") return TauRange::T_to_2T;
  throw domain_error("unknown tau range: " + s);
}

inline const char* to_string(TauRange r) {
  return r == TauRange::zero_to_T ? "zero_to_T" : "T_to_2T";
}

inline void apply_config_entry(RunConfig& cfg, const std::string& key,
                               const std::string& value) {
  if (key == "T") cfg.T = std::stod(value);
  else if (key == "n_samples") cfg.n_samples = std::stoull(value);
  else if (key == "model") cfg.model = parse_model(value);
  else if (key == "x_exponent") cfg.x_exponent = std::stod(value);
  else if (key == "alpha_max") cfg.alpha_max = std::stod(value);
  else if (key == "grid_points") cfg.grid_points = std::stoull(value);
  else if (key == "tau_range") cfg.tau_range = parse_tau_range(value);
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "workers") cfg.workers = static_cast<unsigned>(std::stoul(value));
  else if (key == "output_dir") cfg.output_dir = value;
  else throw domain_error("unknown config key: " + key);
}

// "key = value" lines; '#' starts a comment.
inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) apply_config_entry(cfg, key, value);
  }
  return cfg;
}

}  // namespace zbm
