#pragma once

// JSON run configuration. Missing optional fields take the documented
// defaults; invariant violations name the offending field.

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "priiner/common.hpp"
#include "priiner/inr.hpp"

namespace priiner {

enum class PriorKind { file, zero_filled, lowpass_oracle, ground_truth_oracle };

inline PriorKind prior_kind_from_string(const std::string& s) {
  if (s == "file") return PriorKind::file;
  if (s == "zero_filled") return PriorKind::zero_filled;
  if (s == "lowpass_oracle") return PriorKind::lowpass_oracle;
  if (s == "ground_truth_oracle") return PriorKind::ground_truth_oracle;
  throw ValidationError("config: unknown prior kind '" + s + "'");
}

inline std::string to_string(PriorKind k) {
  switch (k) {
    case PriorKind::file: return "file";
    case PriorKind::zero_filled: return "zero_filled";
    case PriorKind::lowpass_oracle: return "lowpass_oracle";
    case PriorKind::ground_truth_oracle: return "ground_truth_oracle";
  }
  return "?";
}

struct ReconConfig {
  int acceleration = 0;  // required
  double center_fraction = 0.08;
  double alpha = 0.8;
  double lambda_tv = 1e-4;
  double learning_rate = 1e-2;
  int iterations = 1000;
  long seed = 0;
  int csm_degree = 3;
  HashGridConfig hash;
  bool dc_only = false;       // drop the prior consistency term
  bool early_stop = false;    // stop when < 1e-6 relative over 50 iterations

  PriorKind prior_kind = PriorKind::lowpass_oracle;
  double prior_rho = 0.25;

  std::string kspace_path;
  std::string mask_path;
  std::string prior_path;
  std::string truth_path;
  std::string output_dir;

  void validate() const {
    if (acceleration < 1)
      throw ValidationError("config: acceleration must be a positive integer");
    if (!(center_fraction > 0.0) || center_fraction > 1.0)
      throw ValidationError("config: center_fraction must be in (0, 1]");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
      throw ValidationError("config: alpha must be finite and nonnegative");
    if (!(lambda_tv >= 0.0) || !std::isfinite(lambda_tv))
      throw ValidationError("config: lambda_tv must be finite and nonnegative");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
      throw ValidationError("config: learning_rate must be finite and positive");
    if (iterations < 1)
      throw ValidationError("config: iterations must be a positive integer");
    if (csm_degree < 0)
      throw ValidationError("config: csm_degree must be nonnegative");
    if (!(prior_rho > 0.0) || prior_rho > 1.0)
      throw ValidationError("config: prior_rho must be in (0, 1]");
    hash.validate();
  }
};

inline ReconConfig config_from_json(const nlohmann::json& j) {
  ReconConfig c;
  if (!j.contains("acceleration"))
    throw ValidationError("config: acceleration is required");
  c.acceleration = j.at("acceleration").get<int>();
  c.center_fraction = j.value("center_fraction", c.center_fraction);
  c.alpha = j.value("alpha", c.alpha);
  c.lambda_tv = j.value("lambda_tv", c.lambda_tv);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.iterations = j.value("iterations", c.iterations);
  c.seed = j.value("seed", c.seed);
  c.csm_degree = j.value("csm_degree", c.csm_degree);
  c.dc_only = j.value("dc_only", c.dc_only);
  c.early_stop = j.value("early_stop", c.early_stop);
  if (j.contains("prior_kind"))
    c.prior_kind = prior_kind_from_string(j.at("prior_kind").get<std::string>());
  c.prior_rho = j.value("prior_rho", c.prior_rho);
  if (j.contains("hash")) {
    const auto& h = j.at("hash");
    c.hash.levels = h.value("levels", c.hash.levels);
    c.hash.features_per_level =
        h.value("features_per_level", c.hash.features_per_level);
    c.hash.table_size = h.value("table_size", c.hash.table_size);
    c.hash.base_resolution = h.value("base_resolution", c.hash.base_resolution);
    c.hash.max_resolution = h.value("max_resolution", c.hash.max_resolution);
  }
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    c.kspace_path = p.value("kspace", "");
    c.mask_path = p.value("mask", "");
    c.prior_path = p.value("prior", "");
    c.truth_path = p.value("truth", "");
    c.output_dir = p.value("output_dir", "");
  }
  c.validate();
  return c;
}

inline ReconConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("config: cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("config: invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline nlohmann::json config_to_json(const ReconConfig& c) {
  nlohmann::json j;
  j["acceleration"] = c.acceleration;
  j["center_fraction"] = c.center_fraction;
  j["alpha"] = c.alpha;
  j["lambda_tv"] = c.lambda_tv;
  j["learning_rate"] = c.learning_rate;
  j["iterations"] = c.iterations;
  j["seed"] = c.seed;
  j["csm_degree"] = c.csm_degree;
  j["dc_only"] = c.dc_only;
  j["early_stop"] = c.early_stop;
  j["prior_kind"] = to_string(c.prior_kind);
  j["prior_rho"] = c.prior_rho;
  j["hash"] = {{"levels", c.hash.levels},
               {"features_per_level", c.hash.features_per_level},
               {"table_size", c.hash.table_size},
               {"base_resolution", c.hash.base_resolution},
               {"max_resolution", c.hash.max_resolution}};
  j["paths"] = {{"kspace", c.kspace_path},
                {"mask", c.mask_path},
                {"prior", c.prior_path},
                {"truth", c.truth_path},
                {"output_dir", c.output_dir}};
  return j;
}

}  // namespace priiner
