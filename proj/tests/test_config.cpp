#include <doctest.h>

#include "priiner/config.hpp"

using namespace priiner;

TEST_CASE("config requires acceleration") {
  CHECK_THROWS_WITH_AS(config_from_json(nlohmann::json::parse("{}")),
                       doctest::Contains("acceleration"), ValidationError);
}

TEST_CASE("config defaults match the documented constants") {
  const ReconConfig c =
      config_from_json(nlohmann::json::parse(R"({"acceleration":4})"));
  CHECK(c.acceleration == 4);
  CHECK(c.alpha == doctest::Approx(0.8));
  CHECK(c.lambda_tv == doctest::Approx(1e-4));
  CHECK(c.learning_rate == doctest::Approx(1e-2));
  CHECK(c.center_fraction == doctest::Approx(0.08));
  CHECK(c.iterations == 1000);
  CHECK(c.csm_degree == 3);
  CHECK(c.hash.levels == 16);
  CHECK(c.hash.features_per_level == 2);
  CHECK(c.hash.table_size == std::size_t(1) << 14);
  CHECK(c.hash.base_resolution == 16);
}

TEST_CASE("config invariant violations name the field") {
  CHECK_THROWS_WITH_AS(
      config_from_json(nlohmann::json::parse(R"({"acceleration":4,"alpha":-1})")),
      doctest::Contains("alpha"), ValidationError);
  CHECK_THROWS_WITH_AS(
      config_from_json(nlohmann::json::parse(R"({"acceleration":0})")),
      doctest::Contains("acceleration"), ValidationError);
  CHECK_THROWS_WITH_AS(
      config_from_json(
          nlohmann::json::parse(R"({"acceleration":4,"center_fraction":0})")),
      doctest::Contains("center_fraction"), ValidationError);
}

TEST_CASE("config load is deterministic and round-trips through JSON") {
  const auto j = nlohmann::json::parse(
      R"({"acceleration":6,"alpha":0.5,"seed":123,"dc_only":true,
          "prior_kind":"zero_filled","hash":{"levels":8}})");
  const ReconConfig a = config_from_json(j);
  const ReconConfig b = config_from_json(config_to_json(a));
  CHECK(a.acceleration == b.acceleration);
  CHECK(a.alpha == b.alpha);
  CHECK(a.seed == b.seed);
  CHECK(a.dc_only == b.dc_only);
  CHECK(a.prior_kind == b.prior_kind);
  CHECK(a.hash.levels == b.hash.levels);
}

TEST_CASE("config rejects invalid JSON") {
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), IoError);
}
