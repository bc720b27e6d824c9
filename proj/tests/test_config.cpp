#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "swing/config.hpp"

namespace swing {
namespace {

std::string config_error(const std::string& json) {
  try {
    parse_config(json);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  if (at != std::string::npos) s.replace(at, from.size(), to);
  return s;
}

TEST(Config, LoadsPaperConfiguration) {
  const RunConfig cfg = load_config(std::string(SWING_SOURCE_DIR) + "/configs/paper.json");
  EXPECT_EQ(cfg.model.commodities.size(), 3u);
  EXPECT_EQ(cfg.model.driver_count(), 7);
  EXPECT_EQ(cfg.calendar.iso(cfg.contract.t_start), "2007-01-01");
  EXPECT_EQ(cfg.contract.exercise_days(), 365);
  EXPECT_DOUBLE_EQ(cfg.contract.q_max, 0.4);
  EXPECT_EQ(cfg.index.periods(), 12);
  EXPECT_DOUBLE_EQ(cfg.index.components[0].weight, 0.1757);
  EXPECT_EQ(cfg.index.components[0].fx, 0);
  EXPECT_EQ(cfg.index.components[1].fx, -1);
  EXPECT_DOUBLE_EQ(cfg.model.correlation(0, 4), 0.9);
  EXPECT_EQ(cfg.regressor.kind, RegressorKind::SpotIndexPartial);
  EXPECT_EQ(cfg.plans.size(), 5u);
  EXPECT_EQ(cfg.tracked.size(), 4u);
  EXPECT_EQ(cfg.products.size(), 3u);
  EXPECT_EQ(cfg.optimisation_paths, 10000u);
}

TEST(Config, OverridesAndHash) {
  const std::string json = testing::small_config_json();
  const RunConfig base = parse_config(json);
  Overrides o;
  o.has_seed = true;
  o.seed = 40;
  o.paths = 123;
  o.output_dir = "elsewhere";
  const RunConfig over = parse_config(json, o);
  EXPECT_EQ(over.optimisation_seed, 40u);
  EXPECT_EQ(over.simulation_seed, 41u);
  EXPECT_EQ(over.simulation_paths, 123u);
  EXPECT_EQ(over.output_dir, "elsewhere");
  EXPECT_NE(over.policy_hash(), base.policy_hash());
  // Sections that do not affect the policy leave the hash alone.
  const RunConfig other_out = parse_config(replace(json, R"("output_dir": "out")", R"("output_dir": "x")"));
  EXPECT_EQ(other_out.policy_hash(), base.policy_hash());
  const RunConfig other_boot = parse_config(replace(json, R"("bootstrap": 50)", R"("bootstrap": 60)"));
  EXPECT_EQ(other_boot.policy_hash(), base.policy_hash());
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Config, ErrorsNameTheKey) {
  const std::string json = testing::small_config_json();
  EXPECT_NE(config_error(replace(json, R"("q_max": 1.0)", R"("q_max": "x")")).find("contract.q_max"), std::string::npos);
  EXPECT_NE(config_error(replace(json, R"("a0": 1.0,)", R"("a0": 1.0, "b0": 2,)")).find("index.b0: unknown key"),
            std::string::npos);
  EXPECT_NE(config_error(replace(json, R"("kind": "spot_index_partial")", R"("kind": "splines")")).find("regressor"),
            std::string::npos);
  EXPECT_NE(config_error(replace(json, R"("commodity": "brent", "weight")", R"("commodity": "wti", "weight")"))
                .find("index.components[0].commodity"),
            std::string::npos);
  EXPECT_NE(config_error(replace(json, R"("start": "2007-01-01")", R"("start": "2007-02-30")")).find("contract"),
            std::string::npos);
  EXPECT_NE(config_error(replace(json, R"("simulation": 12)", R"("simulation": 11)")).find("seeds"), std::string::npos);
  EXPECT_NE(config_error("{").find("malformed JSON"), std::string::npos);
  EXPECT_THROW(load_config("/nonexistent/config.json"), std::runtime_error);
}

TEST(Config, RejectsNonPsdCorrelation) {
  const std::string json = replace(testing::small_config_json(), R"([{"a": "brent/1", "b": "gas/1", "rho": 0.3}])",
                                   R"([{"a": "brent/1", "b": "gas/1", "rho": 0.99}, {"a": "brent/1", "b": "gas/0", "rho": 0.99},
                                      {"a": "gas/0", "b": "gas/1", "rho": -0.99}])");
  const std::string e = config_error(json);
  EXPECT_NE(e.find("correlation"), std::string::npos) << e;
  EXPECT_NE(e.find("positive"), std::string::npos) << e;
}

TEST(Config, RejectsCalendarWithoutRefinement) {
  const std::string json = replace(testing::small_config_json(), R"("brent": "standard")",
                                   R"("brent": {"listed": [
        {"begin": "2006-10-02", "end": "2007-05-31", "from": "2006-10-01", "to": "2006-10-01"},
        {"begin": "2006-10-03", "end": "2007-06-30", "from": "2006-10-02", "to": "2007-05-30"}]})");
  const std::string e = config_error(json);
  EXPECT_NE(e.find("products.brent"), std::string::npos) << e;
}

TEST(Archive, RoundTripAndValidation) {
  RunConfig cfg = parse_config(testing::small_config_json());
  cfg.optimisation_paths = 100;
  const PathSet p = simulate(cfg.model, 100, 1);
  const IndexPaths ix(cfg.index, p);
  Archive a;
  a.config_hash = cfg.policy_hash();
  a.paths = 100;
  a.seed = 1;
  a.policy = backward_solve(p, ix, cfg.contract, cfg.grid, cfg.regressor);
  const auto dir = std::filesystem::temp_directory_path() / "swing_archive_test";
  std::filesystem::create_directories(dir);
  const std::string file = (dir / "policy.swgh").string();
  save_archive(file, a);
  const Archive b = load_archive(file);
  EXPECT_EQ(b.config_hash, a.config_hash);
  EXPECT_EQ(b.paths, 100u);
  EXPECT_EQ(b.seed, 1u);
  EXPECT_EQ(b.policy.value, a.policy.value);
  {
    std::ifstream in(file, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    EXPECT_EQ(std::string(magic, 4), "SWGH");
  }
  {
    std::fstream f(file, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(4);
    const char bad[4] = {9, 0, 0, 0};
    f.write(bad, 4);
  }
  EXPECT_THROW(load_archive(file), std::runtime_error);
  {
    std::ofstream f(file, std::ios::binary);
    f << "JUNK";
  }
  EXPECT_THROW(load_archive(file), std::runtime_error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace swing
