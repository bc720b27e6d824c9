#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swing/backtest.hpp"
#include "swing/calendar.hpp"
#include "swing/contract.hpp"
#include "swing/hedge.hpp"
#include "swing/model.hpp"
#include "swing/optimize.hpp"
#include "swing/regress.hpp"

namespace swing {

// Everything one run needs, resolved to day offsets.
struct RunConfig {
  Calendar calendar;
  MarketModel model;
  ContractSpec contract;
  IndexSpec index;
  VolumeGrid grid;
  RegressorSpec regressor;
  std::vector<ProductCalendar> products;  // per commodity
  std::vector<HedgePlan> plans;
  std::vector<TrackedExposure> tracked;
  std::size_t tracked_paths = 4;
  int bootstrap = 1000;
  std::size_t optimisation_paths = 10000;
  std::size_t simulation_paths = 10000;
  std::uint64_t optimisation_seed = 1;
  std::uint64_t simulation_seed = 2;
  std::string output_dir = "out";
  std::string text;  // canonical JSON after overrides

  // FNV-1a of the canonical text of the sections that determine the policy.
  std::uint64_t policy_hash() const;

  int commodity_id(const std::string& name) const;
  int fx_id(const std::string& name) const;
};

struct Overrides {
  bool has_seed = false;
  std::uint64_t seed = 0;      // optimisation seed; simulation uses seed + 1
  std::size_t paths = 0;       // both path counts when nonzero
  std::string output_dir;      // when nonempty
};

// Parses and validates; errors name the offending key.
RunConfig load_config(const std::string& file, const Overrides& o = {});
RunConfig parse_config(const std::string& json_text, const Overrides& o = {});

std::uint64_t fnv1a(const std::string& bytes);

// Policy archive: magic "SWGH", format version, config hash, optimisation
// path count and seed, then the policy.
struct Archive {
  std::uint64_t config_hash = 0;
  std::uint64_t paths = 0;
  std::uint64_t seed = 0;
  Policy policy;
};
inline constexpr std::uint32_t kArchiveVersion = 1;

void save_archive(const std::string& file, const Archive& a);
Archive load_archive(const std::string& file);

}  // namespace swing
