#pragma once

// Serial, unoptimised counterparts of the parallel kernels. Used by the
// tests and the benchmarks as references.

#include <vector>

#include "swing/contract.hpp"
#include "swing/model.hpp"
#include "swing/optimize.hpp"

namespace swing {

// Same draws and the same arithmetic as simulate(), one path after another.
PathSet simulate_serial(const MarketModel& model, std::size_t n_paths, std::uint64_t seed,
                        const std::vector<Day>& store_days = {});

namespace reference {

struct BackwardResult {
  double value = 0.0;
  // control[t][level - levels[t].lo][path], for exercise days only.
  std::vector<std::vector<std::vector<double>>> control;
};

// Backward pass that regresses the interpolated pathwise value at every
// candidate next volume separately instead of interpolating per-level fits.
BackwardResult backward_solve(const PathSet& p, const IndexPaths& ix, const ContractSpec& c,
                              const VolumeGrid& g, const RegressorSpec& r);

// Pathwise gas ledgers per delivery day at day t: D(t, m) for m in
// (t, t_end], indexed [m - t - 1][(level - levels[t].lo) * paths + path].
// Summing over a product's days gives the product ledger.
std::vector<std::vector<double>> gas_day_ledgers(const PathSet& p, const IndexPaths& ix, const ContractSpec& c,
                                                 const VolumeGrid& g, const RegressorSpec& r, Day t);

// F(min(s, m), m) for m in [lo, hi] by direct evaluation, path-major.
std::vector<double> forward_strip(const PathSet& p, int commodity, Day s, Day lo, Day hi);

}  // namespace reference
}  // namespace swing
