#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mpkit/idempotent.hpp"
#include "mpkit/tolerances.hpp"
#include "mpkit/verifier.hpp"

namespace mpkit {

// A grid of (size, skew) cells with a fixed number of random trials each.
struct CampaignConfig {
  std::vector<Index> sizes;
  // One rank per entry of `sizes`; empty means random ranks. Under the
  // random policy trial 0 of a cell uses rank 0, trial 1 rank n, and the
  // rest draw uniformly from [0, n].
  std::vector<Index> ranks;
  std::vector<double> skews;
  int trials_per_cell = 1;
  std::uint64_t seed = 0;
  Tolerances tol;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct TrialSpec {
  Index n = 0;
  Index rank = 0;
  double skew = 0.0;
  std::uint64_t seed = 0;  // feeds random_idempotent directly
  std::size_t size_index = 0;
  std::size_t skew_index = 0;
  int trial = 0;
};

// Ordered by (size, skew, trial index).
std::vector<TrialSpec> enumerate_trials(const CampaignConfig& config);

BlockIdempotent realize(const TrialSpec& spec, const Tolerances& tol = {});

struct CampaignSummary {
  std::size_t trials = 0;
  std::size_t passed = 0;
  std::vector<std::pair<std::string, std::size_t>> passes_per_check;  // registry order
};

CampaignSummary summarize(const std::vector<VerificationReport>& reports);

// Calls fn(i) for i in [0, count) across `workers` threads (0 = hardware
// concurrency). fn must write only to slot i of its output.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

// Verifies every trial; reports come back in enumerate_trials order.
std::vector<VerificationReport> run_campaign(const CampaignConfig& config, unsigned workers = 0);

}  // namespace mpkit
