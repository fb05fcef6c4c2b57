#include "mpkit/campaign.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "mpkit/random.hpp"

namespace mpkit {

namespace {

constexpr std::uint64_t kRankStream = 0x72616e6bULL;

}  // namespace

void CampaignConfig::validate() const {
  if (sizes.empty()) throw std::invalid_argument("sizes: at least one size is required");
  for (Index n : sizes)
    if (n < 1) throw std::invalid_argument("sizes: every size must be >= 1 (got " + std::to_string(n) + ")");
  if (!ranks.empty()) {
    if (ranks.size() != sizes.size())
      throw std::invalid_argument("ranks: need exactly one rank per size");
    for (std::size_t i = 0; i < ranks.size(); ++i)
      if (ranks[i] < 0 || ranks[i] > sizes[i])
        throw std::invalid_argument("ranks: rank " + std::to_string(ranks[i]) +
                                    " outside [0, " + std::to_string(sizes[i]) + "]");
  }
  if (skews.empty()) throw std::invalid_argument("skews: at least one skew is required");
  for (double s : skews)
    if (!(s >= 0.0) || !std::isfinite(s))
      throw std::invalid_argument("skews: every skew must be finite and >= 0");
  if (trials_per_cell < 1) throw std::invalid_argument("trials: must be >= 1");
  tol.validate();
}

std::vector<TrialSpec> enumerate_trials(const CampaignConfig& config) {
  config.validate();
  std::vector<TrialSpec> out;
  out.reserve(config.sizes.size() * config.skews.size() *
              static_cast<std::size_t>(config.trials_per_cell));
  for (std::size_t si = 0; si < config.sizes.size(); ++si) {
    const Index n = config.sizes[si];
    for (std::size_t ki = 0; ki < config.skews.size(); ++ki) {
      const double skew = config.skews[ki];
      for (int trial = 0; trial < config.trials_per_cell; ++trial) {
        TrialSpec spec;
        spec.n = n;
        spec.skew = skew;
        spec.size_index = si;
        spec.skew_index = ki;
        spec.trial = trial;
        spec.seed = derive_seed(config.seed, static_cast<std::uint64_t>(n),
                                std::bit_cast<std::uint64_t>(skew),
                                static_cast<std::uint64_t>(trial));
        if (!config.ranks.empty()) {
          spec.rank = config.ranks[si];
        } else if (trial == 0) {
          spec.rank = 0;
        } else if (trial == 1) {
          spec.rank = n;
        } else {
          Rng rng(derive_seed(spec.seed, kRankStream));
          spec.rank = std::uniform_int_distribution<Index>(0, n)(rng);
        }
        out.push_back(spec);
      }
    }
  }
  return out;
}

BlockIdempotent realize(const TrialSpec& spec, const Tolerances& tol) {
  return random_idempotent(spec.n, spec.rank, spec.skew, spec.seed, tol);
}

CampaignSummary summarize(const std::vector<VerificationReport>& reports) {
  CampaignSummary summary;
  for (const CheckInfo& info : check_registry())
    summary.passes_per_check.emplace_back(std::string(info.id), 0);
  for (const VerificationReport& report : reports) {
    ++summary.trials;
    if (report.overall) ++summary.passed;
    for (const CheckResult& check : report.checks) {
      if (!check.passed) continue;
      for (auto& [id, count] : summary.passes_per_check)
        if (id == check.id) ++count;
    }
  }
  return summary;
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<VerificationReport> run_campaign(const CampaignConfig& config, unsigned workers) {
  const std::vector<TrialSpec> trials = enumerate_trials(config);
  std::vector<VerificationReport> reports(trials.size());
  parallel_for(trials.size(), workers, [&](std::size_t i) {
    const TrialSpec& spec = trials[i];
    BlockIdempotent built = realize(spec, config.tol);
    InputDescriptor input{"generated", spec.n, spec.rank, spec.skew, spec.seed};
    reports[i] = verify_all(built.idempotent, config.tol, std::move(input), built.block);
  });
  return reports;
}

}  // namespace mpkit
