#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rmf/compensated.hpp"
#include "rmf/dirichlet.hpp"
#include "rmf/growth.hpp"
#include "rmf/sampler.hpp"
#include "rmf/sieve.hpp"
#include "rmf/stats.hpp"

namespace rmf {

/// Above this limit sign series are streamed block by block instead of
/// being materialized against a shared spf table.
inline constexpr std::uint64_t kMaterializeLimit = 10'000'000;

enum class SumKind { plain, weighted };

/// Partial sums of f_beta (plain) or of (2 beta - 1)^(-d(n)) f_beta (weighted)
/// at the checkpoints, computed without keeping the series. Uses the shared
/// spf table when given, otherwise the segmented stream.
template <OmegaSource Source>
RealSumGrid stream_checkpoint_sums(SumKind kind, const Beta& beta, const Source& omega,
                                   std::span<const std::uint64_t> grid, const SpfTable* table) {
  RealSumGrid out;
  out.checkpoints.assign(grid.begin(), grid.end());
  if (grid.empty()) return out;
  const std::uint64_t limit = grid.back();
  detail::check_grid(grid, limit);
  require_coverage(omega, limit);

  std::vector<double> weights(64, 1.0);
  if (kind == SumKind::weighted) {
    const double scale = detail::weighted_scale(beta);
    for (std::size_t d = 1; d < weights.size(); ++d) weights[d] = weights[d - 1] * scale;
  }

  // Integer sums stay exact; weighted sums are compensated.
  std::int64_t exact = 0;
  CompensatedSum real;
  std::size_t next = 0;
  auto record = [&](std::uint64_t n) {
    if (next < grid.size() && n == grid[next]) {
      out.sums.push_back(kind == SumKind::plain ? static_cast<double>(exact) : real.value());
      ++next;
    }
  };
  auto accumulate = [&](std::int8_t value, std::uint8_t distinct) {
    if (kind == SumKind::plain) {
      exact += value;
    } else if (value != 0) {
      real += weights[distinct] * value;
    }
  };

  if (table != nullptr) {
    if (limit > table->limit()) throw RangeError("checkpoint exceeds sieve limit");
    const auto spf = table->raw();
    std::vector<std::int8_t> values(limit + 1, 0);
    std::vector<std::uint8_t> distinct(limit + 1, 0);
    values[1] = 1;
    accumulate(1, 0);
    record(1);
    for (std::uint64_t n = 2; n <= limit; ++n) {
      const std::uint32_t p = spf[n];
      const std::uint64_t m = n / p;
      if (m == 1) {
        values[n] = static_cast<std::int8_t>(sign_at_prime(beta, omega.omega_unchecked(p)));
        distinct[n] = 1;
      } else if (spf[m] != p) {
        values[n] = static_cast<std::int8_t>(values[m] * values[p]);
        distinct[n] = static_cast<std::uint8_t>(distinct[m] + 1);
      }
      accumulate(values[n], distinct[n]);
      record(n);
    }
  } else {
    for_each_sign_block(beta, omega, limit, [&](const SignBlock& block) {
      for (std::size_t i = 0; i < block.values.size(); ++i) {
        accumulate(block.values[i], block.distinct[i]);
        record(block.first + i);
      }
    });
  }
  return out;
}

struct CampaignConfig {
  SumKind kind = SumKind::plain;
  Beta beta = Beta::half();
  std::uint64_t limit = 10'000'000;
  std::vector<std::uint64_t> seeds;
  FitWindow window{100'000, 10'000'000};
  std::uint64_t grid_min = 10;
  int per_decade = 8;
  unsigned workers = 0;  ///< 0 = hardware concurrency
};

struct SeedResult {
  std::uint64_t seed = 0;
  RealSumGrid sums;
  GrowthFit fit;
  std::optional<SelbergDelangeStat> selberg_delange;
};

struct Quantiles {
  double q10 = 0.0;
  double median = 0.0;
  double q90 = 0.0;
};

inline Quantiles summarize(const std::vector<double>& values) {
  return {stats::quantile(values, 0.1), stats::quantile(values, 0.5), stats::quantile(values, 0.9)};
}

struct CampaignReport {
  CampaignConfig config;
  std::vector<SeedResult> seeds;  ///< in config seed order
  Quantiles alpha;
  std::optional<Quantiles> terminal_ratio;
  std::optional<Quantiles> decade_ratio;
};

/// Thrown when one seed's pipeline fails; carries the offending seed.
class CampaignError : public Error {
 public:
  CampaignError(std::uint64_t seed, const std::string& what)
      : Error("campaign seed " + std::to_string(seed) + ": " + what), seed_(seed) {}
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

inline bool has_selberg_delange(const CampaignConfig& config) {
  return config.kind == SumKind::plain && !config.beta.is_one() && DyadicFraction::half() < config.beta.threshold();
}

inline SeedResult run_seed(const CampaignConfig& config, std::uint64_t seed, std::span<const std::uint64_t> grid,
                           const SpfTable* table) {
  const OmegaAssignment omega(seed, config.limit);
  SeedResult result;
  result.seed = seed;
  result.sums = stream_checkpoint_sums(config.kind, config.beta, omega, grid, table);
  result.fit = fit_growth_exponent(result.sums, config.window);
  if (has_selberg_delange(config)) result.selberg_delange = selberg_delange_ratio(config.beta, result.sums);
  return result;
}

/// Runs every seed (in parallel when workers > 1) and aggregates in seed order.
inline CampaignReport monte_carlo_campaign(const CampaignConfig& config) {
  if (config.seeds.empty()) throw ConfigError("campaign needs at least one seed");
  if (config.limit < 2) throw ConfigError("campaign limit must be at least 2");
  if (config.kind == SumKind::weighted) detail::weighted_scale(config.beta);

  const auto grid = geometric_grid(config.grid_min, config.limit, config.per_decade);
  std::unique_ptr<SpfTable> table;
  if (config.limit <= kMaterializeLimit) table = std::make_unique<SpfTable>(config.limit);

  const std::size_t count = config.seeds.size();
  std::vector<std::optional<SeedResult>> results(count);
  std::vector<std::string> failures(count);
  std::atomic<std::size_t> cursor{0};
  auto work = [&] {
    for (std::size_t i = cursor++; i < count; i = cursor++) {
      try {
        results[i] = run_seed(config, config.seeds[i], grid, table.get());
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  unsigned workers = config.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.workers;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  CampaignReport report;
  report.config = config;
  for (std::size_t i = 0; i < count; ++i) {
    if (!results[i]) throw CampaignError(config.seeds[i], failures[i]);
    report.seeds.push_back(std::move(*results[i]));
  }
  std::vector<double> alphas;
  std::vector<double> terminal;
  std::vector<double> decade;
  for (const auto& r : report.seeds) {
    alphas.push_back(r.fit.alpha);
    if (r.selberg_delange) {
      terminal.push_back(r.selberg_delange->terminal_ratio);
      decade.push_back(r.selberg_delange->decade_ratio);
    }
  }
  report.alpha = summarize(alphas);
  if (!terminal.empty()) {
    report.terminal_ratio = summarize(terminal);
    report.decade_ratio = summarize(decade);
  }
  return report;
}

}  // namespace rmf
