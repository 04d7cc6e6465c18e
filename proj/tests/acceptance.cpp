// Acceptance runner: `acceptance N` checks criterion N (1..12) and prints one
// PASS/FAIL line. Exit status 0 on PASS, 1 on FAIL, 2 on bad arguments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "rmf/campaign.hpp"
#include "rmf/dirichlet.hpp"
#include "rmf/growth.hpp"
#include "rmf/iet.hpp"
#include "rmf/philox.hpp"
#include "rmf/sampler.hpp"
#include "rmf/sieve.hpp"
#include "rmf/stats.hpp"

namespace {

using namespace rmf;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::vector<std::uint64_t> seed_range(std::uint64_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::uint64_t i = 0; i < count; ++i) seeds[i] = i + 1;
  return seeds;
}

double share(const std::vector<double>& values, const std::function<bool(double)>& keep) {
  return static_cast<double>(std::count_if(values.begin(), values.end(), keep)) / static_cast<double>(values.size());
}

Outcome identity() {
  const SpfTable table(10'000);
  double worst = 0.0;
  int rows = 0;
  for (unsigned n : {1u, 2u, 3u}) {
    for (double sigma : {1.1, 1.5, 2.0, 3.0}) {
      for (double t : {0.0, 1.0, 10.0}) {
        for (auto seed : seed_range(10)) {
          const OmegaAssignment omega(seed, 10'000);
          worst = std::max(worst, identity_residual(n, omega, table, 10'000, {sigma, t}));
          ++rows;
        }
      }
    }
  }
  return {worst < 1e-10, fmt("max residual %.3e over %d rows (need < 1e-10)", worst, rows)};
}

Outcome periodicity() {
  bool periodic = true;
  for (unsigned n = 1; n <= 20; ++n) {
    const IetSpec spec(n);
    for (std::uint64_t i = 0; i < 100'000; ++i) {
      const DyadicFraction x(Philox4x32::u64(n, i));
      if (apply_T_power(spec, x, spec.intervals()).numerator() != x.numerator()) periodic = false;
    }
  }
  // Each interval I_j is represented by its left endpoint and a random interior point.
  bool indicator = true;
  for (unsigned n = 1; n <= 10; ++n) {
    const IetSpec spec(n);
    const std::uint64_t count = spec.intervals();
    for (std::uint64_t j = 1; j <= count; ++j) {
      const auto left = spec.endpoint(j - 1).numerator();
      const auto offset = Philox4x32::u64(1000 + n, j) & (spec.step_numerator() - 1);
      for (const DyadicFraction x : {DyadicFraction(left), DyadicFraction(left + offset)}) {
        for (std::uint64_t k = 1; k <= count; ++k) {
          const bool in_k = interval_index(spec, x) == k;
          const bool lands_top = interval_index(spec, apply_T_power(spec, x, k)) == count;
          if (in_k != lands_top) indicator = false;
        }
      }
    }
  }
  return {periodic && indicator, fmt("T^(2^n) bitwise identity for n = 1..20: %s; indicator identity n <= 10: %s",
                                     periodic ? "yes" : "no", indicator ? "yes" : "no")};
}

Outcome measure_preservation() {
  bool pass = true;
  std::string detail;
  for (unsigned n : {1u, 4u, 8u}) {
    const IetSpec spec(n);
    std::vector<std::uint64_t> xs, images;
    for (std::uint64_t i = 0; i < 100'000; ++i) {
      const DyadicFraction x(Philox4x32::u64(77, (std::uint64_t{n} << 32) | i));
      xs.push_back(x.numerator());
      images.push_back(apply_T(spec, x).numerator());
    }
    const double d = stats::ks_two_sample(xs, images);
    const double critical = stats::ks_critical_value(1e-3, xs.size(), images.size());
    pass = pass && d < critical;
    detail += fmt("n=%u D=%.5f (crit %.5f) ", n, d, critical);
  }
  return {pass, detail};
}

Outcome mobius() {
  const std::uint64_t limit = 1'000'000;
  const SpfTable table(limit);
  const auto series = build_sign_series(Beta::one(), OmegaAssignment(1, limit), limit, table);
  const auto mu = mobius_sieve(limit);
  std::uint64_t mismatches = 0;
  for (std::uint64_t n = 1; n <= limit; ++n) mismatches += series.values[n] != mu[n];
  return {mismatches == 0, fmt("%llu mismatches for n <= 10^6", static_cast<unsigned long long>(mismatches))};
}

Outcome prime_signs() {
  const SpfTable table(1'000'000);
  const OmegaAssignment omega(1, table.limit());
  bool pass = true;
  std::string detail;
  for (const char* text : {"1/2", "3/4", "7/8"}) {
    const auto beta = Beta::parse(text);
    std::int64_t total = 0;
    for (auto p : table.primes()) total += sign_at_prime(beta, omega.omega_unchecked(p));
    const double count = static_cast<double>(table.primes().size());
    const double b = beta.to_double();
    const double z = (static_cast<double>(total) / count - (1.0 - 2.0 * b)) / std::sqrt(4.0 * b * (1.0 - b) / count);
    pass = pass && std::abs(z) <= 4.0;
    detail += fmt("beta=%s z=%+.2f ", text, z);
  }
  return {pass, detail + "(need |z| <= 4)"};
}

Outcome abel() {
  const std::uint64_t limit = 100'000;
  const SpfTable table(limit);
  double worst = 0.0;
  for (const char* text : {"1/2", "3/4"}) {
    const auto series = build_sign_series(Beta::parse(text), OmegaAssignment(1, limit), limit, table);
    for (ComplexPoint s : {ComplexPoint{1.5, 0.0}, ComplexPoint{2.0, 0.0}, ComplexPoint{1.2, 5.0}}) {
      worst = std::max(worst, abel_consistency(series, limit, s));
    }
  }
  return {worst < 1e-10, fmt("max residual %.3e (need < 1e-10)", worst)};
}

CampaignReport campaign(SumKind kind, const char* beta) {
  CampaignConfig config;
  config.kind = kind;
  config.beta = Beta::parse(beta);
  config.limit = 10'000'000;
  config.seeds = seed_range(50);
  config.window = {100'000, 10'000'000};
  return monte_carlo_campaign(config);
}

std::vector<double> alphas(const CampaignReport& report) {
  std::vector<double> out;
  for (const auto& r : report.seeds) out.push_back(r.fit.alpha);
  return out;
}

Outcome growth_three_quarters() {
  const auto a = alphas(campaign(SumKind::plain, "3/4"));
  const double median = stats::median(a);
  const double above = share(a, [](double x) { return x >= 0.7; });
  return {median >= 0.8 && above >= 0.9,
          fmt("median alpha %.4f (need >= 0.8); share alpha >= 0.7: %.2f (need >= 0.9)", median, above)};
}

Outcome growth_half() {
  const double median = stats::median(alphas(campaign(SumKind::plain, "1/2")));
  return {median >= 0.4 && median <= 0.6, fmt("median alpha %.4f (need in [0.4, 0.6])", median)};
}

Outcome selberg_delange() {
  const auto report = campaign(SumKind::plain, "3/4");
  std::vector<double> terminal, decade;
  for (const auto& r : report.seeds) {
    terminal.push_back(r.selberg_delange->terminal_ratio);
    decade.push_back(r.selberg_delange->decade_ratio);
  }
  const double positive = share(terminal, [](double x) { return x > 0.0; });
  const double stable = share(decade, [](double x) { return x >= 0.5 && x <= 2.0; });
  return {positive >= 0.9 && stable >= 0.8,
          fmt("share R(10^7) > 0: %.2f (need >= 0.9); share R(10^7)/R(10^6) in [0.5, 2]: %.2f (need >= 0.8); "
              "median R(10^7) %.4f",
              positive, stable, stats::median(terminal))};
}

Outcome weighted() {
  const auto a = alphas(campaign(SumKind::weighted, "7/8"));
  const double median = stats::median(a);
  const double inside = share(a, [](double x) { return x >= 0.35 && x <= 0.70; });
  return {median >= 0.40 && median <= 0.65 && inside >= 0.8,
          fmt("median alpha %.4f (need in [0.40, 0.65]); share in [0.35, 0.70]: %.2f (need >= 0.8)", median, inside)};
}

Outcome prime_sum() {
  const SpfTable table(1'000'000);
  const auto beta = Beta::parse("3/4");
  const std::vector<std::uint64_t> limits{1'000, 10'000, 100'000, 1'000'000};
  std::vector<double> means;
  bool within = true;
  double z_at_top = 0.0;
  for (auto P : limits) {
    std::vector<double> sums;
    for (auto seed : seed_range(100)) {
      sums.push_back(exp_form_F(beta, OmegaAssignment(seed, P), table, P, {1.0, 0.0}).prime_sum.real());
    }
    CompensatedSum harmonic;
    for (auto p : table.primes_up_to(P)) harmonic += 1.0 / static_cast<double>(p);
    const double expected = (1.0 - 2.0 * beta.to_double()) * harmonic.value();
    const double z = (stats::mean(sums) - expected) / stats::standard_error(sums);
    if (P == limits.back()) {
      within = std::abs(z) <= 4.0;
      z_at_top = z;
    }
    means.push_back(stats::mean(sums));
  }
  const bool decreasing = std::adjacent_find(means.begin(), means.end(), std::less_equal<>()) == means.end();
  return {within && decreasing,
          fmt("P=10^6: z=%+.2f (need |z| <= 4); ensemble means %.4f %.4f %.4f %.4f %s", z_at_top, means[0], means[1],
              means[2], means[3], decreasing ? "decreasing" : "NOT decreasing")};
}

Outcome exp_form() {
  const SpfTable table(10'000);
  double worst = 0.0;
  for (const char* text : {"3/4", "7/8"}) {
    for (double sigma : {1.2, 2.0}) {
      for (auto seed : seed_range(5)) {
        const OmegaAssignment omega(seed, 10'000);
        const auto form = exp_form_F(Beta::parse(text), omega, table, 10'000, {sigma, 0.0});
        const auto direct = euler_F(Beta::parse(text), omega, table, 10'000, {sigma, 0.0});
        worst = std::max(worst, std::abs(form.value() - direct.value));
      }
    }
  }
  return {worst < 1e-10, fmt("max |exp(prime_sum + A) - F| = %.3e (need < 1e-10)", worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"zeta identity residual", identity},
      {"exchange periodicity", periodicity},
      {"measure preservation (KS)", measure_preservation},
      {"Mobius degeneration", mobius},
      {"prime-sign statistics", prime_signs},
      {"Abel consistency", abel},
      {"growth exponent, beta = 3/4", growth_three_quarters},
      {"growth exponent, beta = 1/2", growth_half},
      {"Selberg-Delange ratio, beta = 3/4", selberg_delange},
      {"weighted growth exponent, beta = 7/8", weighted},
      {"prime-sum ensemble mean", prime_sum},
      {"exponential form consistency", exp_form},
  };
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1..12>\n");
    return 2;
  }
  const int n = std::atoi(argv[1]);
  if (n < 1 || n > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
    return 2;
  }
  const auto& [name, check] = criteria[n - 1];
  try {
    const auto outcome = check();
    std::printf("criterion %d %s: %s: %s\n", n, outcome.pass ? "PASS" : "FAIL", name, outcome.detail.c_str());
    return outcome.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::printf("criterion %d FAIL: %s: error: %s\n", n, name, e.what());
    return 1;
  }
}
