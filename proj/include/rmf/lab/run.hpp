#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmf/campaign.hpp"
#include "rmf/dirichlet.hpp"
#include "rmf/growth.hpp"
#include "rmf/iet.hpp"
#include "rmf/lab/checksum.hpp"
#include "rmf/lab/config.hpp"
#include "rmf/philox.hpp"
#include "rmf/sampler.hpp"
#include "rmf/sieve.hpp"
#include "rmf/stats.hpp"

namespace rmf::lab {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct OutputFile {
  std::string name;
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct RunManifest {
  json config;
  std::string version = kArtifactVersion;
  std::string started;
  std::string finished;
  std::vector<OutputFile> outputs;
  bool passed = true;
  std::vector<std::string> failures;  ///< assertion failures (residual above tolerance etc.)
  std::vector<std::string> report;    ///< human-readable result lines
};

inline json to_json(const RunManifest& m) {
  json outputs = json::array();
  for (const auto& o : m.outputs) outputs.push_back({{"file", o.name}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  return {{"config", m.config},       {"version", m.version}, {"started", m.started}, {"finished", m.finished},
          {"outputs", outputs},       {"passed", m.passed},   {"failures", m.failures}, {"report", m.report}};
}

namespace detail {

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Comma-separated rows with a fixed header; reals printed round-trip exact.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : columns_(header.size()) { row(header); }

  template <typename... Ts>
  void add(const Ts&... cells) {
    static_assert(sizeof...(Ts) > 0);
    std::vector<std::string> r{cell(cells)...};
    if (r.size() != columns_) throw Error("CSV row width mismatch");
    row(r);
  }

  const std::string& text() const { return text_; }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return std::isnan(v) ? std::string() : format_real(v); }
  static std::string cell(bool v) { return v ? "true" : "false"; }
  template <typename T>
    requires std::is_integral_v<T>
  static std::string cell(T v) {
    return std::to_string(v);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  std::size_t columns_;
  std::string text_;
};

/// Collects outputs of one run directory and records their checksums.
class RunWriter {
 public:
  RunWriter(const std::string& dir, RunManifest& manifest) : dir_(dir), manifest_(manifest) {
    std::filesystem::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& bytes) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error("cannot write '" + (dir_ / name).string() + "'");
    out << bytes;
    manifest_.outputs.push_back({name, sha256_hex(bytes), bytes.size()});
  }

  void write_json(const std::string& name, const json& doc) { write(name, doc.dump(2) + "\n"); }

  void fail(std::string message) {
    manifest_.passed = false;
    manifest_.failures.push_back(std::move(message));
  }

  void report(std::string line) { manifest_.report.push_back(std::move(line)); }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  RunManifest& manifest_;
};

inline std::vector<Beta> parse_betas(const ExperimentConfig& c) {
  std::vector<Beta> out;
  for (const auto& text : c.betas) out.push_back(Beta::parse(text));
  return out;
}

inline std::uint64_t max_prime_limit(const ExperimentConfig& c) {
  return *std::max_element(c.prime_limits.begin(), c.prime_limits.end());
}

inline std::string point_label(ComplexPoint p) { return format_real(p.sigma) + (p.t < 0 ? "" : "+") + format_real(p.t) + "i"; }

// ---------------------------------------------------------------- identity

inline void run_identity(const ExperimentConfig& c, RunWriter& out) {
  const SpfTable table(max_prime_limit(c));
  Csv csv({"level", "beta", "sigma", "t", "prime_limit", "seed", "residual"});
  double worst = 0.0;
  std::size_t rows = 0;
  for (unsigned level : c.levels) {
    const IetSpec spec(level);
    for (const auto& point : c.points) {
      for (auto P : c.prime_limits) {
        for (auto seed : c.seeds) {
          const OmegaAssignment omega(seed, P);
          const double r = identity_residual(level, omega, table, P, point);
          csv.add(level, spec.beta().to_string(), point.sigma, point.t, P, seed, r);
          worst = std::max(worst, r);
          ++rows;
          if (!(r < c.tolerance)) {
            out.fail("identity residual " + format_real(r) + " >= " + format_real(c.tolerance) + " at level " +
                     std::to_string(level) + ", s = " + point_label(point) + ", P = " + std::to_string(P) +
                     ", seed " + std::to_string(seed));
          }
        }
      }
    }
  }
  out.write("identity.csv", csv.text());
  out.write_json("summary.json", {{"rows", rows}, {"max_residual", worst}, {"tolerance", c.tolerance},
                                  {"pass", worst < c.tolerance}});
  out.report("identity: max residual " + format_real(worst) + " over " + std::to_string(rows) + " rows");
}

// ---------------------------------------------------------------- iet-test

inline std::vector<DyadicFraction> random_points(std::uint64_t seed, unsigned level, std::uint64_t count) {
  std::vector<DyadicFraction> xs;
  xs.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    xs.emplace_back(Philox4x32::u64(seed, (std::uint64_t{level} << 40) | i));
  }
  return xs;
}

/// One point per interval (plus one below 1/2), each offset by a random amount within its interval.
inline std::vector<DyadicFraction> interval_representatives(const IetSpec& spec, std::uint64_t seed) {
  std::vector<DyadicFraction> xs{DyadicFraction(Philox4x32::u64(seed, 0) >> 1)};
  const std::uint64_t mask = spec.step_numerator() - 1;
  for (std::uint64_t k = 0; k < spec.intervals(); ++k) {
    const std::uint64_t offset = Philox4x32::u64(seed, k + 1) & mask;
    xs.emplace_back(spec.endpoint(k).numerator() + offset);
  }
  return xs;
}

struct IetChecks {
  bool periodic = true;
  bool inverse = true;
  bool injective = true;
  bool index_dynamics = true;
  std::optional<bool> indicator_identity;
  std::optional<double> ks_statistic;
  std::optional<double> ks_critical;
};

inline IetChecks check_iet_level(unsigned level, std::uint64_t seed, std::uint64_t samples, bool exhaustive,
                                 std::optional<double> ks_alpha) {
  const IetSpec spec(level);
  IetChecks r;
  const auto xs = random_points(seed, level, samples);
  std::vector<std::uint64_t> inputs, images;
  std::vector<double> before, after;
  for (const auto x : xs) {
    const auto tx = apply_T(spec, x);
    if (apply_T_power(spec, x, spec.intervals()).numerator() != x.numerator()) r.periodic = false;
    if (apply_T_power(spec, tx, spec.intervals() - 1) != x) r.inverse = false;
    inputs.push_back(x.numerator());
    images.push_back(tx.numerator());
  }
  std::sort(inputs.begin(), inputs.end());
  std::sort(images.begin(), images.end());
  const auto distinct_inputs = std::unique(inputs.begin(), inputs.end()) - inputs.begin();
  const auto distinct_images = std::unique(images.begin(), images.end()) - images.begin();
  if (distinct_inputs != distinct_images) r.injective = false;

  const std::uint64_t count = spec.intervals();
  const auto reps = level <= 16 ? interval_representatives(spec, seed) : std::vector<DyadicFraction>(xs.begin(), xs.begin() + std::min<std::size_t>(xs.size(), 4096));
  for (const auto x : reps) {
    const auto k = interval_index(spec, x);
    const auto j = interval_index(spec, apply_T(spec, x));
    const auto expected = k == 0 ? 0 : (k == 1 ? count : k - 1);
    if (j != expected) r.index_dynamics = false;
  }
  if (exhaustive) {
    bool ok = true;
    for (const auto x : reps) {
      const auto index = interval_index(spec, x);
      for (std::uint64_t k = 1; k <= count && ok; ++k) {
        ok = (index == k) == (interval_index(spec, apply_T_power(spec, x, k)) == count);
      }
    }
    r.indicator_identity = ok;
  }
  if (ks_alpha) {
    std::vector<std::uint64_t> a, b;
    for (const auto x : xs) {
      a.push_back(x.numerator());
      b.push_back(apply_T(spec, x).numerator());
    }
    r.ks_statistic = stats::ks_two_sample(a, b);
    r.ks_critical = stats::ks_critical_value(*ks_alpha, a.size(), b.size());
  }
  return r;
}

inline void run_iet_test(const ExperimentConfig& c, RunWriter& out) {
  const std::uint64_t seed = c.seeds.front();
  Csv csv({"level", "check", "pass", "value", "threshold"});
  json levels = json::array();
  std::vector<unsigned> all = c.levels;
  for (unsigned n : c.ks_levels) {
    if (std::find(all.begin(), all.end(), n) == all.end()) all.push_back(n);
  }
  std::sort(all.begin(), all.end());
  for (unsigned level : all) {
    const bool in_main = std::find(c.levels.begin(), c.levels.end(), level) != c.levels.end();
    const bool ks = std::find(c.ks_levels.begin(), c.ks_levels.end(), level) != c.ks_levels.end();
    const auto r = check_iet_level(level, seed, c.samples, in_main && level <= c.exhaustive_level,
                                   ks ? std::optional<double>(c.ks_alpha) : std::nullopt);
    json entry = {{"level", level}, {"beta", "1 - 1/2^" + std::to_string(level + 1)}};
    auto record = [&](const std::string& name, bool pass, double value = NAN, double threshold = NAN) {
      csv.add(level, name, pass, value, threshold);
      entry[name] = pass;
      if (!pass) out.fail("level " + std::to_string(level) + ": " + name + " failed");
    };
    if (in_main) {
      record("periodicity", r.periodic);
      record("inverse", r.inverse);
      record("injective", r.injective);
      record("index_dynamics", r.index_dynamics);
      if (r.indicator_identity) record("indicator_identity", *r.indicator_identity);
      out.report("level " + std::to_string(level) + ": periodicity: " + (r.periodic ? "pass" : "FAIL") +
                 " (bitwise)");
    }
    if (r.ks_statistic) {
      const bool pass = *r.ks_statistic < *r.ks_critical;
      record("ks_measure_preservation", pass, *r.ks_statistic, *r.ks_critical);
      entry["ks_statistic"] = *r.ks_statistic;
      entry["ks_critical"] = *r.ks_critical;
      out.report("level " + std::to_string(level) + ": KS " + format_real(*r.ks_statistic) + " < " +
                 format_real(*r.ks_critical) + ": " + (pass ? "pass" : "FAIL"));
    }
    levels.push_back(entry);
  }
  out.write("iet.csv", csv.text());
  out.write_json("summary.json", {{"seed", seed}, {"samples", c.samples}, {"levels", levels}});
}

// ---------------------------------------------------------------- growth

inline json fit_json(const GrowthFit& fit) {
  return {{"alpha", fit.alpha},
          {"stderr", fit.stderr_alpha},
          {"points_used", fit.points_used},
          {"points_dropped", fit.points_dropped},
          {"window", {fit.window.lo, fit.window.hi}}};
}

template <typename T>
json try_fit(const SumGrid<T>& grid, FitWindow window) {
  try {
    return fit_json(fit_growth_exponent(grid, window));
  } catch (const FitError& e) {
    return {{"error", e.what()}};
  }
}

inline FitWindow window_of(const ExperimentConfig& c) {
  return {c.window_lo, c.window_hi == 0 ? c.sum_limit : c.window_hi};
}

inline void run_growth(const ExperimentConfig& c, RunWriter& out, bool weighted) {
  const SpfTable table(c.sum_limit);
  const auto grid = geometric_grid(c.grid_min, c.sum_limit, c.per_decade);
  const auto window = window_of(c);
  std::vector<std::int8_t> mobius;
  Csv csv(weighted ? std::vector<std::string>{"beta", "seed", "x", "weighted_sum", "weight_base"}
                   : std::vector<std::string>{"beta", "seed", "x", "S", "R"});
  json rows = json::array();
  const auto primes = table.primes();
  for (const auto& beta : parse_betas(c)) {
    const bool has_ratio = !beta.is_one() && DyadicFraction::half() < beta.threshold();
    for (auto seed : c.seeds) {
      const OmegaAssignment omega(seed, c.sum_limit);
      const auto series = build_sign_series(beta, omega, c.sum_limit, table);
      json row = {{"beta", beta.to_string()}, {"seed", seed}};
      if (weighted) {
        const double base = 1.0 / (2.0 * beta.to_double() - 1.0);
        const auto sums = weighted_partial_sums(beta, series, table, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) csv.add(beta.to_string(), seed, grid[i], sums.sums[i], base);
        row["fit"] = try_fit(sums, window);
        row["terminal_sum"] = sums.sums.back();
      } else {
        const auto sums = partial_sums(series, grid);
        std::optional<SelbergDelangeStat> sd;
        if (has_ratio) sd = selberg_delange_ratio(beta, sums);
        for (std::size_t i = 0; i < grid.size(); ++i) {
          double ratio = NAN;
          if (sd) {
            const auto it = std::find(sd->checkpoints.begin(), sd->checkpoints.end(), grid[i]);
            if (it != sd->checkpoints.end()) ratio = sd->ratios[it - sd->checkpoints.begin()];
          }
          csv.add(beta.to_string(), seed, grid[i], sums.sums[i], ratio);
        }
        row["fit"] = try_fit(sums, window);
        row["terminal_sum"] = sums.sums.back();
        if (sd) {
          row["terminal_ratio"] = sd->terminal_ratio;
          row["decade_ratio"] = sd->decade_ratio;
          row["sign_stable"] = sd->sign_stable;
        }

        // Mean of f(p) over p <= X against 1 - 2 beta, in binomial standard errors.
        std::int64_t total = 0;
        for (auto p : primes) total += series.values[p];
        const double count = static_cast<double>(primes.size());
        const double b = beta.to_double();
        const double mean = static_cast<double>(total) / count;
        const double se = std::sqrt(4.0 * b * (1.0 - b) / count);
        const double z = se > 0 ? (mean - (1.0 - 2.0 * b)) / se : (mean == 1.0 - 2.0 * b ? 0.0 : INFINITY);
        row["prime_sign_mean"] = mean;
        row["prime_sign_expected"] = 1.0 - 2.0 * b;
        row["prime_sign_z"] = z;
        if (!(std::abs(z) <= 4.0)) {
          out.fail("beta " + beta.to_string() + " seed " + std::to_string(seed) + ": prime-sign mean off by " +
                   format_real(z) + " standard errors");
        }
        if (beta.is_one()) {
          if (mobius.empty()) mobius = mobius_sieve(c.sum_limit);
          const bool match = std::equal(mobius.begin(), mobius.end(), series.values.begin());
          row["mobius_match"] = match;
          if (!match) out.fail("beta 1 series differs from the Mobius function");
          out.report("beta 1, seed " + std::to_string(seed) + ": Mobius degeneration " + (match ? "pass" : "FAIL"));
        }
      }
      rows.push_back(row);
    }
  }
  out.write(weighted ? "weighted_growth.csv" : "growth.csv", csv.text());
  out.write_json("summary.json", {{"sum_limit", c.sum_limit}, {"rows", rows}});
  out.report(std::string(weighted ? "weighted-growth" : "growth") + ": " + std::to_string(rows.size()) + " paths");
}

// ---------------------------------------------------------------- exp-form

inline void run_exp_form(const ExperimentConfig& c, RunWriter& out) {
  const SpfTable table(max_prime_limit(c));
  Csv csv({"beta", "sigma", "t", "prime_limit", "seed", "prime_sum_re", "prime_sum_im", "a_tail_re", "a_tail_im",
           "abs_diff"});
  double worst = 0.0;
  json ensembles = json::array();
  for (const auto& beta : parse_betas(c)) {
    for (const auto& point : c.points) {
      std::vector<double> means;
      for (auto P : c.prime_limits) {
        std::vector<double> prime_sums;
        for (auto seed : c.seeds) {
          const OmegaAssignment omega(seed, P);
          const auto form = exp_form_F(beta, omega, table, P, point);
          const auto direct = euler_F(beta, omega, table, P, point);
          const double diff = std::abs(form.value() - direct.value);
          worst = std::max(worst, diff);
          csv.add(beta.to_string(), point.sigma, point.t, P, seed, form.prime_sum.real(), form.prime_sum.imag(),
                  form.a_tail.real(), form.a_tail.imag(), diff);
          if (!(diff < c.tolerance)) {
            out.fail("exp-form mismatch " + format_real(diff) + " at beta " + beta.to_string() + ", s = " +
                     point_label(point) + ", P = " + std::to_string(P) + ", seed " + std::to_string(seed));
          }
          prime_sums.push_back(form.prime_sum.real());
        }
        if (!c.check_prime_sum_mean) continue;
        CompensatedSum expected_sum;
        for (auto p : table.primes_up_to(P)) expected_sum += prime_power_neg_s(p, point).real();
        const double expected = (1.0 - 2.0 * beta.to_double()) * expected_sum.value();
        const double mean = stats::mean(prime_sums);
        const double se = prime_sums.size() > 1 ? stats::standard_error(prime_sums) : INFINITY;
        const double z = (mean - expected) / se;
        means.push_back(mean);
        ensembles.push_back({{"beta", beta.to_string()}, {"sigma", point.sigma}, {"t", point.t}, {"prime_limit", P},
                             {"mean", mean}, {"stderr", se}, {"expected", expected}, {"z", z}});
        if (!(std::abs(z) <= 4.0)) {
          out.fail("prime-sum ensemble mean " + format_real(mean) + " is " + format_real(z) +
                   " standard errors from " + format_real(expected) + " at P = " + std::to_string(P));
        }
      }
      if (c.check_prime_sum_mean) {
        const bool decreasing = std::adjacent_find(means.begin(), means.end(), std::less_equal<>()) == means.end();
        if (!decreasing) out.fail("prime-sum ensemble mean is not decreasing in P for beta " + beta.to_string());
        out.report("beta " + beta.to_string() + ", s = " + point_label(point) + ": ensemble prime sum " +
                   (decreasing ? "decreasing" : "NOT decreasing") + " in P");
      }
    }
  }
  out.write("exp_form.csv", csv.text());
  json summary = {{"max_abs_diff", worst}, {"tolerance", c.tolerance}, {"pass", worst < c.tolerance}};
  if (c.check_prime_sum_mean) summary["ensembles"] = ensembles;
  out.write_json("summary.json", summary);
  out.report("exp-form: max |exp(prime_sum + A) - F| = " + format_real(worst));
}

// ---------------------------------------------------------------- abel

inline void run_abel(const ExperimentConfig& c, RunWriter& out) {
  const SpfTable table(c.sum_limit);
  Csv csv({"beta", "seed", "sum_limit", "sigma", "t", "residual"});
  double worst = 0.0;
  for (const auto& beta : parse_betas(c)) {
    for (auto seed : c.seeds) {
      const OmegaAssignment omega(seed, c.sum_limit);
      const auto series = build_sign_series(beta, omega, c.sum_limit, table);
      for (const auto& point : c.points) {
        const double r = abel_consistency(series, c.sum_limit, point);
        worst = std::max(worst, r);
        csv.add(beta.to_string(), seed, c.sum_limit, point.sigma, point.t, r);
        if (!(r < c.tolerance)) {
          out.fail("Abel residual " + format_real(r) + " at beta " + beta.to_string() + ", s = " + point_label(point) +
                   ", seed " + std::to_string(seed));
        }
      }
    }
  }
  out.write("abel.csv", csv.text());
  out.write_json("summary.json", {{"max_residual", worst}, {"tolerance", c.tolerance}, {"pass", worst < c.tolerance}});
  out.report("abel: max residual " + format_real(worst));
}

// ---------------------------------------------------------------- h-scan

inline void run_h_scan(const ExperimentConfig& c, RunWriter& out) {
  const SpfTable table(max_prime_limit(c));
  Csv csv({"beta", "sigma", "t", "prime_limit", "seed", "log_h_re", "log_h_im", "abs_log_h", "consistency"});
  std::map<std::pair<double, double>, std::vector<double>> by_point;
  for (const auto& beta : parse_betas(c)) {
    for (auto P : c.prime_limits) {
      for (const auto& point : c.points) {
        for (auto seed : c.seeds) {
          const OmegaAssignment omega(seed, P);
          const auto h = H_eval(beta, omega, table, P, point);
          const auto g = weighted_euler_G(beta, omega, table, P, point);
          const auto z = zeta_truncated(table, P, point);
          const double consistency = std::abs(h.log_value - g.log_value - z.log_value);
          csv.add(beta.to_string(), point.sigma, point.t, P, seed, h.log_value.real(), h.log_value.imag(),
                  std::abs(h.log_value), consistency);
          by_point[{point.sigma, point.t}].push_back(std::abs(h.log_value));
          if (!(consistency < 1e-12)) out.fail("log H - log G - log zeta = " + format_real(consistency));
        }
      }
    }
  }
  json summary = json::array();
  for (const auto& [key, values] : by_point) {
    summary.push_back({{"sigma", key.first}, {"t", key.second}, {"mean_abs_log_h", stats::mean(values)},
                       {"max_abs_log_h", *std::max_element(values.begin(), values.end())}});
  }
  out.write("h_scan.csv", csv.text());
  out.write_json("summary.json", {{"points", summary}});
  out.report("h-scan: " + std::to_string(by_point.size()) + " evaluation points");
}

// ---------------------------------------------------------------- campaign

inline CampaignConfig campaign_config(const ExperimentConfig& c) {
  CampaignConfig cc;
  cc.kind = c.sum_kind == "weighted" ? SumKind::weighted : SumKind::plain;
  cc.beta = Beta::parse(c.betas.front());
  cc.limit = c.sum_limit;
  cc.seeds = c.seeds;
  cc.window = window_of(c);
  cc.grid_min = c.grid_min;
  cc.per_decade = c.per_decade;
  cc.workers = c.workers;
  return cc;
}

struct CheckOutcome {
  bool pass = false;
  std::string description;
};

inline CheckOutcome evaluate_check(const CampaignCheck& check, const CampaignReport& report) {
  std::vector<double> values;
  for (const auto& r : report.seeds) {
    if (check.stat == "alpha") {
      values.push_back(r.fit.alpha);
    } else if (r.selberg_delange) {
      values.push_back(check.stat == "terminal_ratio" ? r.selberg_delange->terminal_ratio
                                                      : r.selberg_delange->decade_ratio);
    }
  }
  if (values.empty()) return {false, check.stat + ": no values"};
  if (check.rule == "median_in") {
    const double m = stats::median(values);
    const bool pass = m >= check.lo && m <= check.hi;
    return {pass, check.stat + " median " + format_real(m) + " in [" + format_real(check.lo) + ", " +
                      format_real(check.hi) + "]"};
  }
  std::size_t hits = 0;
  for (double v : values) {
    if (check.rule == "fraction_above" ? v > check.lo : (v >= check.lo && v <= check.hi)) ++hits;
  }
  const double share = static_cast<double>(hits) / static_cast<double>(values.size());
  const std::string range = check.rule == "fraction_above"
                                ? "> " + format_real(check.lo)
                                : "in [" + format_real(check.lo) + ", " + format_real(check.hi) + "]";
  return {share >= check.at_least, check.stat + " " + range + " for " + std::to_string(hits) + "/" +
                                       std::to_string(values.size()) + " seeds (need share >= " +
                                       format_real(check.at_least) + ")"};
}

inline json quantiles_json(const Quantiles& q) { return {{"q10", q.q10}, {"median", q.median}, {"q90", q.q90}}; }

inline json campaign_json(const CampaignReport& report) {
  json seeds = json::array();
  for (const auto& r : report.seeds) {
    json row = {{"seed", r.seed}, {"fit", fit_json(r.fit)}, {"terminal_sum", r.sums.sums.back()}};
    if (r.selberg_delange) {
      row["terminal_ratio"] = r.selberg_delange->terminal_ratio;
      row["decade_ratio"] = r.selberg_delange->decade_ratio;
      row["sign_stable"] = r.selberg_delange->sign_stable;
    }
    seeds.push_back(row);
  }
  json aggregates = {{"alpha", quantiles_json(report.alpha)}};
  if (report.terminal_ratio) aggregates["terminal_ratio"] = quantiles_json(*report.terminal_ratio);
  if (report.decade_ratio) aggregates["decade_ratio"] = quantiles_json(*report.decade_ratio);
  return {{"sum_kind", report.config.kind == SumKind::plain ? "plain" : "weighted"},
          {"beta", report.config.beta.to_string()},
          {"sum_limit", report.config.limit},
          {"window", {report.config.window.lo, report.config.window.hi}},
          {"seeds", seeds},
          {"aggregates", aggregates}};
}

inline void run_campaign(const ExperimentConfig& c, RunWriter& out) {
  const auto report = monte_carlo_campaign(campaign_config(c));
  Csv csv({"seed", "x", "S", "R"});
  for (const auto& r : report.seeds) {
    for (std::size_t i = 0; i < r.sums.checkpoints.size(); ++i) {
      double ratio = NAN;
      if (r.selberg_delange) {
        const auto& sd = *r.selberg_delange;
        const auto it = std::find(sd.checkpoints.begin(), sd.checkpoints.end(), r.sums.checkpoints[i]);
        if (it != sd.checkpoints.end()) ratio = sd.ratios[it - sd.checkpoints.begin()];
      }
      csv.add(r.seed, r.sums.checkpoints[i], r.sums.sums[i], ratio);
    }
  }
  json doc = campaign_json(report);
  json checks = json::array();
  for (const auto& check : c.checks) {
    const auto outcome = evaluate_check(check, report);
    checks.push_back({{"check", outcome.description}, {"pass", outcome.pass}});
    out.report(std::string(outcome.pass ? "pass: " : "FAIL: ") + outcome.description);
    if (!outcome.pass) out.fail(outcome.description);
  }
  doc["checks"] = checks;
  out.write("campaign.csv", csv.text());
  out.write_json("report.json", doc);
  out.report("campaign: median alpha " + format_real(report.alpha.median) + " over " +
             std::to_string(report.seeds.size()) + " seeds");
}

}  // namespace detail

/// Executes one experiment into config.output_dir and writes manifest.json there.
/// Throws UsageError for an invalid config; assertion failures are reported
/// through RunManifest::passed.
inline RunManifest run(const ExperimentConfig& config) {
  const auto violations = validate(config);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw UsageError("invalid config: " + v.field + " = " + v.value + " (" + v.constraint + ")");
  }
  RunManifest manifest;
  manifest.config = to_json(config);
  manifest.started = detail::utc_now();
  detail::RunWriter writer(config.output_dir, manifest);
  const auto& kind = config.kind;
  if (kind == "identity") {
    detail::run_identity(config, writer);
  } else if (kind == "iet-test") {
    detail::run_iet_test(config, writer);
  } else if (kind == "growth") {
    detail::run_growth(config, writer, false);
  } else if (kind == "weighted-growth") {
    detail::run_growth(config, writer, true);
  } else if (kind == "exp-form") {
    detail::run_exp_form(config, writer);
  } else if (kind == "abel") {
    detail::run_abel(config, writer);
  } else if (kind == "h-scan") {
    detail::run_h_scan(config, writer);
  } else if (kind == "campaign") {
    detail::run_campaign(config, writer);
  }
  manifest.finished = detail::utc_now();
  std::ofstream(std::filesystem::path(config.output_dir) / "manifest.json") << to_json(manifest).dump(2) << "\n";
  return manifest;
}

}  // namespace rmf::lab
