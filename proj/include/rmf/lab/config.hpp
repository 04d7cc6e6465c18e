#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmf/dirichlet.hpp"
#include "rmf/dyadic.hpp"
#include "rmf/errors.hpp"
#include "rmf/growth.hpp"
#include "rmf/iet.hpp"
#include "rmf/sieve.hpp"

namespace rmf::lab {

using nlohmann::json;

/// Malformed configuration (wrong JSON type, unknown field value).
class UsageError : public Error {
 public:
  using Error::Error;
};

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"identity", "iet-test", "growth",  "weighted-growth",
                                                 "exp-form", "abel",     "h-scan", "campaign"};
  return kinds;
}

/// Campaign acceptance check over one per-seed statistic.
///   median_in:     lo <= median <= hi
///   fraction_in:   share of seeds with lo <= value <= hi is >= at_least
///   fraction_above: share of seeds with value > lo is >= at_least
struct CampaignCheck {
  std::string stat = "alpha";  ///< alpha | terminal_ratio | decade_ratio
  std::string rule = "median_in";
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double at_least = 1.0;
};

struct ExperimentConfig {
  std::string kind;
  std::vector<unsigned> levels;
  std::vector<std::string> betas;  ///< exact dyadic strings, parsed on use
  std::vector<std::uint64_t> prime_limits{10'000};
  std::uint64_t sum_limit = 1'000'000;
  std::vector<ComplexPoint> points{{2.0, 0.0}};
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "out";
  unsigned workers = 0;

  // iet-test
  std::uint64_t samples = 100'000;
  unsigned exhaustive_level = 10;
  std::vector<unsigned> ks_levels{1, 4, 8};
  double ks_alpha = 1e-3;

  // exp-form
  bool check_prime_sum_mean = false;

  // campaign
  std::string sum_kind = "plain";
  std::uint64_t window_lo = 100'000;
  std::uint64_t window_hi = 0;  ///< 0 = sum_limit
  std::uint64_t grid_min = 10;
  int per_decade = 8;
  std::vector<CampaignCheck> checks;

  double tolerance = 1e-10;
};

struct Violation {
  std::string field;
  std::string value;
  std::string constraint;
};

namespace detail {

inline std::uint64_t as_count(const json& j, const std::string& field) {
  if (j.is_number_unsigned() || j.is_number_integer()) {
    const auto v = j.get<std::int64_t>();
    if (v < 0) throw UsageError(field + ": expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
  }
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v < 0 || v != std::floor(v) || v > 1.8e19) throw UsageError(field + ": expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
  }
  throw UsageError(field + ": expected a non-negative integer");
}

template <typename F>
auto as_list(const json& j, F&& one) {
  using T = decltype(one(j));
  std::vector<T> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(one(e));
  } else {
    out.push_back(one(j));
  }
  return out;
}

inline double as_real(const json& j, const std::string& field) {
  if (!j.is_number()) throw UsageError(field + ": expected a number");
  return j.get<double>();
}

inline std::string as_beta_text(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer() && j.get<std::int64_t>() == 1) return "1";
  throw UsageError("beta: expected an exact fraction string such as \"3/4\"");
}

}  // namespace detail

/// Reads a config document. Scalars are accepted wherever a list is allowed.
inline ExperimentConfig parse_config(const json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw UsageError("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "kind") {
      if (!value.is_string()) throw UsageError("kind: expected a string");
      c.kind = value.get<std::string>();
    } else if (key == "level" || key == "levels") {
      c.levels = as_list(value, [&](const json& e) { return static_cast<unsigned>(as_count(e, key)); });
    } else if (key == "beta" || key == "betas") {
      c.betas = as_list(value, as_beta_text);
    } else if (key == "prime_limit" || key == "prime_limits") {
      c.prime_limits = as_list(value, [&](const json& e) { return as_count(e, key); });
    } else if (key == "sum_limit") {
      c.sum_limit = as_count(value, key);
    } else if (key == "points") {
      c.points.clear();
      if (!value.is_array()) throw UsageError("points: expected a list of [sigma, t] pairs");
      for (const auto& p : value) {
        if (!p.is_array() || p.size() != 2) throw UsageError("points: expected [sigma, t] pairs");
        c.points.push_back({as_real(p[0], key), as_real(p[1], key)});
      }
    } else if (key == "seeds") {
      if (value.is_object()) {
        const auto first = as_count(value.value("first", json(1)), "seeds.first");
        const auto count = as_count(value.value("count", json(0)), "seeds.count");
        c.seeds.clear();
        for (std::uint64_t i = 0; i < count; ++i) c.seeds.push_back(first + i);
      } else {
        c.seeds = as_list(value, [&](const json& e) { return as_count(e, key); });
      }
    } else if (key == "output_dir") {
      if (!value.is_string()) throw UsageError("output_dir: expected a string");
      c.output_dir = value.get<std::string>();
    } else if (key == "workers") {
      c.workers = static_cast<unsigned>(as_count(value, key));
    } else if (key == "samples") {
      c.samples = as_count(value, key);
    } else if (key == "exhaustive_level") {
      c.exhaustive_level = static_cast<unsigned>(as_count(value, key));
    } else if (key == "ks_levels") {
      c.ks_levels = as_list(value, [&](const json& e) { return static_cast<unsigned>(as_count(e, key)); });
    } else if (key == "ks_alpha") {
      c.ks_alpha = as_real(value, key);
    } else if (key == "check_prime_sum_mean") {
      if (!value.is_boolean()) throw UsageError("check_prime_sum_mean: expected a boolean");
      c.check_prime_sum_mean = value.get<bool>();
    } else if (key == "sum_kind") {
      if (!value.is_string()) throw UsageError("sum_kind: expected a string");
      c.sum_kind = value.get<std::string>();
    } else if (key == "window") {
      if (!value.is_array() || value.size() != 2) throw UsageError("window: expected [lo, hi]");
      c.window_lo = as_count(value[0], key);
      c.window_hi = as_count(value[1], key);
    } else if (key == "grid_min") {
      c.grid_min = as_count(value, key);
    } else if (key == "per_decade") {
      c.per_decade = static_cast<int>(as_count(value, key));
    } else if (key == "tolerance") {
      c.tolerance = as_real(value, key);
    } else if (key == "checks") {
      if (!value.is_array()) throw UsageError("checks: expected a list");
      for (const auto& e : value) {
        CampaignCheck check;
        if (!e.is_object()) throw UsageError("checks: expected objects");
        check.stat = e.value("stat", check.stat);
        check.rule = e.value("rule", check.rule);
        if (e.contains("lo")) check.lo = as_real(e["lo"], "checks.lo");
        if (e.contains("hi")) check.hi = as_real(e["hi"], "checks.hi");
        if (e.contains("at_least")) check.at_least = as_real(e["at_least"], "checks.at_least");
        c.checks.push_back(check);
      }
    } else if (key == "sigma" || key == "t" || key == "comment") {
      // sigma/t grids are expanded below; comments are ignored.
    } else {
      throw UsageError("unknown config field '" + key + "'");
    }
  }
  if (doc.contains("sigma") || doc.contains("t")) {
    if (doc.contains("points")) throw UsageError("give either points or sigma/t grids, not both");
    const auto sigmas = doc.contains("sigma") ? as_list(doc["sigma"], [](const json& e) { return as_real(e, "sigma"); })
                                              : std::vector<double>{2.0};
    const auto ts = doc.contains("t") ? as_list(doc["t"], [](const json& e) { return as_real(e, "t"); })
                                      : std::vector<double>{0.0};
    c.points.clear();
    for (double sigma : sigmas) {
      for (double t : ts) c.points.push_back({sigma, t});
    }
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Every reason run() would reject the config; empty when it would accept it.
inline std::vector<Violation> validate(const ExperimentConfig& c) {
  std::vector<Violation> out;
  auto flag = [&](std::string field, std::string value, std::string constraint) {
    out.push_back({std::move(field), std::move(value), std::move(constraint)});
  };
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end()) {
    flag("kind", c.kind, "one of identity, iet-test, growth, weighted-growth, exp-form, abel, h-scan, campaign");
    return out;
  }
  if (c.seeds.empty()) flag("seeds", "[]", "at least one seed");

  const bool uses_primes = c.kind == "identity" || c.kind == "exp-form" || c.kind == "h-scan";
  const bool uses_sums = c.kind == "growth" || c.kind == "weighted-growth" || c.kind == "abel" || c.kind == "campaign";
  const bool uses_beta = c.kind != "identity" && c.kind != "iet-test";
  const bool weighted =
      c.kind == "weighted-growth" || c.kind == "h-scan" || (c.kind == "campaign" && c.sum_kind == "weighted");

  if (uses_primes) {
    if (c.prime_limits.empty()) flag("prime_limit", "[]", "at least one prime limit");
    for (auto p : c.prime_limits) {
      if (p < 2 || p > kMaxSieveLimit) flag("prime_limit", std::to_string(p), "2 <= prime_limit <= 10^8");
    }
    if (c.points.empty()) flag("points", "[]", "at least one evaluation point");
  }
  if (uses_sums && (c.sum_limit < 2 || c.sum_limit > kMaxSieveLimit)) {
    flag("sum_limit", std::to_string(c.sum_limit), "2 <= sum_limit <= 10^8");
  }

  if (c.kind == "identity" || c.kind == "iet-test") {
    if (c.levels.empty()) flag("level", "[]", "at least one exchange level");
    for (auto n : c.levels) {
      if (n < 1 || n > IetSpec::kMaxLevel) flag("level", std::to_string(n), "1 <= level <= 62");
    }
  }
  if (c.kind == "identity") {
    for (const auto& p : c.points) {
      if (!(p.sigma > 1.0)) flag("sigma", format_real(p.sigma), "the zeta identity is stated for Re(s) > 1");
    }
  }
  if (c.kind == "iet-test") {
    if (c.samples < 1) flag("samples", "0", "at least one sample point");
    if (c.exhaustive_level > 20) flag("exhaustive_level", std::to_string(c.exhaustive_level), "at most 20");
    for (auto n : c.ks_levels) {
      if (n < 1 || n > IetSpec::kMaxLevel) flag("ks_levels", std::to_string(n), "1 <= level <= 62");
    }
    if (!(c.ks_alpha > 0.0 && c.ks_alpha < 1.0)) flag("ks_alpha", format_real(c.ks_alpha), "0 < ks_alpha < 1");
  }

  if (uses_beta) {
    if (c.betas.empty()) flag("beta", "[]", "at least one beta");
    for (const auto& text : c.betas) {
      std::optional<Beta> beta;
      try {
        beta = Beta::parse(text);
      } catch (const Error&) {
        flag("beta", text, "exact dyadic fraction in [1/2, 1], e.g. \"3/4\"");
        continue;
      }
      if (weighted && (beta->is_one() || !(beta->to_double() > kWeightedBetaThreshold))) {
        flag("beta", text, "weighted sums need 1/2 + 1/(2*sqrt(2)) ~= 0.853553 < beta < 1");
      }
    }
  }
  if (c.kind == "exp-form" || c.kind == "h-scan" || c.kind == "weighted-growth") {
    for (const auto& p : c.points) {
      if (c.kind != "weighted-growth" && !(p.sigma > 0.5)) {
        flag("sigma", format_real(p.sigma), "Re(s) > 1/2");
      }
    }
  }
  if (c.kind == "abel") {
    if (c.points.empty()) flag("points", "[]", "at least one evaluation point");
    for (const auto& p : c.points) {
      if (!(p.sigma > 0.0)) flag("sigma", format_real(p.sigma), "Re(s) > 0");
    }
  }
  if (c.kind == "campaign") {
    if (c.sum_kind != "plain" && c.sum_kind != "weighted") flag("sum_kind", c.sum_kind, "plain or weighted");
    if (c.betas.size() > 1) flag("beta", std::to_string(c.betas.size()) + " values", "exactly one beta per campaign");
    const std::uint64_t hi = c.window_hi == 0 ? c.sum_limit : c.window_hi;
    if (c.window_lo < 1 || c.window_lo >= hi || hi > c.sum_limit) {
      flag("window", "[" + std::to_string(c.window_lo) + ", " + std::to_string(hi) + "]",
           "1 <= lo < hi <= sum_limit");
    }
    if (c.grid_min < 1 || c.grid_min > c.window_lo) flag("grid_min", std::to_string(c.grid_min), "1 <= grid_min <= window lo");
    if (c.per_decade < 1) flag("per_decade", std::to_string(c.per_decade), "at least 1");
    for (const auto& check : c.checks) {
      if (check.stat != "alpha" && check.stat != "terminal_ratio" && check.stat != "decade_ratio") {
        flag("checks.stat", check.stat, "alpha, terminal_ratio or decade_ratio");
      }
      if (check.rule != "median_in" && check.rule != "fraction_in" && check.rule != "fraction_above") {
        flag("checks.rule", check.rule, "median_in, fraction_in or fraction_above");
      }
    }
  }
  if (!(c.tolerance > 0.0)) flag("tolerance", format_real(c.tolerance), "positive");
  if (c.output_dir.empty()) flag("output_dir", "", "non-empty path");
  return out;
}

inline json to_json(const ExperimentConfig& c) {
  json points = json::array();
  for (const auto& p : c.points) points.push_back({p.sigma, p.t});
  json checks = json::array();
  for (const auto& k : c.checks) {
    checks.push_back({{"stat", k.stat}, {"rule", k.rule}, {"lo", k.lo}, {"hi", k.hi}, {"at_least", k.at_least}});
  }
  return {{"kind", c.kind},
          {"levels", c.levels},
          {"betas", c.betas},
          {"prime_limits", c.prime_limits},
          {"sum_limit", c.sum_limit},
          {"points", points},
          {"seeds", c.seeds},
          {"samples", c.samples},
          {"exhaustive_level", c.exhaustive_level},
          {"ks_levels", c.ks_levels},
          {"ks_alpha", c.ks_alpha},
          {"check_prime_sum_mean", c.check_prime_sum_mean},
          {"sum_kind", c.sum_kind},
          {"window", {c.window_lo, c.window_hi == 0 ? c.sum_limit : c.window_hi}},
          {"grid_min", c.grid_min},
          {"per_decade", c.per_decade},
          {"checks", checks},
          {"tolerance", c.tolerance}};
}

}  // namespace rmf::lab
