// rmflab: command-line front end for the random multiplicative function lab.
//
//   rmflab <experiment> [--config file.json] [overrides...]
//   rmflab validate --config file.json
//
// Exit codes: 0 success, 1 assertion failure, 2 usage error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmf/lab/config.hpp"
#include "rmf/lab/run.hpp"

namespace {

using nlohmann::json;

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::vector<std::string> betas;
  std::vector<unsigned> levels;
  std::vector<std::uint64_t> prime_limits;
  std::optional<std::uint64_t> sum_limit;
  std::vector<double> sigmas;
  std::vector<double> ts;
  std::vector<std::uint64_t> seeds;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> samples;
  std::optional<double> tolerance;
  std::optional<std::string> sum_kind;
};

void add_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option("-c,--config", o.config_path, "JSON experiment config");
  cmd.add_option("-o,--out", o.out, "output directory for this run");
  cmd.add_option("--beta", o.betas, "exact dyadic beta, e.g. 3/4 (repeatable)");
  cmd.add_option("--level", o.levels, "exchange level n (repeatable)");
  cmd.add_option("--prime-limit", o.prime_limits, "Euler product prime limit P (repeatable)");
  cmd.add_option("--sum-limit", o.sum_limit, "partial-sum limit X");
  cmd.add_option("--sigma", o.sigmas, "Re(s) grid");
  cmd.add_option("--t", o.ts, "Im(s) grid");
  cmd.add_option("--seeds", o.seeds, "master seeds");
  cmd.add_option("--workers", o.workers, "worker threads for campaigns (0 = all cores)");
  cmd.add_option("--samples", o.samples, "random points per level (iet-test)");
  cmd.add_option("--tolerance", o.tolerance, "residual tolerance");
  cmd.add_option("--sum-kind", o.sum_kind, "campaign sums: plain or weighted");
}

json load_document(const Overrides& o, const std::string& kind) {
  json doc = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw rmf::lab::UsageError("cannot open config file '" + o.config_path + "'");
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw rmf::lab::UsageError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) throw rmf::lab::UsageError("config must be a JSON object");
  }
  if (!kind.empty()) {
    if (doc.contains("kind") && doc["kind"] != kind) {
      throw rmf::lab::UsageError("config kind '" + doc["kind"].get<std::string>() + "' does not match subcommand '" +
                                 kind + "'");
    }
    doc["kind"] = kind;
  }
  if (o.out) doc["output_dir"] = *o.out;
  if (!o.betas.empty()) doc["beta"] = o.betas;
  if (!o.levels.empty()) doc["level"] = o.levels;
  if (!o.prime_limits.empty()) doc["prime_limit"] = o.prime_limits;
  if (o.sum_limit) doc["sum_limit"] = *o.sum_limit;
  if (!o.sigmas.empty() || !o.ts.empty()) {
    doc.erase("points");
    if (!o.sigmas.empty()) doc["sigma"] = o.sigmas;
    if (!o.ts.empty()) doc["t"] = o.ts;
  }
  if (!o.seeds.empty()) doc["seeds"] = o.seeds;
  if (o.workers) doc["workers"] = *o.workers;
  if (o.samples) doc["samples"] = *o.samples;
  if (o.tolerance) doc["tolerance"] = *o.tolerance;
  if (o.sum_kind) doc["sum_kind"] = *o.sum_kind;
  return doc;
}

int print_violations(const std::vector<rmf::lab::Violation>& violations) {
  for (const auto& v : violations) {
    std::cerr << "invalid " << v.field << " = " << v.value << ": " << v.constraint << "\n";
  }
  return violations.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random multiplicative function laboratory"};
  app.require_subcommand(1);

  Overrides overrides;
  std::vector<CLI::App*> experiments;
  for (const auto& kind : rmf::lab::experiment_kinds()) {
    auto* cmd = app.add_subcommand(kind, "run the " + kind + " experiment");
    add_options(*cmd, overrides);
    experiments.push_back(cmd);
  }
  auto* validate_cmd = app.add_subcommand("validate", "check a config without running it");
  add_options(*validate_cmd, overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (validate_cmd->parsed()) {
      const auto config = rmf::lab::parse_config(load_document(overrides, ""));
      const auto violations = rmf::lab::validate(config);
      if (violations.empty()) std::cout << "config ok\n";
      return print_violations(violations);
    }
    std::string kind;
    for (auto* cmd : experiments) {
      if (cmd->parsed()) kind = cmd->get_name();
    }
    const auto config = rmf::lab::parse_config(load_document(overrides, kind));
    if (const int code = print_violations(rmf::lab::validate(config)); code != 0) return code;

    const auto manifest = rmf::lab::run(config);
    for (const auto& line : manifest.report) std::cout << line << "\n";
    for (const auto& line : manifest.failures) std::cerr << "assertion failed: " << line << "\n";
    std::cout << "outputs written to " << config.output_dir << "\n";
    return manifest.passed ? 0 : 1;
  } catch (const rmf::lab::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const rmf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
