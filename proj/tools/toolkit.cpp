#include "nilkit/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using nilkit::cli::Format;
using nilkit::io::Json;

int write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "toolkit: cannot write " << path << "\n";
    return 1;
  }
  out << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiment runner for nilpotent structures, uniformity norms and additive tools"};
  app.require_subcommand(1, 1);

  std::string spec_path, out_path, format = "csv";
  std::uint64_t seed = 0;
  int jobs = 1;
  for (const auto& name : nilkit::cli::commands()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " job");
    sub->add_option("--spec", spec_path, "JSON spec file")->required();
    sub->add_option("--out", out_path, "output path (stdout when omitted)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "seed overriding the spec");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const bool seed_given = app.get_subcommands().front()->count("--seed") > 0;

  const auto t0 = std::chrono::steady_clock::now();
  nilkit::cli::Options opt;
  opt.jobs = jobs;
  opt.format = format == "json" ? Format::Json : Format::Csv;
  if (seed_given) opt.seed = seed;

  Json spec;
  nilkit::cli::JobOutput result;
  try {
    spec = nilkit::io::read_json_file(spec_path);
    result = nilkit::cli::run_job(command, spec, opt);
  } catch (...) {
    result.exit_code = nilkit::cli::exit_code_for_current_exception(result.error);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!result.error.empty()) std::cerr << "toolkit " << command << ": " << result.error << "\n";
  if (result.exit_code == 0) {
    if (out_path.empty()) {
      std::cout << result.text;
    } else if (write_text(out_path, result.text) != 0) {
      return 1;
    }
  }

  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(nilkit::io::spec_hash(spec)));
  const Json manifest{{"toolkit_version", nilkit::cli::kToolkitVersion},
                      {"command", command},
                      {"spec", spec_path},
                      {"spec_hash", hash},
                      {"seed", opt.seed ? Json(*opt.seed) : Json(nullptr)},
                      {"jobs", jobs},
                      {"format", format},
                      {"exit_code", result.exit_code},
                      {"wall_time_s", wall}};
  if (out_path.empty())
    std::cerr << manifest.dump() << "\n";
  else
    write_text(out_path + ".manifest.json", manifest.dump() + "\n");
  return result.exit_code;
}
