#pragma once

#include "nilkit/io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nilkit::cli {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class Format { Csv, Json };

struct Options {
  std::optional<std::uint64_t> seed;  // overrides the spec's "seed" when set
  int jobs = 1;
  Format format = Format::Csv;
};

/// Result table of one command.  CSV renders the rows; JSON additionally carries the summary.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<io::Json>> rows;
  io::Json summary = io::Json::object();
};

struct JobOutput {
  int exit_code = 0;  // 0 ok, 1 unexpected, 2 parse/domain, 3 cap, 4 invariant
  std::string text;   // rendered output when exit_code == 0
  std::string error;
};

const std::vector<std::string>& commands();

/// Runs one command on its spec; never throws.
JobOutput run_job(const std::string& command, const io::Json& spec, const Options& opt);

/// Runs the jobs listed in spec["jobs"] with opt.jobs worker threads.  The combined
/// output lists the jobs in spec order and is independent of the thread count.
JobOutput run_sweep(const io::Json& spec, const Options& opt);

std::string render_csv(const Table& t);
std::string render_json(const std::string& command, const Table& t);

/// Exit code for the exception currently being handled.
int exit_code_for_current_exception(std::string& message);

}  // namespace nilkit::cli
