// fsi_tool --config <path> --command <name> [--out <path>] [--format json|csv]
//
// Exit codes: 0 success, 2 validation, 3 infeasible, 4 internal.
// FSI_NUM_THREADS sets the per-fiber worker count (0 = all cores); the
// output does not depend on it.

#include "fsi/cli/run.hpp"
#include "fsi/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

int fail(const fsi::Error& e) {
  std::cerr << fsi::cli::emit_json(fsi::cli::error_tree(e));
  return fsi::cli::exit_code(e);
}

void configure_threads() {
  const char* env = std::getenv("FSI_NUM_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (*end != '\0' || value < 0 || value > 4096) {
    throw fsi::ValidationError("invalid_thread_count", std::string("FSI_NUM_THREADS must be an integer in [0, 4096], got '") + env + "'");
  }
  fsi::set_thread_count(static_cast<unsigned>(value));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shift-invariant oblique dual frame analysis"};
  std::string config_path, command, out_path, format;
  app.add_option("--config", config_path, "Run configuration (JSON)")->required();
  app.add_option("--command", command, "Command to run")->required()->check(CLI::IsMember(fsi::cli::commands()));
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_option("--format", format, "Override the configured output format")->check(CLI::IsMember({"json", "csv"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    configure_threads();
    const auto config = fsi::cli::load_config(config_path);
    const auto report = fsi::cli::run(config, command);
    const std::string bytes = fsi::cli::emit(report, format.empty() ? config.format : format);
    if (out_path.empty()) {
      std::cout << bytes;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out || !(out << bytes)) throw fsi::ValidationError("output_unwritable", "cannot write '" + out_path + "'");
    }
    return 0;
  } catch (const fsi::Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail(fsi::InternalError("unexpected", e.what()));
  }
}
