#pragma once

// Configuration files, CSV/SVG emission and the simulate / montecarlo /
// verify commands behind the `geoatt` executable.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geoatt/sim.hpp"
#include "geoatt/verify.hpp"

namespace geoatt::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailure = 1,
  kConfigError = 2,
  kRuntimeFailure = 3,
};

/// `key=value`; the key may be bare (`dt`) or qualified (`scenario.dt`).
struct Override {
  std::string key;
  std::string value;
};

/// Throws ParseError when there is no '='.
Override parse_override(std::string_view text);

/// Parses INI-style text with sections [scenario], [tuning], [filters].
/// Omitted keys keep their defaults. ParseError / ValidationError messages
/// carry `origin:line` and the key.
ScenarioConfig parse_config(std::string_view text,
                            std::string_view origin = "<config>");

/// Applies one override. Throws ValidationError for unknown keys and
/// ParseError for malformed values.
void apply_override(ScenarioConfig& cfg, const Override& o);

/// Reads `path` (empty path = defaults only), applies overrides in order and
/// validates the result, including the tuning it resolves to.
ScenarioConfig load_config(const std::filesystem::path& path,
                           std::span<const Override> overrides = {});

/// Every key of the resolved configuration, 17 significant digits; parsing
/// the output reproduces the configuration exactly.
std::string format_config(const ScenarioConfig& cfg);

/// Shortest-general form with 17 significant digits, "nan"/"inf" spelled
/// out; independent of the global locale.
std::string format_number(double v);

/// Number or simple product/quotient of numbers and `pi` ("pi/4",
/// "-2*pi/3"). Throws ParseError.
double parse_number(std::string_view text);

struct Invocation {
  std::string command;
  std::filesystem::path config_path;
  std::filesystem::path output_dir = ".";
  std::vector<Override> overrides;
  bool svg = false;
};

/// Monte-Carlo worker count from GEOATT_THREADS (unset or 0 = automatic).
/// Throws ValidationError for a malformed value.
unsigned threads_from_env();

int cmd_simulate(const Invocation& inv, std::ostream& err);
int cmd_montecarlo(const Invocation& inv, std::ostream& err);
int cmd_verify(const Invocation& inv, std::ostream& err,
               const VerifyOptions& options = {});

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, char** argv);

}  // namespace geoatt::cli
