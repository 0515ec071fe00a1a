#pragma once

// Channel-spec ingestion and the command implementations behind the
// `wiretapx` tool. Commands return their CSV text so they can be driven
// without a process boundary.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wiretap/ntype.hpp"
#include "wiretap/prob_core.hpp"

namespace wiretap::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitDegenerate = 2,
  kExitBudget = 3,
  kExitNumerical = 4,
};

struct Prefix {
  Channel p_xu;  // rows indexed by u
  Distribution p_u;
};

/// A channel spec as read from JSON. With a prefix, every command works on
/// the effective channel U -> Z driven by P_U.
struct ChannelSpec {
  Channel w;
  Distribution p_x;
  std::optional<Prefix> prefix;

  Channel effective_channel() const;
  Distribution effective_input() const;
};

/// Accepts W and P_XU either as nested rows or flat row-major arrays.
/// Throws std::invalid_argument with a field-specific message.
ChannelSpec parse_spec(const std::string& json_text);
ChannelSpec load_spec(const std::string& path);

/// Canonical JSON: fixed key order, nested rows, %.17g numbers.
std::string normalize_spec(const ChannelSpec& spec);

/// FNV-1a 64 of normalize_spec(spec), as 16 hex digits.
std::string spec_hash(const ChannelSpec& spec);

enum class Units { nats, bits };

struct OutputOptions {
  Units units = Units::nats;
  bool timestamp = true;
};

struct SweepRequest {
  double r_min = 0.0;
  double r_max = 1.0;
  int steps = 50;
};

struct FiniteNRequest {
  Ensemble::Kind ensemble = Ensemble::Kind::iid;
  double rate = 0.0;
  std::vector<int> n_list;
  std::uint64_t cap = kDefaultEnumerationCap;
};

struct SimulateRequest {
  Ensemble::Kind ensemble = Ensemble::Kind::iid;
  double rate = 0.0;
  std::vector<int> n_list;
  int trials = 100;
  std::uint64_t seed = 0;
  std::size_t budget = 65536;
  std::size_t bins = 0;
};

/// Rates are always given in nats; `units` affects output columns only.
std::string cmd_sweep(const ChannelSpec& spec, const SweepRequest& request,
                      const OutputOptions& output);
std::string cmd_finite_n(const ChannelSpec& spec, const FiniteNRequest& request,
                         const OutputOptions& output);
std::string cmd_simulate(const ChannelSpec& spec, const SimulateRequest& request,
                         const OutputOptions& output);

/// Full command line: parses, runs, writes the result to `-o` or `out`,
/// reports errors on `err`, and returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wiretap::cli
