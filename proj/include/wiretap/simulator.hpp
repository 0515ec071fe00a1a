#pragma once

// Monte-Carlo codebooks and exact output laws over Z^n.
//
// Output laws enumerate all |Z|^n sequences; sequence z^n sits at index
// sum_t z_t |Z|^t. A hard budget on |Z|^n keeps the computation exact
// rather than approximate.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wiretap/ntype.hpp"
#include "wiretap/prob_core.hpp"

namespace wiretap {

/// Default cap on |Z|^n.
inline constexpr std::size_t kDefaultLawBudget = 65536;

/// Name of the generator behind every codebook, recorded in output metadata.
inline constexpr std::string_view kPrngName = "mt19937_64";

/// Odd multiplier of the per-trial seed scheme
///   seed_i = master_seed XOR (i * kSeedStride).
inline constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ULL;

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

class Codebook {
 public:
  Codebook(int n, std::size_t alphabet_size, std::vector<std::uint8_t> symbols,
           std::string ensemble, std::uint64_t seed);

  int n() const noexcept { return n_; }
  std::size_t alphabet_size() const noexcept { return alphabet_size_; }
  std::size_t size() const noexcept { return symbols_.size() / n_; }
  std::span<const std::uint8_t> codeword(std::size_t i) const {
    return std::span<const std::uint8_t>(symbols_).subspan(i * n_, n_);
  }
  const std::string& ensemble() const noexcept { return ensemble_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Splits the codewords, in order, into `count` bins of equal size.
  /// Throws std::invalid_argument unless count divides size().
  void partition(std::size_t count);
  bool has_bins() const noexcept { return bin_count_ > 0; }
  std::size_t bin_count() const noexcept { return bin_count_; }
  std::size_t bin_size() const noexcept { return bin_count_ ? size() / bin_count_ : size(); }

 private:
  int n_;
  std::size_t alphabet_size_;
  std::vector<std::uint8_t> symbols_;
  std::string ensemble_;
  std::uint64_t seed_;
  std::size_t bin_count_ = 0;
};

/// M codewords of length n. I.i.d. draws each symbol from P_X by inverse
/// CDF; constant composition shuffles the composition's multiset (n must
/// equal the composition's blocklength). Deterministic in `seed`.
Codebook sample_codebook(const Ensemble& ensemble, int n, std::size_t m, std::uint64_t seed);

struct OutputLaw {
  int n = 0;
  std::size_t alphabet_size = 0;
  std::vector<double> masses;
};

/// Number of entries |Z|^n; throws BudgetExceeded above `budget`.
std::size_t law_size(std::size_t alphabet_size, int n, std::size_t budget);

/// P_C(z^n) = (1/M) sum_i W^n(z^n | x_i^n).
OutputLaw output_law(const Codebook& codebook, const Channel& w,
                     std::size_t budget = kDefaultLawBudget);

/// Same, averaged over codewords [first, last) only.
OutputLaw output_law(const Codebook& codebook, const Channel& w, std::size_t first,
                     std::size_t last, std::size_t budget = kDefaultLawBudget);

/// P̄: P_Z^n for i.i.d., the exact type-class average for constant composition.
OutputLaw reference_law(const Ensemble& ensemble, int n, const Channel& w,
                        std::size_t budget = kDefaultLawBudget);

struct DivergenceReport {
  double value = 0.0;  // +infinity on a support violation
  std::size_t support_violations = 0;
  std::optional<std::size_t> first_violation;  // sequence index
};

/// D(law || reference), skipping entries where law is 0.
DivergenceReport divergence_between(const OutputLaw& law, const OutputLaw& reference);

DivergenceReport divergence_to_reference(const Codebook& codebook, const Channel& w,
                                         const Ensemble& ensemble,
                                         std::size_t budget = kDefaultLawBudget);

struct LeakageReport {
  double leak = 0.0;        // I(S; Z^n), S uniform over bins
  double cond_div = 0.0;    // (1/M_s) sum_s D(P_{C^s} || P̄)
  double uncond_div = 0.0;  // D(P_C || P̄)
  double identity_residual() const { return leak - (cond_div - uncond_div); }
};

/// Throws std::invalid_argument when the codebook has no bins and
/// NumericalFailure on a support violation.
LeakageReport wiretap_leakage(const Codebook& codebook, const Channel& w,
                              const OutputLaw& reference);

struct ProbeStat {
  std::size_t sequence = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over trials
  double reference = 0.0;
};

struct ExponentPoint {
  int n = 0;
  std::size_t codebook_size = 0;  // per bin when binned
  double mean_d = 0.0;
  double stderr_d = 0.0;
  double minus_log_mean_d = 0.0;
  std::optional<double> mean_leak;
  std::optional<double> max_identity_residual;
  std::vector<ProbeStat> probes;
};

struct ExponentFit {
  std::vector<ExponentPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  bool low_confidence = false;
  int trials = 0;
  std::uint64_t seed = 0;
};

struct SimulationOptions {
  int trials = 100;
  std::uint64_t seed = 0;
  std::size_t budget = kDefaultLawBudget;
  /// 0 for plain codebooks; otherwise the number of bins M_s, each holding
  /// max(1, floor(exp(nR))) codewords, and mean_d averages the per-bin
  /// divergences.
  std::size_t bins = 0;
};

/// Compositions used per n by the constant-composition ensemble.
Ensemble ensemble_for(Ensemble::Kind kind, const Distribution& p, int n);

/// Per n: mean of the divergence over `trials` codebooks with
/// M = max(1, floor(exp(nR))), then a least-squares line through
/// (n, -ln mean D). Trial t at list position j uses
/// trial_seed(seed, j * trials + t). Requires at least three ascending n.
ExponentFit empirical_exponent(Ensemble::Kind kind, const Distribution& p, const Channel& w,
                               double rate, const std::vector<int>& n_list,
                               const SimulationOptions& options);

/// Least-squares line with the low-confidence rule
/// residual_rms > 0.05 |slope| mean(n).
void fit_exponent(ExponentFit& fit);

}  // namespace wiretap
