#include "wiretap/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "wiretap/errors.hpp"
#include "wiretap/finite_n.hpp"
#include "wiretap/kernels.hpp"

namespace wiretap {
namespace {

// Codebooks beyond this many codewords are refused outright.
constexpr double kMaxCodebookSize = 1e8;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on {0, ..., bound-1} by rejection; portable across standard
// libraries, unlike std::uniform_int_distribution.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

// Expands W^n(.|x^n) into `law` (resized to |Z|^n) using `scratch`.
void codeword_law(std::span<const std::uint8_t> codeword, const Channel& w,
                  const kernels::KernelTable& k, std::vector<double>& law,
                  std::vector<double>& scratch) {
  const std::size_t nz = w.output_size();
  law[0] = 1.0;
  std::size_t len = 1;
  for (std::uint8_t x : codeword) {
    const auto row = w.row(x);
    for (std::size_t z = 0; z < nz; ++z) k.scale(law.data(), row[z], scratch.data() + z * len, len);
    std::swap(law, scratch);
    len *= nz;
  }
}

double entropy_of(const std::vector<double>& masses) {
  double h = 0.0;
  for (double m : masses) {
    if (m > 0.0) h -= m * std::log(m);
  }
  return h;
}

struct BinnedLaws {
  std::vector<OutputLaw> bins;
  OutputLaw total;
};

BinnedLaws binned_laws(const Codebook& cb, const Channel& w, std::size_t budget) {
  BinnedLaws out;
  const std::size_t size = law_size(w.output_size(), cb.n(), budget);
  const std::size_t per_bin = cb.bin_size();
  const std::size_t count = cb.has_bins() ? cb.bin_count() : 1;
  const kernels::KernelTable& k = kernels::active();
  out.total = {cb.n(), w.output_size(), std::vector<double>(size, 0.0)};
  for (std::size_t s = 0; s < count; ++s) {
    out.bins.push_back(output_law(cb, w, s * per_bin, (s + 1) * per_bin, budget));
    k.axpy(1.0 / static_cast<double>(count), out.bins.back().masses.data(),
           out.total.masses.data(), size);
  }
  return out;
}

std::string describe_violation(const DivergenceReport& r) {
  std::ostringstream os;
  os << r.support_violations << " output sequence(s) charged by the code lie outside the"
     << " reference support (first at index " << r.first_violation.value_or(0) << ")";
  return os.str();
}

// Leakage by the entropy route, conditional and unconditional divergences
// separately, so the identity between them is a genuine check.
LeakageReport leakage_of(const BinnedLaws& laws, const OutputLaw& reference) {
  LeakageReport r;
  double mean_bin_entropy = 0.0;
  for (const OutputLaw& bin : laws.bins) {
    const DivergenceReport d = divergence_between(bin, reference);
    if (d.support_violations) throw NumericalFailure("wiretap_leakage: " + describe_violation(d));
    r.cond_div += d.value;
    mean_bin_entropy += entropy_of(bin.masses);
  }
  const double count = static_cast<double>(laws.bins.size());
  r.cond_div /= count;
  mean_bin_entropy /= count;
  r.leak = entropy_of(laws.total.masses) - mean_bin_entropy;
  const DivergenceReport d = divergence_between(laws.total, reference);
  if (d.support_violations) throw NumericalFailure("wiretap_leakage: " + describe_violation(d));
  r.uncond_div = d.value;
  return r;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
  return master_seed ^ (trial_index * kSeedStride);
}

Codebook::Codebook(int n, std::size_t alphabet_size, std::vector<std::uint8_t> symbols,
                   std::string ensemble, std::uint64_t seed)
    : n_(n),
      alphabet_size_(alphabet_size),
      symbols_(std::move(symbols)),
      ensemble_(std::move(ensemble)),
      seed_(seed) {
  if (n < 1) throw std::invalid_argument("Codebook: n must be positive");
  if (symbols_.empty() || symbols_.size() % static_cast<std::size_t>(n) != 0) {
    throw std::invalid_argument("Codebook: symbol count is not a positive multiple of n");
  }
  for (std::uint8_t s : symbols_) {
    if (s >= alphabet_size_) throw std::invalid_argument("Codebook: symbol outside alphabet");
  }
}

void Codebook::partition(std::size_t count) {
  if (count == 0 || size() % count != 0) {
    throw std::invalid_argument("Codebook::partition: " + std::to_string(count) +
                                " bins do not divide " + std::to_string(size()) + " codewords");
  }
  bin_count_ = count;
}

Codebook sample_codebook(const Ensemble& ensemble, int n, std::size_t m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("sample_codebook: n and M must be positive");
  const std::size_t k = ensemble.alphabet_size();
  if (k > 256) throw std::invalid_argument("sample_codebook: alphabet larger than 256");
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> symbols(m * static_cast<std::size_t>(n));

  if (ensemble.kind() == Ensemble::Kind::iid) {
    const Distribution& p = ensemble.input();
    std::vector<double> cdf(k);
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t x = 0; x < k; ++x) {
      acc += p[x];
      cdf[x] = acc;
      if (p[x] > 0.0) last_positive = x;
    }
    for (std::uint8_t& s : symbols) {
      const double u = uniform01(rng);
      std::size_t x = 0;
      while (x < last_positive && (p[x] <= 0.0 || u >= cdf[x])) ++x;
      s = static_cast<std::uint8_t>(x);
    }
  } else {
    const NType& comp = ensemble.composition();
    if (comp.n() != n) {
      throw std::invalid_argument("sample_codebook: composition blocklength " +
                                  std::to_string(comp.n()) + " differs from n = " +
                                  std::to_string(n));
    }
    std::vector<std::uint8_t> sorted;
    for (std::size_t x = 0; x < k; ++x) sorted.insert(sorted.end(), comp[x], static_cast<std::uint8_t>(x));
    for (std::size_t i = 0; i < m; ++i) {
      std::uint8_t* cw = symbols.data() + i * n;
      std::copy(sorted.begin(), sorted.end(), cw);
      for (std::size_t j = n - 1; j > 0; --j) std::swap(cw[j], cw[uniform_below(rng, j + 1)]);
    }
  }
  return Codebook(n, k, std::move(symbols), std::string(ensemble.label()), seed);
}

std::size_t law_size(std::size_t alphabet_size, int n, std::size_t budget) {
  std::size_t size = 1;
  for (int t = 0; t < n; ++t) {
    if (size > budget / std::max<std::size_t>(alphabet_size, 1)) {
      throw BudgetExceeded("output law: |Z|^n = " + std::to_string(alphabet_size) + "^" +
                           std::to_string(n) + " exceeds the budget of " +
                           std::to_string(budget) + " entries");
    }
    size *= alphabet_size;
  }
  return size;
}

OutputLaw output_law(const Codebook& codebook, const Channel& w, std::size_t budget) {
  return output_law(codebook, w, 0, codebook.size(), budget);
}

OutputLaw output_law(const Codebook& codebook, const Channel& w, std::size_t first,
                     std::size_t last, std::size_t budget) {
  if (codebook.alphabet_size() != w.input_size()) {
    throw std::invalid_argument("output_law: codebook alphabet does not match the channel");
  }
  if (first >= last || last > codebook.size()) {
    throw std::invalid_argument("output_law: empty or out-of-range codeword range");
  }
  const std::size_t size = law_size(w.output_size(), codebook.n(), budget);
  const kernels::KernelTable& k = kernels::active();
  OutputLaw out{codebook.n(), w.output_size(), std::vector<double>(size, 0.0)};
  std::vector<double> law(size);
  std::vector<double> scratch(size);
  for (std::size_t i = first; i < last; ++i) {
    codeword_law(codebook.codeword(i), w, k, law, scratch);
    k.axpy(1.0, law.data(), out.masses.data(), size);
  }
  k.scale(out.masses.data(), 1.0 / static_cast<double>(last - first), out.masses.data(), size);
  return out;
}

OutputLaw reference_law(const Ensemble& ensemble, int n, const Channel& w, std::size_t budget) {
  if (ensemble.alphabet_size() != w.input_size()) {
    throw std::invalid_argument("reference_law: ensemble alphabet does not match the channel");
  }
  const std::size_t nz = w.output_size();
  const std::size_t size = law_size(nz, n, budget);
  OutputLaw out{n, nz, std::vector<double>(size)};
  if (ensemble.kind() == Ensemble::Kind::iid) {
    const Distribution pz = output_marginal(ensemble.input(), w);
    const kernels::KernelTable& k = kernels::active();
    std::vector<double> scratch(size);
    out.masses[0] = 1.0;
    std::size_t len = 1;
    for (int t = 0; t < n; ++t) {
      for (std::size_t z = 0; z < nz; ++z) {
        k.scale(out.masses.data(), pz[z], scratch.data() + z * len, len);
      }
      std::swap(out.masses, scratch);
      len *= nz;
    }
    return out;
  }
  if (ensemble.composition().n() != n) {
    throw std::invalid_argument("reference_law: composition blocklength differs from n");
  }
  std::map<std::vector<int>, double> by_type;
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::vector<int> counts(nz, 0);
    std::size_t rest = idx;
    for (int t = 0; t < n; ++t) {
      ++counts[rest % nz];
      rest /= nz;
    }
    auto it = by_type.find(counts);
    if (it == by_type.end()) {
      const double lp = log_reference_sequence_probability(ensemble, w, NType(counts));
      it = by_type.emplace(counts, std::exp(lp)).first;
    }
    out.masses[idx] = it->second;
  }
  return out;
}

DivergenceReport divergence_between(const OutputLaw& law, const OutputLaw& reference) {
  if (law.masses.size() != reference.masses.size()) {
    throw std::invalid_argument("divergence_between: laws have different sizes");
  }
  DivergenceReport r;
  double d = 0.0;
  for (std::size_t i = 0; i < law.masses.size(); ++i) {
    const double p = law.masses[i];
    if (p <= 0.0) continue;
    const double q = reference.masses[i];
    if (q <= 0.0) {
      if (!r.first_violation) r.first_violation = i;
      ++r.support_violations;
      continue;
    }
    d += p * std::log(p / q);
  }
  r.value = r.support_violations ? kInfinity : std::max(0.0, d);
  return r;
}

DivergenceReport divergence_to_reference(const Codebook& codebook, const Channel& w,
                                         const Ensemble& ensemble, std::size_t budget) {
  return divergence_between(output_law(codebook, w, budget),
                            reference_law(ensemble, codebook.n(), w, budget));
}

LeakageReport wiretap_leakage(const Codebook& codebook, const Channel& w,
                              const OutputLaw& reference) {
  if (!codebook.has_bins()) throw std::invalid_argument("wiretap_leakage: codebook has no bins");
  return leakage_of(binned_laws(codebook, w, reference.masses.size()), reference);
}

Ensemble ensemble_for(Ensemble::Kind kind, const Distribution& p, int n) {
  if (kind == Ensemble::Kind::iid) return Ensemble::iid(p);
  return Ensemble::constant_composition(quantize_to_ntype(p, n));
}

void fit_exponent(ExponentFit& fit) {
  const std::size_t k = fit.points.size();
  if (k < 3) throw std::invalid_argument("fit_exponent: need at least three blocklengths");
  double mx = 0.0;
  double my = 0.0;
  for (const ExponentPoint& pt : fit.points) {
    mx += pt.n;
    my += pt.minus_log_mean_d;
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const ExponentPoint& pt : fit.points) {
    sxx += (pt.n - mx) * (pt.n - mx);
    sxy += (pt.n - mx) * (pt.minus_log_mean_d - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (const ExponentPoint& pt : fit.points) {
    const double e = pt.minus_log_mean_d - (fit.intercept + fit.slope * pt.n);
    ss += e * e;
  }
  fit.residual_rms = std::sqrt(ss / k);
  fit.low_confidence = fit.residual_rms > 0.05 * std::abs(fit.slope) * mx;
}

ExponentFit empirical_exponent(Ensemble::Kind kind, const Distribution& p, const Channel& w,
                               double rate, const std::vector<int>& n_list,
                               const SimulationOptions& options) {
  if (n_list.size() < 3) {
    throw std::invalid_argument("empirical_exponent: need at least three blocklengths");
  }
  if (!std::is_sorted(n_list.begin(), n_list.end()) ||
      std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end() || n_list.front() < 1) {
    throw std::invalid_argument("empirical_exponent: blocklengths must be positive and ascending");
  }
  if (options.trials < 1) throw std::invalid_argument("empirical_exponent: trials must be >= 1");
  if (p.size() != w.input_size()) {
    throw std::invalid_argument("input distribution does not match channel input alphabet");
  }
  if (is_zero_capacity(p, w)) {
    throw DegenerateInput("I(P, W) = 0: divergence vanishes identically; no slope to fit");
  }
  for (int n : n_list) law_size(w.output_size(), n, options.budget);

  ExponentFit fit;
  fit.trials = options.trials;
  fit.seed = options.seed;
  const auto trials = static_cast<std::size_t>(options.trials);
  for (std::size_t j = 0; j < n_list.size(); ++j) {
    const int n = n_list[j];
    const Ensemble ensemble = ensemble_for(kind, p, n);
    const OutputLaw reference = reference_law(ensemble, n, w, options.budget);
    const double log_m = log_codebook_size(n, rate);
    if (log_m > std::log(kMaxCodebookSize)) {
      throw BudgetExceeded("empirical_exponent: exp(nR) codewords at n = " + std::to_string(n) +
                           " is too many to simulate");
    }
    const auto m = static_cast<std::size_t>(std::llround(std::exp(log_m)));
    const std::size_t bins = options.bins;

    ExponentPoint pt;
    pt.n = n;
    pt.codebook_size = m;
    const std::size_t size = reference.masses.size();
    for (std::size_t i = 0; i < 5; ++i) pt.probes.push_back({i * (size - 1) / 4, 0.0, 0.0, 0.0});
    std::vector<double> probe_sq(5, 0.0);
    std::vector<double> ds;
    double leak_sum = 0.0;
    double worst_residual = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::uint64_t seed = trial_seed(options.seed, j * trials + t);
      Codebook cb = sample_codebook(ensemble, n, m * std::max<std::size_t>(bins, 1), seed);
      if (bins) cb.partition(bins);
      const BinnedLaws laws = binned_laws(cb, w, options.budget);
      double d = 0.0;
      for (const OutputLaw& bin : laws.bins) {
        const DivergenceReport r = divergence_between(bin, reference);
        if (r.support_violations) {
          throw NumericalFailure("empirical_exponent: n = " + std::to_string(n) + ", seed " +
                                 std::to_string(seed) + ": " + describe_violation(r));
        }
        d += r.value;
      }
      d /= static_cast<double>(laws.bins.size());
      ds.push_back(d);
      if (bins) {
        const LeakageReport leak = leakage_of(laws, reference);
        leak_sum += leak.leak;
        worst_residual = std::max(worst_residual, std::abs(leak.identity_residual()));
      }
      for (std::size_t i = 0; i < 5; ++i) {
        const double v = laws.total.masses[pt.probes[i].sequence];
        pt.probes[i].mean += v;
        probe_sq[i] += v * v;
      }
    }
    const double tn = static_cast<double>(trials);
    double mean = 0.0;
    for (double d : ds) mean += d;
    mean /= tn;
    double var = 0.0;
    for (double d : ds) var += (d - mean) * (d - mean);
    var = trials > 1 ? var / (tn - 1.0) : 0.0;
    pt.mean_d = mean;
    pt.stderr_d = std::sqrt(var / tn);
    pt.minus_log_mean_d = -std::log(mean);
    if (bins) {
      pt.mean_leak = leak_sum / tn;
      pt.max_identity_residual = worst_residual;
    }
    for (std::size_t i = 0; i < 5; ++i) {
      ProbeStat& ps = pt.probes[i];
      const double s = ps.mean;
      ps.mean = s / tn;
      ps.stddev = trials > 1 ? std::sqrt(std::max(0.0, (probe_sq[i] - s * ps.mean) / (tn - 1.0)))
                             : 0.0;
      ps.reference = reference.masses[ps.sequence];
    }
    fit.points.push_back(std::move(pt));
  }
  fit_exponent(fit);
  return fit;
}

}  // namespace wiretap
