#include "wiretap/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "wiretap/cc_exponent.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/finite_n.hpp"
#include "wiretap/iid_exponent.hpp"
#include "wiretap/simulator.hpp"

namespace wiretap::cli {
namespace {

using nlohmann::json;

std::size_t size_field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw std::invalid_argument(std::string("spec: missing \"") + key + "\"");
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw std::invalid_argument(std::string("spec: \"") + key + "\" must be a positive integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> numbers(const json& v, const std::string& field) {
  if (!v.is_array()) throw std::invalid_argument("spec: \"" + field + "\" must be an array");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw std::invalid_argument("spec: \"" + field + "\" has a non-numeric entry");
    out.push_back(e.get<double>());
  }
  return out;
}

// Nested rows or a flat row-major array of rows * cols numbers.
std::vector<double> matrix(const json& v, std::size_t rows, std::size_t cols,
                           const std::string& field) {
  if (!v.is_array()) throw std::invalid_argument("spec: \"" + field + "\" must be an array");
  std::vector<double> flat;
  if (!v.empty() && v.front().is_array()) {
    if (v.size() != rows) {
      throw std::invalid_argument("spec: \"" + field + "\" has " + std::to_string(v.size()) +
                                  " rows, expected " + std::to_string(rows));
    }
    for (const json& row : v) {
      const std::vector<double> r = numbers(row, field);
      if (r.size() != cols) {
        throw std::invalid_argument("spec: a row of \"" + field + "\" has " +
                                    std::to_string(r.size()) + " entries, expected " +
                                    std::to_string(cols));
      }
      flat.insert(flat.end(), r.begin(), r.end());
    }
  } else {
    flat = numbers(v, field);
    if (flat.size() != rows * cols) {
      throw std::invalid_argument("spec: flat \"" + field + "\" has " +
                                  std::to_string(flat.size()) + " entries, expected " +
                                  std::to_string(rows * cols));
    }
  }
  return flat;
}

template <class F>
auto field_guard(const std::string& field, F&& make) {
  try {
    return make();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("spec: \"" + field + "\": " + e.what());
  }
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_rows(std::ostringstream& os, const Channel& c) {
  os << "[";
  for (std::size_t x = 0; x < c.input_size(); ++x) {
    os << (x ? ", [" : "[");
    for (std::size_t z = 0; z < c.output_size(); ++z) os << (z ? ", " : "") << g17(c(x, z));
    os << "]";
  }
  os << "]";
}

void write_vector(std::ostringstream& os, const Distribution& p) {
  os << "[";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << g17(p[i]);
  os << "]";
}

// CSV number: 12 significant digits, "inf" for +infinity.
std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double in_units(double nats, Units u) { return u == Units::bits ? nats / std::log(2.0) : nats; }

const char* units_name(Units u) { return u == Units::bits ? "bits" : "nats"; }

const char* ensemble_name(Ensemble::Kind k) { return k == Ensemble::Kind::iid ? "iid" : "cc"; }

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void provenance(std::ostringstream& os, const char* command, const ChannelSpec& spec,
                const OutputOptions& output) {
  os << "# tool=wiretapx\n# version=" << kToolVersion << "\n# command=" << command
     << "\n# spec_hash=fnv1a64:" << spec_hash(spec) << "\n# units=" << units_name(output.units)
     << "\n";
  if (spec.prefix) {
    os << "# prefix=applied; effective channel U->Z with |U|=" << spec.prefix->p_u.size()
       << ", input distribution P_U (P_X recorded in the spec only)\n";
  } else {
    os << "# prefix=none\n";
  }
  if (output.timestamp) os << "# timestamp=" << utc_timestamp() << "\n";
}

void require_positive_information(const Distribution& p, const Channel& w) {
  if (is_zero_capacity(p, w)) {
    throw DegenerateInput("I(P, W) = 0 for the effective channel: secrecy exponents are +infinity");
  }
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace

Channel ChannelSpec::effective_channel() const {
  return prefix ? compose_prefix(prefix->p_xu, w) : w;
}

Distribution ChannelSpec::effective_input() const { return prefix ? prefix->p_u : p_x; }

ChannelSpec parse_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("spec: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("spec: top level must be an object");
  const std::size_t nx = size_field(doc, "input_size");
  const std::size_t nz = size_field(doc, "output_size");
  for (const char* key : {"W", "P_X"}) {
    if (!doc.contains(key)) throw std::invalid_argument(std::string("spec: missing \"") + key + "\"");
  }
  ChannelSpec spec;
  spec.w = field_guard("W", [&] { return Channel(nx, nz, matrix(doc["W"], nx, nz, "W")); });
  spec.p_x = field_guard("P_X", [&] {
    std::vector<double> p = numbers(doc["P_X"], "P_X");
    if (p.size() != nx) {
      throw std::invalid_argument("has " + std::to_string(p.size()) + " entries, expected " +
                                  std::to_string(nx));
    }
    return Distribution(std::move(p));
  });
  if (doc.contains("prefix") && !doc["prefix"].is_null()) {
    const json& pre = doc["prefix"];
    if (!pre.is_object() || !pre.contains("P_XU") || !pre.contains("P_U")) {
      throw std::invalid_argument("spec: \"prefix\" must be an object with \"P_XU\" and \"P_U\"");
    }
    Prefix prefix;
    prefix.p_u = field_guard("prefix.P_U", [&] { return Distribution(numbers(pre["P_U"], "P_U")); });
    const std::size_t nu = prefix.p_u.size();
    prefix.p_xu = field_guard("prefix.P_XU", [&] {
      return Channel(nu, nx, matrix(pre["P_XU"], nu, nx, "P_XU"));
    });
    spec.prefix = std::move(prefix);
  }
  return spec;
}

ChannelSpec load_spec(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot read spec file " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_spec(buf.str());
}

std::string normalize_spec(const ChannelSpec& spec) {
  std::ostringstream os;
  os << "{\n  \"input_size\": " << spec.w.input_size()
     << ",\n  \"output_size\": " << spec.w.output_size() << ",\n  \"W\": ";
  write_rows(os, spec.w);
  os << ",\n  \"P_X\": ";
  write_vector(os, spec.p_x);
  if (spec.prefix) {
    os << ",\n  \"prefix\": {\n    \"P_XU\": ";
    write_rows(os, spec.prefix->p_xu);
    os << ",\n    \"P_U\": ";
    write_vector(os, spec.prefix->p_u);
    os << "\n  }";
  }
  os << "\n}\n";
  return os.str();
}

std::string spec_hash(const ChannelSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : normalize_spec(spec)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string cmd_sweep(const ChannelSpec& spec, const SweepRequest& request,
                      const OutputOptions& output) {
  if (!(request.r_min >= 0.0) || !std::isfinite(request.r_max) || request.steps < 1 ||
      request.r_max < request.r_min || (request.steps > 1 && request.r_max == request.r_min)) {
    throw std::invalid_argument("sweep: need 0 <= R_min < R_max and at least one step "
                                "(R_min = R_max only with a single step)");
  }
  const Distribution p = spec.effective_input();
  const Channel w = spec.effective_channel();
  require_positive_information(p, w);
  const CcSearchOptions search = fit_search_budget(p, w);
  const CcExponentSolver cc(p, w, search);

  std::ostringstream os;
  provenance(os, "sweep", spec, output);
  os << "# r_min=" << g17(request.r_min) << "\n# r_max=" << g17(request.r_max)
     << "\n# r_steps=" << request.steps << "\n# rate_units=nats\n# cc_grid=1/"
     << search.resolution << " with " << search.rounds << " refinement rounds\n"
     << "R,E_iid,E_cc,E_cc_lower,regime_iid,regime_cc\n";
  for (int i = 0; i < request.steps; ++i) {
    const double r = request.steps == 1
                         ? request.r_min
                         : request.r_min + (request.r_max - request.r_min) * i / (request.steps - 1);
    const IidExponent iid = es_iid(p, w, r);
    const CCExponentResult ccr = cc.solve(r);
    const LegendrePoint lower = es_cc_lower(p, w, r);
    os << num(in_units(r, output.units)) << "," << num(in_units(iid.exponent, output.units)) << ","
       << num(in_units(ccr.exponent, output.units)) << ","
       << num(in_units(lower.exponent, output.units)) << "," << to_string(iid.regime) << ","
       << to_string(ccr.regime) << "\n";
  }
  return os.str();
}

std::string cmd_finite_n(const ChannelSpec& spec, const FiniteNRequest& request,
                         const OutputOptions& output) {
  if (request.n_list.empty()) throw std::invalid_argument("finite-n: empty blocklength list");
  const Distribution p = spec.effective_input();
  const Channel w = spec.effective_channel();
  require_positive_information(p, w);
  double asymptotic = 0.0;
  if (request.ensemble == Ensemble::Kind::iid) {
    asymptotic = es_iid(p, w, request.rate).exponent;
  } else {
    asymptotic = CcExponentSolver(p, w, fit_search_budget(p, w)).solve(request.rate).exponent;
  }

  std::ostringstream body;
  std::ostringstream notes;
  std::vector<double> gaps;
  for (int n : request.n_list) {
    double value = 0.0;
    if (request.ensemble == Ensemble::Kind::iid) {
      value = es_n_iid(p, w, request.rate, n, request.cap).value;
    } else {
      const NType pn = quantize_to_ntype(p, n);
      notes << "# composition n=" << n << ": " << join(pn.counts()) << "\n";
      value = es_n_cc(pn, w, request.rate, request.cap).value;
    }
    gaps.push_back(value - asymptotic);
    body << n << "," << num(in_units(value, output.units)) << ","
         << num(in_units(asymptotic, output.units)) << ","
         << num(in_units(gaps.back(), output.units)) << "\n";
  }

  std::ostringstream os;
  provenance(os, "finite-n", spec, output);
  os << "# ensemble=" << ensemble_name(request.ensemble) << "\n# rate_nats=" << g17(request.rate)
     << "\n# n_list=" << join(request.n_list) << "\n# enumeration_cap=" << request.cap << "\n";
  if (request.ensemble == Ensemble::Kind::constant_composition) {
    os << "# compositions quantized from P per n (largest remainder, support kept)\n"
       << notes.str();
  }
  os << "n,E_n,E_asymptotic,gap\n" << body.str();
  if (gaps.size() > 1) {
    bool nonincreasing = true;
    for (std::size_t i = 1; i < gaps.size(); ++i) nonincreasing &= gaps[i] <= gaps[i - 1];
    os << "# gap_trend=" << (nonincreasing ? "nonincreasing" : "not_monotone") << "\n";
  }
  return os.str();
}

std::string cmd_simulate(const ChannelSpec& spec, const SimulateRequest& request,
                         const OutputOptions& output) {
  const Distribution p = spec.effective_input();
  const Channel w = spec.effective_channel();
  require_positive_information(p, w);
  SimulationOptions options;
  options.trials = request.trials;
  options.seed = request.seed;
  options.budget = request.budget;
  options.bins = request.bins;
  const ExponentFit fit =
      empirical_exponent(request.ensemble, p, w, request.rate, request.n_list, options);
  const Units u = output.units;
  const bool binned = request.bins > 0;

  std::ostringstream os;
  provenance(os, "simulate", spec, output);
  os << "# ensemble=" << ensemble_name(request.ensemble) << "\n# rate_nats=" << g17(request.rate)
     << "\n# n_list=" << join(request.n_list) << "\n# trials=" << request.trials
     << "\n# seed=" << request.seed << "\n# prng=" << kPrngName
     << "\n# trial_seed=seed XOR ((list_index*trials + trial) * 0x9E3779B97F4A7C15)"
     << "\n# law_budget=" << request.budget << "\n# bins=" << request.bins << "\n";
  if (u == Units::bits) os << "# minus_log_mean_D and the fit are -log2 of mean_D in nats\n";
  os << "n,mean_D,stderr_D,minus_log_mean_D,codebook_size"
     << (binned ? ",mean_leak,max_identity_residual" : "") << "\n";
  for (const ExponentPoint& pt : fit.points) {
    os << pt.n << "," << num(in_units(pt.mean_d, u)) << "," << num(in_units(pt.stderr_d, u)) << ","
       << num(in_units(pt.minus_log_mean_d, u)) << "," << pt.codebook_size;
    if (binned) {
      os << "," << num(in_units(*pt.mean_leak, u)) << ","
         << num(in_units(*pt.max_identity_residual, u));
    }
    os << "\n";
  }
  for (const ExponentPoint& pt : fit.points) {
    for (const ProbeStat& ps : pt.probes) {
      os << "# probe n=" << pt.n << " sequence=" << ps.sequence << " mean=" << num(ps.mean)
         << " stddev=" << num(ps.stddev) << " reference=" << num(ps.reference) << "\n";
    }
  }
  os << "# fit\nslope,intercept,residual_rms,confidence\n"
     << num(in_units(fit.slope, u)) << "," << num(in_units(fit.intercept, u)) << ","
     << num(in_units(fit.residual_rms, u)) << "," << (fit.low_confidence ? "low" : "ok") << "\n";
  return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Secrecy exponents of random wiretap codes: sweeps, finite-n studies, simulation",
               "wiretapx"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string spec_path;
  std::string out_path;
  std::string units = "nats";
  bool no_timestamp = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("spec", spec_path, "Channel spec (JSON)")->required();
    sub->add_option("-o,--output", out_path, "Write the CSV here instead of stdout");
    sub->add_option("--units", units, "Output units")->check(CLI::IsMember({"nats", "bits"}));
    sub->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp line");
  };
  auto ensemble_option = [](CLI::App* sub, std::string& target) {
    sub->add_option("--ensemble", target, "Codebook ensemble")
        ->check(CLI::IsMember({"iid", "cc"}))
        ->capture_default_str();
  };

  SweepRequest sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "E_iid, E_cc and the lower bound over a rate grid");
  common(sweep_cmd);
  sweep_cmd->add_option("--r-min", sweep.r_min, "Smallest rate (nats)")->capture_default_str();
  sweep_cmd->add_option("--r-max", sweep.r_max, "Largest rate (nats)")->capture_default_str();
  sweep_cmd->add_option("--r-steps", sweep.steps, "Number of rates, endpoints included")
      ->capture_default_str();

  FiniteNRequest finite;
  std::string finite_ensemble = "iid";
  CLI::App* finite_cmd = app.add_subcommand("finite-n", "Blocklength-n exponents by type enumeration");
  common(finite_cmd);
  ensemble_option(finite_cmd, finite_ensemble);
  finite_cmd->add_option("--rate", finite.rate, "Rate (nats)")->required();
  finite_cmd->add_option("--n", finite.n_list, "Blocklengths, comma separated")
      ->required()
      ->delimiter(',');
  finite_cmd->add_option("--budget", finite.cap, "Cap on enumerated types")->capture_default_str();

  SimulateRequest sim;
  std::string sim_ensemble = "iid";
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo divergence of random codebooks");
  common(sim_cmd);
  ensemble_option(sim_cmd, sim_ensemble);
  sim_cmd->add_option("--rate", sim.rate, "Rate (nats)")->required();
  sim_cmd->add_option("--n", sim.n_list, "Blocklengths (at least three), comma separated")
      ->required()
      ->delimiter(',');
  sim_cmd->add_option("--trials", sim.trials, "Codebooks per blocklength")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  sim_cmd->add_option("--budget", sim.budget, "Cap on |Z|^n")->capture_default_str();
  sim_cmd->add_option("--bins", sim.bins, "Number of secret-message bins (0: plain codebook)")
      ->capture_default_str();

  CLI::App* spec_cmd = app.add_subcommand("spec", "Channel spec utilities");
  spec_cmd->require_subcommand(1);
  CLI::App* normalize_cmd = spec_cmd->add_subcommand("normalize", "Rewrite a spec canonically");
  normalize_cmd->add_option("spec", spec_path, "Channel spec (JSON)")->required();
  normalize_cmd->add_option("-o,--output", out_path, "Write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const ChannelSpec spec = load_spec(spec_path);
    const OutputOptions output{units == "bits" ? Units::bits : Units::nats, !no_timestamp};
    auto kind = [](const std::string& s) {
      return s == "cc" ? Ensemble::Kind::constant_composition : Ensemble::Kind::iid;
    };
    std::string text;
    if (*sweep_cmd) {
      text = cmd_sweep(spec, sweep, output);
    } else if (*finite_cmd) {
      finite.ensemble = kind(finite_ensemble);
      text = cmd_finite_n(spec, finite, output);
    } else if (*sim_cmd) {
      sim.ensemble = kind(sim_ensemble);
      text = cmd_simulate(spec, sim, output);
    } else {
      text = normalize_spec(spec);
    }
    if (out_path.empty()) {
      out << text;
    } else {
      write_file(out_path, text);
    }
    return kExitOk;
  } catch (const DegenerateInput& e) {
    err << "wiretapx: degenerate input: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const BudgetExceeded& e) {
    err << "wiretapx: budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const NumericalFailure& e) {
    err << "wiretapx: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "wiretapx: error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace wiretap::cli
