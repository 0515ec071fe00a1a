#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wiretap/cli.hpp"

using namespace wiretap;

namespace {

const std::string kData = WIRETAP_TEST_DATA;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "wiretapx");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  }
  return rows;
}

std::vector<double> fields(const std::string& row) {
  std::vector<double> v;
  std::istringstream in(row);
  for (std::string cell; std::getline(in, cell, ',');) v.push_back(std::strtod(cell.c_str(), nullptr));
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("spec parsing accepts nested and flat matrices") {
    const cli::ChannelSpec a = cli::load_spec(kData + "/bsc.json");
    const cli::ChannelSpec b = cli::load_spec(kData + "/bsc_flat.json");
    CHECK(a.w == b.w);
    CHECK(a.p_x == b.p_x);
    CHECK(cli::spec_hash(a) == cli::spec_hash(b));
    CHECK_FALSE(a.prefix.has_value());
  }

  TEST_CASE("spec errors name the field") {
    CHECK_THROWS_WITH_AS(cli::load_spec(kData + "/missing_px.json"), doctest::Contains("P_X"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(cli::load_spec(kData + "/bad_row.json"), doctest::Contains("\"W\""),
                         std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_spec("{\"input_size\": 2"), std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_spec(R"({"input_size": 2, "output_size": 2, "W": [1, 0, 0], "P_X": [1, 0]})"),
                    std::invalid_argument);
    const Result r = invoke({"sweep", kData + "/missing_px.json"});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("P_X") != std::string::npos);
  }

  TEST_CASE("prefix is applied to give the effective channel") {
    const cli::ChannelSpec s = cli::load_spec(kData + "/prefixed.json");
    REQUIRE(s.prefix.has_value());
    const Channel eff = s.effective_channel();
    CHECK(eff.input_size() == 3);
    CHECK(eff(0, 0) == doctest::Approx(0.9 * 0.89 + 0.1 * 0.11));
    CHECK(s.effective_input()[2] == 0.5);
    const Result r = invoke({"sweep", kData + "/prefixed.json", "--r-steps", "3", "--no-timestamp"});
    CHECK(r.code == 0);
    CHECK(r.out.find("# prefix=applied") != std::string::npos);
  }

  TEST_CASE("normalize round-trips bit-exactly") {
    const cli::ChannelSpec s = cli::load_spec(kData + "/prefixed.json");
    const std::string text = cli::normalize_spec(s);
    const cli::ChannelSpec back = cli::parse_spec(text);
    CHECK(back.w == s.w);
    CHECK(back.p_x == s.p_x);
    CHECK(back.prefix->p_xu == s.prefix->p_xu);
    CHECK(back.prefix->p_u == s.prefix->p_u);
    CHECK(cli::normalize_spec(back) == text);
    const cli::ChannelSpec odd = cli::parse_spec(
        R"({"input_size": 2, "output_size": 2, "W": [[0.1, 0.9], [0.30000000000000004, 0.7]], "P_X": [0.3333333333333333, 0.6666666666666667]})");
    const cli::ChannelSpec odd_back = cli::parse_spec(cli::normalize_spec(odd));
    CHECK(odd_back.w == odd.w);
    CHECK(odd_back.p_x == odd.p_x);
    const Result r = invoke({"spec", "normalize", kData + "/bsc.json"});
    CHECK(r.code == 0);
    CHECK(r.out == cli::normalize_spec(cli::load_spec(kData + "/bsc.json")));
  }

  TEST_CASE("sweep output") {
    const Result r = invoke({"sweep", kData + "/bsc.json", "--r-min", "0.3", "--r-max", "1.0",
                             "--r-steps", "8"});
    REQUIRE(r.code == 0);
    const auto rows = data_lines(r.out);
    REQUIRE(rows.size() == 9);
    CHECK(rows[0] == "R,E_iid,E_cc,E_cc_lower,regime_iid,regime_cc");
    double prev_r = -1.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto v = fields(rows[i]);
      CHECK(v[0] > prev_r);
      prev_r = v[0];
      CHECK(std::abs(v[1] - v[2]) < 2e-4);
      CHECK(v[3] <= v[2] + 1e-6);
      CHECK(v[1] >= 0.0);
    }
    CHECK(r.out.find("# timestamp=") != std::string::npos);
    CHECK(r.out.find("# spec_hash=fnv1a64:") != std::string::npos);
  }

  TEST_CASE("bits divide by ln 2") {
    const Result nats = invoke({"sweep", kData + "/zchannel.json", "--r-min", "0.5", "--r-max",
                                "0.5", "--r-steps", "1", "--no-timestamp"});
    const Result bits = invoke({"sweep", kData + "/zchannel.json", "--r-min", "0.5", "--r-max",
                                "0.5", "--r-steps", "1", "--no-timestamp", "--units", "bits"});
    REQUIRE(nats.code == 0);
    REQUIRE(bits.code == 0);
    const auto n = fields(data_lines(nats.out)[1]);
    const auto b = fields(data_lines(bits.out)[1]);
    for (int i = 0; i < 4; ++i) CHECK(b[i] == doctest::Approx(n[i] / std::log(2.0)).epsilon(1e-10));
    CHECK(invoke({"sweep", kData + "/bsc.json", "--units", "hartleys"}).code == cli::kExitUsage);
  }

  TEST_CASE("finite-n output") {
    Result r = invoke({"finite-n", kData + "/bsc.json", "--rate", "0.6", "--n", "4,8,16,32,64",
                       "--no-timestamp"});
    REQUIRE(r.code == 0);
    auto rows = data_lines(r.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == "n,E_n,E_asymptotic,gap");
    CHECK(fields(rows[5])[3] < 3e-2);
    CHECK(r.out.find("# gap_trend=") != std::string::npos);

    r = invoke({"finite-n", kData + "/zchannel.json", "--ensemble", "cc", "--rate", "0.5", "--n",
                "7", "--no-timestamp"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# composition n=7: 3 4") != std::string::npos);
    CHECK(r.out.find("gap_trend") == std::string::npos);
    CHECK(data_lines(r.out).size() == 2);
  }

  TEST_CASE("exit codes") {
    const std::string zero = kData + "/zero_capacity.json";
    CHECK(invoke({"sweep", zero}).code == cli::kExitDegenerate);
    CHECK(invoke({"finite-n", zero, "--rate", "0.3", "--n", "4"}).code == cli::kExitDegenerate);
    CHECK(invoke({"simulate", zero, "--rate", "0.3", "--n", "4,6,8"}).code == cli::kExitDegenerate);
    CHECK(invoke({"finite-n", kData + "/bsc.json", "--rate", "0.3", "--n", "40", "--budget", "100"})
              .code == cli::kExitBudget);
    CHECK(invoke({"simulate", kData + "/bsc.json", "--rate", "0.3", "--n", "4,6,18"}).code ==
          cli::kExitBudget);
    CHECK(invoke({"simulate", kData + "/bsc.json", "--rate", "0.3", "--n", "4,6,8", "--budget",
                  "100"})
              .code == cli::kExitBudget);
    CHECK(invoke({}).code == cli::kExitUsage);
    CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
    CHECK(invoke({"sweep", kData + "/does_not_exist.json"}).code == cli::kExitUsage);
    CHECK(invoke({"--help"}).code == cli::kExitOk);
  }

  TEST_CASE("simulate output with bins") {
    const Result r = invoke({"simulate", kData + "/bsc.json", "--rate", "0.4", "--n", "4,6,8",
                             "--trials", "6", "--seed", "9", "--bins", "4", "--no-timestamp"});
    REQUIRE(r.code == 0);
    const auto rows = data_lines(r.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == "n,mean_D,stderr_D,minus_log_mean_D,codebook_size,mean_leak,max_identity_residual");
    for (int i = 1; i <= 3; ++i) CHECK(fields(rows[i])[6] < 1e-10);
    CHECK(rows[4] == "slope,intercept,residual_rms,confidence");
    CHECK(r.out.find("# prng=mt19937_64") != std::string::npos);
    CHECK(r.out.find("# seed=9") != std::string::npos);
    CHECK(r.out.find("# probe n=8 sequence=255") != std::string::npos);
  }

  TEST_CASE("identical seeds give byte-identical files") {
    const auto dir = std::filesystem::temp_directory_path() / "wiretapx_cli_test";
    std::filesystem::create_directories(dir);
    const std::vector<std::string> base{"simulate", kData + "/zchannel.json", "--ensemble", "cc",
                                        "--rate", "0.5", "--n", "5,7,9", "--trials", "8",
                                        "--seed", "42", "--no-timestamp", "-o"};
    auto a = base;
    a.push_back((dir / "a.csv").string());
    auto b = base;
    b.push_back((dir / "b.csv").string());
    REQUIRE(invoke(a).code == 0);
    REQUIRE(invoke(b).code == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    auto c = base;
    c[11] = "43";
    c.push_back((dir / "c.csv").string());
    REQUIRE(invoke(c).code == 0);
    CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));
    std::filesystem::remove_all(dir);
  }
}
