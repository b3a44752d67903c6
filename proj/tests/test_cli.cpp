#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "wigflow/cli.hpp"

using namespace wigflow;
using oracle::pi;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "wigflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("wigflow_test_" + name);
}

}  // namespace

TEST(Parse, Scalars) {
  EXPECT_EQ(cli::parse_scalar("1.5"), 1.5);
  EXPECT_EQ(cli::parse_scalar("pi"), pi);
  EXPECT_EQ(cli::parse_scalar("-pi"), -pi);
  EXPECT_EQ(cli::parse_scalar("2pi"), 2 * pi);
  EXPECT_EQ(cli::parse_scalar("pi/2"), pi / 2);
  EXPECT_EQ(cli::parse_scalar("-3*pi/4"), -3 * pi / 4);
  EXPECT_THROW(cli::parse_scalar("abc"), Error);
  EXPECT_THROW(cli::parse_scalar("1.5x"), Error);
  EXPECT_THROW(cli::parse_scalar("pi/0"), Error);
  const auto iv = cli::parse_interval("-pi:pi/2");
  EXPECT_EQ(iv.lo, -pi);
  EXPECT_EQ(iv.hi, pi / 2);
  EXPECT_THROW(cli::parse_interval("1"), Error);
}

TEST(Cli, FieldCsvExample) {
  const auto path = temp("divw.csv");
  const Outcome r = run({"field", "--model", "harper", "--nu2", "1", "--gamma", "0.25", "--quantity", "divw", "--grid",
                     "256", "--range", "-pi:pi", "--format", "csv", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path);
  const auto rows = read_field_csv(in);
  EXPECT_EQ(rows.size(), 256u * 256u);
  EXPECT_NEAR(rows.front().x, -pi + pi / 256, 1e-15);
  EXPECT_NEAR(rows.front().k, -pi + pi / 256, 1e-15);
  EXPECT_NEAR(rows[1].k, rows[0].k, 0.0);  // k-major: x varies fastest
  std::filesystem::remove(path);
}

TEST(Cli, CsvRoundTripsExactly) {
  const QuantifierField f = evaluate_field(Quantity::curl, PhaseGrid(-pi, pi, -3, 3, 12, 9),
                                           HamiltonianModel::harper(0.7), GaussianEnsemble(1.5, {0.1, 0}));
  std::stringstream s;
  write_field_csv(s, f);
  const auto rows = read_field_csv(s);
  ASSERT_EQ(rows.size(), f.values.size());
  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    if (f.mask[idx]) {
      EXPECT_TRUE(std::isnan(rows[idx].value));
    } else {
      EXPECT_EQ(rows[idx].value, f.values[idx]);
    }
    EXPECT_EQ(rows[idx].x, f.grid.x(idx % 12));
    EXPECT_EQ(rows[idx].k, f.grid.k(idx / 12));
  }
}

TEST(Cli, PgmAndJsonFormats) {
  const QuantifierField f = evaluate_field(Quantity::div_w, PhaseGrid(-pi, pi, -pi, pi, 16, 10),
                                           HamiltonianModel::harper(1.3), GaussianEnsemble(1.5, {0.3, 0}));
  std::stringstream pgm;
  write_field_pgm(pgm, f);
  std::string magic, comment, quantity;
  std::size_t w = 0, h = 0;
  int maxval = 0;
  pgm >> magic >> comment >> quantity >> w >> h >> maxval;
  EXPECT_EQ(magic, "P2");
  EXPECT_EQ(quantity, "divw");
  EXPECT_EQ(w, 16u);
  EXPECT_EQ(h, 10u);
  EXPECT_EQ(maxval, 65535);
  std::vector<long> levels;
  for (long v; pgm >> v;) levels.push_back(v);
  ASSERT_EQ(levels.size(), 160u);
  long lo = 65535, hi = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (f.mask[i]) {
      EXPECT_EQ(levels[i], 0);
    } else {
      lo = std::min(lo, levels[i]);
      hi = std::max(hi, levels[i]);
    }
  }
  EXPECT_EQ(lo, 0);
  EXPECT_EQ(hi, 65535);

  std::stringstream js;
  write_field_json(js, f);
  const auto doc = nlohmann::json::parse(js.str());
  EXPECT_EQ(doc["quantity"], "divw");
  EXPECT_EQ(doc["grid"]["nx"], 16);
  EXPECT_EQ(doc["values"].size(), 160u);
  EXPECT_TRUE(doc["values"][0].is_null());
}

TEST(Cli, StabilityExample) {
  const Outcome r = run({"stability", "--model", "harper", "--nu2", "1", "--gamma", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  ASSERT_TRUE(doc.is_array());
  bool found = false;
  for (const auto& rep : doc) {
    if (std::abs(rep["point"][0].get<double>()) < 1e-8 && std::abs(rep["point"][1].get<double>()) < 1e-8) {
      found = true;
      EXPECT_NEAR(rep["trace"].get<double>(), 0.0, 1e-8);
      EXPECT_NEAR(rep["delta"].get<double>(), -3.8381, 1e-4);
      EXPECT_EQ(rep["classification"], "non_hyperbolic_center");
      EXPECT_EQ(rep["jacobian"].size(), 4u);
      for (const char* key : {"det", "curl", "inv"}) EXPECT_TRUE(rep.contains(key));
    }
  }
  EXPECT_TRUE(found);
}

TEST(Cli, OpenOrbitExitsTwo) {
  const Outcome r = run({"orbit", "--model", "harper", "--nu2", "2", "--epsilon", "0.5", "--start", "auto"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("open trajectory"), std::string::npos);
}

TEST(Cli, ClosedOrbitReport) {
  const Outcome r = run({"orbit", "--nu2", "2", "--epsilon", "1.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["classification"], "closed");
  EXPECT_GT(doc["orbit"]["period"].get<double>(), 0.0);
  EXPECT_NEAR(doc["energy"].get<double>(), 1.5, 1e-12);
}

TEST(Cli, FluxReport) {
  const Outcome r = run({"flux", "--model", "ho", "--gamma", "1", "--epsilon", "0.5", "--range", "-3:3", "--grid", "32"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  for (const char* k : {"probability", "purity", "von_neumann", "renyi"}) {
    EXPECT_LE(std::abs(doc["boundary"][k].get<double>()), 1e-10) << k;
  }
  EXPECT_LE(std::abs(doc["volume"]["value"].get<double>()), 1e-12);
}

TEST(Cli, ClosedBackendField) {
  const Outcome a = run({"field", "--gamma", "0.5", "--quantity", "curl", "--grid", "16", "--backend", "closed",
                     "--format", "json"});
  const Outcome b = run({"field", "--gamma", "0.5", "--quantity", "curl", "--grid", "16", "--format", "json"});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  const auto ja = nlohmann::json::parse(a.out)["values"];
  const auto jb = nlohmann::json::parse(b.out)["values"];
  for (std::size_t i = 0; i < ja.size(); ++i) {
    if (!jb[i].is_null()) EXPECT_NEAR(ja[i].get<double>(), jb[i].get<double>(), 1e-6);
  }
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"field", "--quantity", "bogus"}).code, 1);
  EXPECT_EQ(run({"field", "--range", "1"}).code, 1);
  EXPECT_EQ(run({"field", "--nu2", "-1"}).code, 1);
  EXPECT_EQ(run({"field", "--no-such-flag"}).code, 1);
  EXPECT_EQ(run({"field", "--psi", "/nonexistent/psi.txt"}).code, 1);
}

TEST(Cli, NumericFailureExitsTwo) {
  const Outcome r = run({"field", "--grid", "8", "--eta-max", "1", "--gamma", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("NonConvergence"), std::string::npos);
  EXPECT_EQ(run({"field", "--grid", "8", "--eta-max", "1", "--gamma", "1", "--truncate"}).code, 0);
}

TEST(Cli, HelpListsFlagsWithUnits) {
  const Outcome r = run({"field", "--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* flag : {"--model", "--nu2", "--gamma", "--center", "--psi", "--grid", "--range", "--xrange",
                           "--krange", "--eta-max", "--term-tol", "--truncate", "--backend", "--out", "--quantity",
                           "--theta", "--format"}) {
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  }
  EXPECT_NE(r.out.find("dimensionless"), std::string::npos);
}

TEST(Cli, OutputIndependentOfThreadCount) {
  const std::vector<std::string> args{"field", "--gamma", "0.5", "--quantity", "inv", "--grid", "40"};
  ::setenv("WIGFLOW_THREADS", "1", 1);
  const Outcome one = run(args);
  ::setenv("WIGFLOW_THREADS", "8", 1);
  const Outcome eight = run(args);
  ::unsetenv("WIGFLOW_THREADS");
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(one.out, eight.out);
}

TEST(Cli, ReadsWavefunctionFile) {
  const auto path = temp("psi.txt");
  {
    std::ofstream f(path);
    f << "# ground state\n";
    for (int i = 0; i <= 2000; ++i) {
      const double x = -10 + 0.01 * i;
      f << format_double(x) << ' ' << format_double(std::exp(-0.5 * x * x)) << " 0\n";
    }
  }
  const Outcome r = run({"field", "--model", "ho", "--psi", path.string(), "--grid", "24", "--range", "-3:3",
                     "--quantity", "divw", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  for (const auto& v : doc["values"]) {
    if (!v.is_null()) EXPECT_LE(std::abs(v.get<double>()), 1e-12);
  }
  std::filesystem::remove(path);
}
