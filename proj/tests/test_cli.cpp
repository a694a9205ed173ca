#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "cli_harness.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "sbal/sbal.hpp"

using Catch::Approx;
using harness::quote;
using harness::TempDir;

namespace {

const std::string kCli = SBAL_CLI_PATH;
const std::string kFixture = std::string(SBAL_TEST_DATA) + "/fixture";

harness::RunResult sbal_run(const std::string& args, const TempDir& dir) { return harness::run(kCli, args, dir); }

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const char* kTriangleCsv = "a,b,c\n0,1,1\n1,0,1\n1,1,0\n";

}  // namespace

TEST_CASE("cli: usage errors exit with 1", "[cli]") {
  TempDir dir("usage");
  CHECK(sbal_run("", dir).exit_code == 1);
  CHECK(sbal_run("frobnicate", dir).exit_code == 1);
  CHECK(sbal_run("predict", dir).exit_code == 1);
  CHECK(sbal_run("predict --input " + quote(dir / "missing.csv"), dir).exit_code == 1);
  CHECK(sbal_run("--help", dir).exit_code == 0);

  harness::write_file(dir / "tri.csv", kTriangleCsv);
  const std::string base = "steer --input " + quote(dir / "tri.csv") + " --out " + quote(dir / "o");
  const auto unknown = sbal_run(base + " --agent zed --pattern +--", dir);
  CHECK(unknown.exit_code == 1);
  CHECK(unknown.err.find("zed") != std::string::npos);
  CHECK(sbal_run(base + " --agent a --pattern +x-", dir).exit_code == 1);
  CHECK(sbal_run(base + " --agent a --pattern +-", dir).exit_code == 1);
  CHECK(sbal_run(base + " --agent a", dir).exit_code == 1);

  harness::write_file(dir / "bad.csv", "a,b\n1,2\n2\n");
  const auto bad = sbal_run("predict --input " + quote(dir / "bad.csv"), dir);
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("line 3") != std::string::npos);
}

TEST_CASE("cli: simulate", "[cli]") {
  TempDir dir("simulate");
  const auto r = sbal_run("simulate --random 50 --seed 7 --out " + quote(dir / "a"), dir);
  REQUIRE(r.exit_code == 0);
  const std::string traj = harness::slurp(dir / "a/trajectory.csv");
  CHECK(traj.rfind("t,i,j,x_ij,x_ij_normalized\n", 0) == 0);
  CHECK(count_lines(traj) == 1 + 200 * (50 * 51 / 2));

  SECTION("initial matrix is written exactly") {
    const auto back = sbal::read_matrix_csv(dir / "a/initial_matrix.csv");
    CHECK(back.entries() == sbal::random_symmetric(50, 7).entries());
  }
  SECTION("the same seed gives identical bytes, a plot does not change the data") {
    REQUIRE(sbal_run("simulate --random 50 --seed 7 --plot --out " + quote(dir / "b"), dir).exit_code == 0);
    CHECK(harness::slurp(dir / "b/trajectory.csv") == traj);
    const std::string svg = harness::slurp(dir / "b/trajectory.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
  }
  SECTION("a different seed gives different data") {
    REQUIRE(sbal_run("simulate --random 50 --seed 8 --out " + quote(dir / "c"), dir).exit_code == 0);
    CHECK(harness::slurp(dir / "c/trajectory.csv") != traj);
  }
  SECTION("no finite escape time is a domain error") {
    harness::write_file(dir / "neg.csv", "p,q\n-1,0\n0,-1\n");
    const auto neg = sbal_run("simulate --input " + quote(dir / "neg.csv") + " --out " + quote(dir / "d"), dir);
    CHECK(neg.exit_code == 2);
    CHECK(neg.err.find("escape time") != std::string::npos);
  }
}

TEST_CASE("cli: predict", "[cli]") {
  TempDir dir("predict");
  harness::write_file(dir / "x.csv", "us,them,ally\n1,-1,1\n-1,1,-1\n1,-1,1\n");
  REQUIRE(sbal_run("predict --input " + quote(dir / "x.csv") + " --out " + quote(dir.path().string()), dir).exit_code ==
          0);
  const auto j = nlohmann::json::parse(harness::slurp(dir / "prediction.json"));
  CHECK(j["faction_pos"] == nlohmann::json({"us", "ally"}));
  CHECK(j["faction_neg"] == nlohmann::json({"them"}));
  CHECK(j["pattern"] == "+-+");
  CHECK(j["lambda1"].get<double>() == Approx(3.0));
  CHECK(j["escape_time"]["t_star"].get<double>() == Approx(1.0 / 3.0));
  CHECK(j["reliable"] == true);

  SECTION("all-ones: one faction") {
    harness::write_file(dir / "ones.csv", "p,q,r\n1,1,1\n1,1,1\n1,1,1\n");
    REQUIRE(sbal_run("predict --input " + quote(dir / "ones.csv") + " --out " + quote(dir / "o"), dir).exit_code == 0);
    const auto o = nlohmann::json::parse(harness::slurp(dir / "o/prediction.json"));
    CHECK(o["faction_pos"].size() == 3);
    CHECK(o["faction_neg"].empty());
  }
  SECTION("random matrix: factions are the sign classes of a direct eigensolve") {
    REQUIRE(sbal_run("predict --random 12 --seed 3 --out " + quote(dir / "r"), dir).exit_code == 0);
    const auto o = nlohmann::json::parse(harness::slurp(dir / "r/prediction.json"));
    const auto x = sbal::read_matrix_csv(dir / "r/initial_matrix.csv");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::to_eigen(x.entries()));
    const Eigen::VectorXd w = es.eigenvectors().col(11);
    std::vector<std::string> same, other;
    for (std::size_t k = 0; k < 12; ++k) (w(k) * w(0) > 0 ? same : other).push_back(x.labels()[k]);
    // either orientation of w1 names the same split
    const bool a = o["faction_pos"] == nlohmann::json(same) && o["faction_neg"] == nlohmann::json(other);
    const bool b = o["faction_neg"] == nlohmann::json(same) && o["faction_pos"] == nlohmann::json(other);
    CHECK((a || b));
  }
}

TEST_CASE("cli: steer and check", "[cli]") {
  TempDir dir("steer");
  harness::write_file(dir / "tri.csv", kTriangleCsv);
  const std::string tri = quote(dir / "tri.csv");

  SECTION("triangle example") {
    const auto r = sbal_run("steer --input " + tri + " --agent a --pattern +-- --epsilon 1 --out " +
                                quote(dir.path().string()),
                            dir);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(harness::slurp(dir / "steering.json"));
    const auto dx = j["dx"].get<std::vector<double>>();
    REQUIRE(dx.size() == 3);
    CHECK(dx[0] == Approx(0.0).margin(1e-12));
    CHECK(dx[1] == Approx(-2.0));
    CHECK(dx[2] == Approx(-2.0));
    CHECK(j["magnitude"].get<double>() == Approx(2 * std::sqrt(2.0)));
    CHECK(j["dominance_verified"] == true);
    CHECK(sbal_run("check --input " + tri + " --solution " + quote(dir / "steering.json"), dir).exit_code == 0);

    SECTION("a tampered solution fails the check") {
      auto t = j;
      t["dx"][1] = -1.5;
      harness::write_file(dir / "tampered.json", t.dump());
      const auto c = sbal_run("check --input " + tri + " --solution " + quote(dir / "tampered.json"), dir);
      CHECK(c.exit_code == 2);
      CHECK(c.out.find("FAIL") != std::string::npos);
    }
  }
  SECTION("a pattern that is already dominant needs nothing") {
    harness::write_file(dir / "vv.csv", "a,b,c\n1,-1,-1\n-1,1,1\n-1,1,1\n");
    REQUIRE(sbal_run("steer --input " + quote(dir / "vv.csv") + " --agent b --pattern +-- --epsilon 1 --out " +
                         quote(dir / "vv"),
                     dir)
                .exit_code == 0);
    const auto j = nlohmann::json::parse(harness::slurp(dir / "vv/steering.json"));
    CHECK(j["magnitude"].get<double>() <= 1e-12);
  }
  SECTION("lambda_star below lambda_1 is rejected") {
    CHECK(sbal_run("steer --input " + tri + " --agent b --pattern +++ --lambda-star 1 --out " +
                       quote(dir.path().string()),
                   dir)
              .exit_code == 2);
  }
  SECTION("random instances pass an independent re-check") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 3 + rng() % 8;
      std::string pattern;
      for (std::size_t k = 0; k < n; ++k) pattern += rng() & 1u ? '+' : '-';
      const std::string agent = "agent" + std::to_string(1 + rng() % n);
      const std::string out = dir / ("r" + std::to_string(trial));
      INFO("n = " << n << ", pattern " << pattern << ", " << agent);
      const auto r = sbal_run("steer --random " + std::to_string(n) + " --seed " + std::to_string(trial) +
                                  " --agent " + agent + " --pattern " + pattern + " --out " + quote(out),
                              dir);
      REQUIRE(r.exit_code == 0);
      const auto c = sbal_run("check --input " + quote(out + "/initial_matrix.csv") + " --solution " +
                                  quote(out + "/steering.json"),
                              dir);
      CHECK(c.exit_code == 0);
    }
  }
}

TEST_CASE("cli: sbii", "[cli]") {
  TempDir dir("sbii");
  harness::write_file(dir / "tri.csv", kTriangleCsv);
  const std::string args = "sbii --input " + quote(dir / "tri.csv") + " --pattern +-- --epsilon 1 --out ";
  REQUIRE(sbal_run(args + quote(dir / "a"), dir).exit_code == 0);
  const std::string csv = harness::slurp(dir / "a/sbii.csv");
  std::istringstream in(csv);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "agent,sbii_value,rank,epsilon");
  CHECK(count_lines(csv) == 4);
  // 2 sqrt 2, as in the steering example
  CHECK(csv.find("a,2.82842712475,") != std::string::npos);

  REQUIRE(sbal_run(args + quote(dir / "b") + " --plot", dir).exit_code == 0);
  CHECK(harness::slurp(dir / "b/sbii.csv") == csv);
  CHECK(harness::slurp(dir / "b/sbii.svg").find("<svg") != std::string::npos);

  SECTION("rank-one target: every SBII is zero") {
    harness::write_file(dir / "vv.csv", "a,b,c,d\n1,-1,1,1\n-1,1,-1,-1\n1,-1,1,1\n1,-1,1,1\n");
    REQUIRE(sbal_run("sbii --input " + quote(dir / "vv.csv") + " --pattern +-++ --epsilon 1 --out " + quote(dir / "c"),
                     dir)
                .exit_code == 0);
    std::istringstream rows(harness::slurp(dir / "c/sbii.csv"));
    std::string line;
    std::getline(rows, line);
    int n = 0;
    while (std::getline(rows, line)) {
      CHECK(line.find(",0,") != std::string::npos);
      ++n;
    }
    CHECK(n == 4);
  }
  SECTION("a dominant agent ranks first") {
    // x_ij = s_ij g_i g_j with one heavy agent (g = 1) among light ones
    harness::write_file(dir / "dom.csv",
                        "small1,big,small2,small3\n"
                        "0.04,0.1,-0.01,0.02\n"
                        "0.1,1,0.15,-0.12\n"
                        "-0.01,0.15,0.0625,0.03\n"
                        "0.02,-0.12,0.03,0.09\n");
    REQUIRE(sbal_run("sbii --input " + quote(dir / "dom.csv") + " --out " + quote(dir / "d"), dir).exit_code == 0);
    std::istringstream rows(harness::slurp(dir / "d/sbii.csv"));
    std::string header, first;
    std::getline(rows, header);
    std::getline(rows, first);
    CHECK(first.rfind("big,", 0) == 0);
  }
}

TEST_CASE("cli: ingest and series", "[cli]") {
  TempDir dir("series");
  const std::string input = " --input " + quote(kFixture);

  SECTION("ingest writes one matrix per year") {
    REQUIRE(sbal_run("ingest" + input + " --years 1970:1971 --out " + quote(dir.path().string()), dir).exit_code == 0);
    const auto m = sbal::read_matrix_csv(dir / "network_1970.csv");
    CHECK(m.labels() == std::vector<std::string>{"GBR", "RUS", "USA"});
    CHECK(m(2, 2) == 1.0);
    CHECK(harness::fs::exists(dir / "network_1971.csv"));
  }
  SECTION("series reproduces the golden files, with or without plots") {
    const auto r = sbal_run("series" + input + " --years 1970:1971 --out " + quote(dir / "a"), dir);
    REQUIRE(r.exit_code == 0);
    CHECK(r.err.find("skipped 1 vote rows") != std::string::npos);
    CHECK(harness::slurp(dir / "a/factions.csv") == harness::slurp(kFixture + "/factions.golden.csv"));
    CHECK(harness::slurp(dir / "a/sbii.csv") == harness::slurp(kFixture + "/sbii.golden.csv"));

    REQUIRE(sbal_run("series" + input + " --years 1970:1971 --plot --out " + quote(dir / "b"), dir).exit_code == 0);
    CHECK(harness::slurp(dir / "b/factions.csv") == harness::slurp(dir / "a/factions.csv"));
    CHECK(harness::slurp(dir / "b/sbii.csv") == harness::slurp(dir / "a/sbii.csv"));
    CHECK(harness::slurp(dir / "b/factions.svg").find("<svg") != std::string::npos);
    CHECK(harness::slurp(dir / "b/sbii.svg").find("<svg") != std::string::npos);
  }
  SECTION("a year with missing GDP is skipped with a warning") {
    std::string gdp = harness::slurp(kFixture + "/gdp.csv");
    gdp = gdp.substr(0, gdp.find("1971"));
    harness::write_file(dir / "gdp.csv", gdp);
    const auto r = sbal_run("series --votes " + quote(kFixture + "/votes.csv") + " --gdp " + quote(dir / "gdp.csv") +
                                " --years 1970:1971 --out " + quote(dir / "c"),
                            dir);
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("skipping 1971") != std::string::npos);
    const std::string factions = harness::slurp(dir / "c/factions.csv");
    CHECK(count_lines(factions) == 4);
    CHECK(factions.find("1971") == std::string::npos);
  }
  SECTION("no usable year") {
    CHECK(sbal_run("series" + input + " --years 1990:1991 --out " + quote(dir / "d"), dir).exit_code == 1);
    CHECK(sbal_run("series" + input + " --years 1971:1970", dir).exit_code == 1);
    CHECK(sbal_run("series" + input, dir).exit_code == 1);
  }
}
