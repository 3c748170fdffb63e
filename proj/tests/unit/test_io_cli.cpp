#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "xylocc/csv.hpp"
#include "xylocc/model.hpp"
#include "xylocc/version.hpp"

namespace {

const std::filesystem::path& work_dir() {
  static const auto dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("xylocc_cli_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    std::atexit([] {
      std::error_code ec;
      std::filesystem::remove_all(
          std::filesystem::temp_directory_path() /
              ("xylocc_cli_test_" + std::to_string(::getpid())),
          ec);
    });
    return d;
  }();
  return dir;
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const auto capture =
      work_dir() / ("capture_" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string(XYLOCC_CLI_PATH) + " " + args + " > " +
                          capture.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(capture);
  std::stringstream ss;
  ss << in.rdbuf();
  result.output = ss.str();
  return result;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("doubles format as the shortest exact decimal") {
  CHECK(xylocc::format_double(1.0) == "1");
  CHECK(xylocc::format_double(0.25) == "0.25");
  CHECK(xylocc::format_double(-0.5) == "-0.5");
  CHECK(xylocc::format_double(0.0) == "0");
  CHECK(xylocc::format_double(1e-06) == "1e-06");
  CHECK(xylocc::format_double(std::nan("")) == "nan");
  CHECK(xylocc::format_double(HUGE_VAL) == "inf");
  CHECK(xylocc::format_double(-HUGE_VAL) == "-inf");

  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
  std::uniform_int_distribution<int> exponent(-12, 12);
  for (int i = 0; i < 200; ++i) {
    const double x = mantissa(rng) * std::pow(10.0, exponent(rng));
    const double back = std::stod(xylocc::format_double(x));
    CHECK(back == x);
  }
}

TEST_CASE("csv writer emits metadata, header and quoted cells") {
  std::ostringstream out;
  {
    xylocc::CsvWriter csv(out, {"a", "b,c", "d"},
                          {{"k", "v"}, {"alpha", "0.1 1 10"}});
    csv.row({"1", "x,y", "z\"q"});
    csv.numeric_row({0.5, 2.0, 1e-06});
  }
  CHECK(out.str() ==
        "# alpha: 0.1 1 10\n"
        "# k: v\n"
        "a,\"b,c\",d\n"
        "1,\"x,y\",\"z\"\"q\"\n"
        "0.5,2,1e-06\n");
}

TEST_CASE("csv writer rejects malformed shapes") {
  std::ostringstream out;
  CHECK_THROWS_AS(xylocc::CsvWriter(out, {}), std::invalid_argument);
  xylocc::CsvWriter csv(out, {"a", "b"});
  CHECK_THROWS_AS(csv.row({"only-one"}), std::invalid_argument);
  CHECK_THROWS_AS(csv.numeric_row({1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("cli reports its version") {
  const auto res = run_cli("--version");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find(xylocc::kVersion) != std::string::npos);
}

TEST_CASE("cli rejects a block as large as the chain and leaves no file") {
  const auto target = work_dir() / "bad_block.csv";
  const auto res = run_cli("spectrum --n 6 --l 6 --g 0.5 --out " +
                           target.string());
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("config error") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(target));
  for (const auto& entry : std::filesystem::directory_iterator(work_dir()))
    CHECK(entry.path().filename().string().find("bad_block.csv.tmp") ==
          std::string::npos);
}

TEST_CASE("cli rejects an empty alpha grid") {
  const auto res = run_cli("signmap --n 4 --l 2 --g 0.5 --alpha-count 0");
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("config error") != std::string::npos);
}

TEST_CASE("cli rejects more eigenvalue columns than the block holds") {
  const auto res = run_cli("spectrum --n 6 --l 2 --k 5 --g 0.5");
  CHECK(res.exit_code == 2);
}

TEST_CASE("schedule mapping emits the exact boundary row") {
  const auto res = run_cli("aqc-map --s-num 2 --s-den 3 --s 0.9 --s 0.5");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("s,g,regime,verdict") != std::string::npos);
  CHECK(res.output.find("2/3,1,critical,") != std::string::npos);
  const std::string g_of_09 =
      xylocc::format_double(xylocc::aqc_schedule_to_g(0.9));
  CHECK(res.output.find("0.9," + g_of_09 + ",ferromagnetic,") !=
        std::string::npos);
  CHECK(res.output.find("0.5,2,paramagnetic,") != std::string::npos);
}

TEST_CASE("schedule values outside the unit interval are config errors") {
  CHECK(run_cli("aqc-map --s 1.5").exit_code == 2);
  CHECK(run_cli("aqc-map --s 0").exit_code == 2);
  CHECK(run_cli("aqc-map --s-num 3 --s-den 2").exit_code == 2);
  CHECK(run_cli("aqc-map").exit_code == 2);
}

TEST_CASE("field sweep reruns are byte-identical") {
  const auto first = work_dir() / "sweep_a.csv";
  const auto second = work_dir() / "sweep_b.csv";
  const std::string args =
      "spectrum --n 6 --l 3 --k 3 --g-min 0.4 --g-max 1.2 --g-step 0.4 --out ";
  REQUIRE(run_cli(args + first.string()).exit_code == 0);
  REQUIRE(run_cli(args + second.string()).exit_code == 0);
  const auto body = slurp(first);
  CHECK(body == slurp(second));
  CHECK(body.find("g,lambda1,lambda2,lambda3") != std::string::npos);
  CHECK(body.find("# version: ") != std::string::npos);
  CHECK(body.find("# g-grid: 0.4 0.8 1.2") != std::string::npos);
}

TEST_CASE("command-line flags override config file values") {
  const auto config = work_dir() / "sweep.json";
  {
    std::ofstream out(config);
    out << R"({"spectrum": {"n": 8, "l": 2, "g": [0.7]}})" << "\n";
  }
  const auto res = run_cli("spectrum --config " + config.string() +
                           " --n 6 --echo-config");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("\"n\": 6") != std::string::npos);
  CHECK(res.output.find("\"l\": 2") != std::string::npos);
  CHECK(res.output.find("0.7") != std::string::npos);
}

TEST_CASE("config file must be valid json") {
  const auto config = work_dir() / "broken.json";
  {
    std::ofstream out(config);
    out << "{not json";
  }
  const auto res =
      run_cli("spectrum --config " + config.string() + " --n 6 --l 3 --g 0.5");
  CHECK(res.exit_code == 2);
}

TEST_CASE("tiny free-fermion cross-check passes end to end") {
  const auto target = work_dir() / "oracle.csv";
  const auto res = run_cli(
      "oracle-check --n 8 --l 2 --l 4 --gamma 1 --g 0.5 --g 1.5 --out " +
      target.string());
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("oracle-check: PASS") != std::string::npos);
  const auto body = slurp(target);
  CHECK(body.find("gamma,g,l,status,max_dev") != std::string::npos);
  CHECK(body.find(",ok,") != std::string::npos);
  CHECK(body.find(",fail,") == std::string::npos);
}

TEST_CASE("sweep window pinned to a rising stretch is a numerical failure") {
  const auto target = work_dir() / "never_written.csv";
  const auto res = run_cli(
      "scaling --n 6 --n 8 --k 1 --g-min 0.2 --g-max 0.6 --g-step 0.2 --out " +
      target.string());
  CHECK(res.exit_code == 3);
  CHECK(res.output.find("numerical failure") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(target));
}

TEST_CASE("schedule rows join the nearest verdict from a sign-map run") {
  const auto signs = work_dir() / "signs.csv";
  const auto verdicts = work_dir() / "verdicts.csv";
  const auto res = run_cli(
      "signmap --n 6 --l 3 --g 0.5 --g 1.5 --alpha 0.5 --alpha 2 --alpha 50 "
      "--out " +
      signs.string() + " --verdicts-out " + verdicts.string());
  REQUIRE(res.exit_code == 0);

  const auto verdict_body = slurp(verdicts);
  CHECK(verdict_body.find(
            "gamma,g,verdict,alpha_pos_witness,alpha_neg_witness,error") !=
        std::string::npos);
  CHECK(verdict_body.find("# delta: " + xylocc::format_double(1e-4)) !=
        std::string::npos);

  std::string verdict_at_half;
  {
    std::istringstream lines(verdict_body);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.rfind("1,0.5,", 0) == 0) {
        const auto start = std::string("1,0.5,").size();
        verdict_at_half = line.substr(start, line.find(',', start) - start);
      }
    }
  }
  REQUIRE_FALSE(verdict_at_half.empty());

  // s = 0.8 maps next to g = 0.5, so the join must pick that row
  const auto joined = run_cli("aqc-map --s 0.8 --verdicts " +
                              verdicts.string());
  CHECK(joined.exit_code == 0);
  const std::string g_of_08 =
      xylocc::format_double(xylocc::aqc_schedule_to_g(0.8));
  CHECK(joined.output.find("0.8," + g_of_08 + ",ferromagnetic," +
                           verdict_at_half) != std::string::npos);

  const auto sign_body = slurp(signs);
  CHECK(sign_body.find("gamma,g,alpha,sign,dS_dg") != std::string::npos);
  CHECK(sign_body.find("# alpha-grid: 0.5 2 50") != std::string::npos);
}
