#include <doctest.h>

#include "experiments.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

using namespace pel;
using namespace pel::experiments;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("pel-cli-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const auto path = scratch() / name;
  std::ofstream(path) << text;
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int pel_exit(const std::string& args) {
  const std::string cmd = std::string(PEL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
  const auto c = config_from_json(Json::parse(R"({"task": "mc-entropy", "spec": {"kind": "builtin", "name": "ex4-mixed-iid"},
      "lengths": [4, 8], "samples": 500, "seed": 3, "estimator": "miller_madow", "format": "json"})"));
  CHECK(*c.task == Task::McEntropy);
  CHECK(c.lengths == std::vector<std::size_t>{4, 8});
  CHECK(c.estimator == Estimator::MillerMadow);
  CHECK(c.format == Format::Json);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"task": "dance"})")), SchemaError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"tsak": "rate"})")), SchemaError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"task": "rate", "format": "xml"})")), SchemaError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"task": "rate", "workers": 0})")), SchemaError);
  CHECK_THROWS_AS(config_from_json(Json::parse(R"({"task": "rate", "n_max": -2})")), SchemaError);
}

TEST_CASE("seed must be explicit for Monte Carlo") {
  auto c = config_from_json(Json::parse(R"({"task": "mc-entropy", "spec": {"kind": "builtin", "name": "ex2-finite-iid"},
      "n_max": 3, "samples": 200})"));
  CHECK_THROWS_AS(run(c), SchemaError);
  c.seed = 4;
  CHECK(run(c).exit_code == 0);
}

TEST_CASE("rate report for the Markov example") {
  ExperimentConfig c;
  c.task = Task::Rate;
  c.spec = builtin_spec("ex5-mixed-markov");
  const auto out = run(c);
  CHECK(out.exit_code == 0);
  const auto at = out.report.find("rate_bits,");
  REQUIRE(at != std::string::npos);
  const double value = std::stod(out.report.substr(at + 10));
  CHECK(std::round(value * 1e5) / 1e5 == doctest::Approx(1.15564).epsilon(1e-12));
}

TEST_CASE("pattern task on a text file") {
  const auto input = write_file("sentence.txt", "english is hard to lea\naaaa\n");
  ExperimentConfig c;
  c.task = Task::Pattern;
  c.input_path = input.string();
  const auto out = run(c);
  CHECK(out.report ==
        "# pel patterns v1\nline,length,distinct,pattern\n"
        "1,22,13,\"1,2,3,4,5,6,7,8,5,6,8,7,9,10,11,8,12,13,8,4,1,9\"\n"
        "2,4,1,\"1,1,1,1\"\n");
}

TEST_CASE("strict mode turns hypothesis warnings into failures") {
  ExperimentConfig c;
  c.task = Task::Rate;
  c.spec = builtin_spec("ex7-sticky");
  auto relaxed = run(c);
  CHECK(relaxed.exit_code == 0);
  CHECK_FALSE(relaxed.warnings.empty());
  c.strict = true;
  CHECK(run(c).exit_code == 1);
}

TEST_CASE("bounds and growth tasks") {
  ExperimentConfig c;
  c.task = Task::Bounds;
  c.spec = builtin_spec("ex4-mixed-iid");
  c.n_max = 20;
  const auto b = run(c).report;
  CHECK(b.find("20,1.58092834701661,0,ex4-mixed-iid") != std::string::npos);

  c.spec = builtin_spec("ex5-mixed-markov");
  CHECK(run(c).report.find("# pel waiting-time-bound v1") == 0);

  c.spec = builtin_spec("ex7-sticky");
  CHECK_THROWS_AS(run(c), UnsupportedSpec);

  ExperimentConfig g;
  g.task = Task::Growth;
  g.n_grid = {1000, 10000};
  g.format = Format::Json;
  const auto j = Json::parse(run(g).report);
  CHECK(j.at("points").size() == 2);
}

TEST_CASE("exact outputs are byte-identical across runs") {
  const auto config = write_file("exact.json", R"({"task": "exact-entropy",
      "spec": {"kind": "builtin", "name": "ex4-mixed-iid"}, "n_min": 1, "n_max": 7})");
  const auto a = scratch() / "a.csv", b = scratch() / "b.csv";
  CHECK(pel_exit("exact-entropy --config " + config.string() + " --out " + a.string()) == 0);
  CHECK(pel_exit("exact-entropy --config " + config.string() + " --out " + b.string()) == 0);
  CHECK(read_file(a) == read_file(b));
  CHECK(read_file(a).rfind("# pel entropy-report v1", 0) == 0);
}

TEST_CASE("Monte Carlo outputs repeat for equal seed and workers") {
  const auto config = write_file("mc.json", R"({"task": "mc-entropy",
      "spec": {"kind": "builtin", "name": "ex4-mixed-iid"}, "lengths": [6, 12], "samples": 2000})");
  const auto a = scratch() / "mc-a.json", b = scratch() / "mc-b.json";
  const std::string args = "mc-entropy --config " + config.string() + " --seed 9 --workers 2 --format json --out ";
  CHECK(pel_exit(args + a.string()) == 0);
  CHECK(pel_exit(args + b.string()) == 0);
  CHECK(read_file(a) == read_file(b));
  CHECK(pel_exit("mc-entropy --config " + config.string()) == 2);
}

TEST_CASE("exit codes for invalid input") {
  const auto rate = write_file("rate.json", R"({"task": "rate", "spec": {"kind": "builtin", "name": "ex4-mixed-iid"}})");
  const auto broken = write_file("broken.json", "{ not json");
  const auto bad_spec = write_file("bad-spec.json", R"({"task": "rate", "spec": {"kind": "markov",
      "states": ["a", "b"], "matrix": [[1, 0], [0, 1]]}})");
  const auto cap = write_file("cap.json", R"({"task": "exact-entropy",
      "spec": {"kind": "builtin", "name": "ex2-finite-iid"}, "n_max": 14})");
  CHECK(pel_exit("rate --config " + rate.string()) == 0);
  CHECK(pel_exit("bounds --config " + rate.string()) == 2);
  CHECK(pel_exit("rate --config " + broken.string()) == 2);
  CHECK(pel_exit("rate --config " + bad_spec.string()) == 2);
  CHECK(pel_exit("exact-entropy --config " + cap.string()) == 2);
  CHECK(pel_exit("rate --config /nonexistent.json") == 2);
  CHECK(pel_exit("dance --config " + rate.string()) == 2);
  CHECK(pel_exit("rate") == 2);
  CHECK(pel_exit("rate --config " + rate.string() + " --format xml") == 2);
}

}  // TEST_SUITE
