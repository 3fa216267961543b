#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "surfspin/cli.hpp"
#include "surfspin/io.hpp"

using namespace surfspin;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "surfspin_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("every subcommand runs on its defaults") {
  const std::vector<std::vector<std::string>> runs = {
      {"build", "--preset", "bulk"},
      {"build", "--preset", "flat"},
      {"build", "--preset", "paper-step", "--format", "xyz"},
      {"dbs", "--preset", "paper-step"},
      {"hfi"},
      {"fit", "--a", "4.3", "--b", "2.2"},
      {"eseem", "--a", "4.3", "--b", "2.2", "--field-t", "0.3"},
      {"desorb"},
      {"anneal"},
      {"sweep"},
  };
  for (const auto& args : runs) {
    CAPTURE(args.front());
    const Result r = call(args);
    CHECK(r.code == cli::exit_ok);
    CHECK(!r.out.empty());
    CHECK(!r.err.empty());
  }
}

TEST_CASE("summaries carry the headline numbers") {
  const Result dbs = call({"dbs", "--preset", "paper-step"});
  CHECK(dbs.err.find("dbs=1") != std::string::npos);
  const Result fit = call({"fit", "--a", "4.3", "--b", "2.2"});
  CHECK(fit.out.rfind("r_A,theta_deg,residual_MHz\n3.16", 0) == 0);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(call({}).code == cli::exit_input_error);
  CHECK(call({"frobnicate"}).code == cli::exit_input_error);
  CHECK(call({"fit", "--a", "1", "--b", "1", "--colour", "red"}).code == cli::exit_input_error);
  CHECK(call({"fit", "--a", "1"}).code == cli::exit_input_error);
  CHECK(call({"fit", "--a", "x", "--b", "1"}).code == cli::exit_input_error);
  CHECK(call({"build", "--preset", "hexagon"}).code == cli::exit_input_error);
  CHECK(call({"desorb", "--barrier", "-1"}).code == cli::exit_input_error);
  CHECK(call({"dbs", "--structure", scratch("absent.yaml").string()}).code ==
        cli::exit_input_error);
}

TEST_CASE("numerical failures exit with status 3") {
  const Result r = call({"desorb", "--temp-k", "5"});
  CHECK(r.code == cli::exit_numerical_error);
  CHECK(r.err.find("numerical error") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
  const Result r = call({"--help"});
  CHECK(r.code == cli::exit_ok);
  CHECK(r.out.find("sweep") != std::string::npos);
}

TEST_CASE("config files supply defaults and flags override them") {
  const auto cfg = scratch("fit.yaml");
  io::write_text_file(cfg, io::emit_config({"fit", {{"a", "4.3"}, {"b", "2.2"}}}));
  const Result from_file = call({"fit", "--config", cfg.string()});
  const Result direct = call({"fit", "--a", "4.3", "--b", "2.2"});
  CHECK(from_file.code == cli::exit_ok);
  CHECK(from_file.out == direct.out);
  CHECK(call({"--config", cfg.string()}).out == direct.out);

  const Result overridden = call({"fit", "--config", cfg.string(), "--a", "4.0"});
  CHECK(overridden.out == call({"fit", "--a", "4.0", "--b", "2.2"}).out);

  io::write_text_file(cfg, io::emit_config({"fit", {{"a", "4.3"}, {"colour", "red"}}}));
  CHECK(call({"fit", "--config", cfg.string()}).code == cli::exit_input_error);
  io::write_text_file(cfg, io::emit_config({"sweep", {}}));
  CHECK(call({"fit", "--a", "1", "--b", "1", "--config", cfg.string()}).code ==
        cli::exit_input_error);
}

TEST_CASE("--out writes the table and prints the summary") {
  const auto path = scratch("sweep.csv");
  const Result r = call({"sweep", "--steps", "5", "--out", path.string()});
  CHECK(r.code == cli::exit_ok);
  CHECK(r.err.empty());
  CHECK(r.out.find("curves=") != std::string::npos);
  const std::string table = io::read_text_file(path);
  CHECK(table == call({"sweep", "--steps", "5"}).out);
}

TEST_CASE("built structures read back through dbs") {
  const auto path = scratch("step.yaml");
  REQUIRE(call({"build", "--preset", "paper-step", "--out", path.string()}).code == cli::exit_ok);
  const Result r = call({"dbs", "--structure", path.string()});
  CHECK(r.code == cli::exit_ok);
  CHECK(r.err.find("dbs=1") != std::string::npos);
  std::filesystem::remove_all(path.parent_path());
}

} // TEST_SUITE
