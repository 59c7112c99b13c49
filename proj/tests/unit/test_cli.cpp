#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fairalloc/cli.hpp"
#include "fairalloc/covering.hpp"
#include "fairalloc/error.hpp"
#include "fairalloc/matrix_market.hpp"

using namespace fairalloc;
namespace fs = std::filesystem;

namespace {

const std::string kData = FAIRALLOC_TEST_DATA_DIR;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fairalloc");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// The timing field is the only one allowed to differ between identical runs.
std::string without_clock(const std::string& doc) {
  std::istringstream in(doc);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    if (line.find("\"wall_clock_seconds\"") == std::string::npos) out += line + "\n";
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fairalloc_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string write_file(const std::string& name, const std::string& body) {
  const fs::path p = scratch(name);
  std::ofstream(p) << body;
  return p.string();
}

ErrorCode parse_code(const std::string& body) {
  std::istringstream in(body);
  try {
    read_matrix_market(in);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse failure");
  return ErrorCode::IoError;
}

const std::string kHeader = "%%MatrixMarket matrix coordinate real general\n";

}  // namespace

TEST_CASE("MatrixMarket reader accepts well-formed files") {
  std::istringstream in(kHeader + "% comment\n\n2 3 3\n1 1 0.5\n2 3 4e1\n1 2 7\n");
  const RawMatrix m = read_matrix_market(in);
  CHECK(m.rows == 2);
  CHECK(m.cols == 3);
  REQUIRE(m.entries.size() == 3);
  CHECK(m.entries[1].row == 1);
  CHECK(m.entries[1].col == 2);
  CHECK(m.entries[1].value == 40.0);

  std::ostringstream out;
  write_matrix_market(out, m);
  std::istringstream again(out.str());
  const RawMatrix back = read_matrix_market(again);
  REQUIRE(back.entries.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(back.entries[k].value == m.entries[k].value);
}

TEST_CASE("MatrixMarket reader rejects malformed files") {
  CHECK(parse_code("") == ErrorCode::ParseError);
  CHECK(parse_code("%%MatrixMarket vector\n1 1 1\n") == ErrorCode::ParseError);
  CHECK(parse_code("%%MatrixMarket matrix array real general\n1 1\n1\n") ==
        ErrorCode::UnsupportedStructure);
  CHECK(parse_code("%%MatrixMarket matrix coordinate real symmetric\n1 1 1\n1 1 1\n") ==
        ErrorCode::UnsupportedStructure);
  CHECK(parse_code(kHeader + "1 1 1\n1 1 0\n") == ErrorCode::DomainError);
  CHECK(parse_code(kHeader + "1 1 1\n1 1 -2\n") == ErrorCode::NegativeEntry);
  CHECK(parse_code(kHeader + "1 2 2\n1 1 1\n1 1 2\n") == ErrorCode::DuplicateEntry);
  CHECK(parse_code(kHeader + "1 1 2\n1 1 1\n") == ErrorCode::ParseError);
  CHECK(parse_code(kHeader + "1 1 1\n1 1 1\n1 1 1\n") == ErrorCode::ParseError);
  CHECK(parse_code(kHeader + "1 1 1\n2 1 1\n") == ErrorCode::ParseError);
  CHECK(parse_code(kHeader + "1 1 1\n0 1 1\n") == ErrorCode::ParseError);
  CHECK(parse_code(kHeader + "1 1 1\n1 1 abc\n") == ErrorCode::ParseError);
  CHECK(parse_code(kHeader + "1 1 1\n1 1 nan\n") == ErrorCode::ParseError);
  CHECK(parse_code(kHeader + "1 x 1\n") == ErrorCode::ParseError);
  CHECK(parse_code(kHeader) == ErrorCode::ParseError);
}

TEST_CASE("pack on identity 3x3") {
  const CliRun r = cli({"--mode", "pack", "--alpha", "0.5", "--epsilon", "0.1", "--input",
                        kData + "/id3.mtx"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["objective"].get<double>() >= 5.1);
  CHECK(doc["feasible"].get<bool>());
  CHECK(doc["params"]["K"].get<std::uint64_t>() == 4360239);
  CHECK(doc["dual_certificate"].is_null());
  CHECK(doc["guarantee"]["regime"] == "alpha<1");
}

TEST_CASE("cover on identity 2x2") {
  const CliRun r = cli({"--mode", "cover", "--beta", "1", "--epsilon", "0.1", "--input",
                        kData + "/id2.mtx"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  const auto y = doc["solution"].get<std::vector<double>>();
  // identity: column loads are the coordinates themselves
  CHECK(std::min(y[0], y[1]) >= 1.0);
  CHECK(doc["min_column_load"].get<double>() >= 1.0);
  CHECK(doc["feasible"].get<bool>());
  CHECK(doc["pre_scale_residual"].get<double>() >= 0.95);
}

TEST_CASE("exit codes") {
  SUBCASE("epsilon above the alpha bound") {
    const CliRun r = cli({"--alpha", "2", "--epsilon", "0.2", "--input", kData + "/row11.mtx"});
    CHECK(r.code == 2);
    CHECK(r.err.find("1/(10|alpha-1|)") != std::string::npos);
    CHECK(r.out.empty());
  }
  SUBCASE("flag and file problems") {
    CHECK(cli({"--input", kData + "/does_not_exist.mtx"}).code == 2);
    CHECK(cli({"--mode", "sideways", "--input", kData + "/id2.mtx"}).code == 2);
    CHECK(cli({"--bogus", "--input", kData + "/id2.mtx"}).code == 2);
    CHECK(cli({"--alpha", "1"}).code == 2);
    CHECK(cli({"--alpha", "-1", "--input", kData + "/id2.mtx"}).code == 2);
    CHECK(cli({"--mode", "cover", "--alpha", "1", "--input", kData + "/id2.mtx"}).code == 2);
    CHECK(cli({"--mode", "pack", "--beta", "1", "--input", kData + "/id2.mtx"}).code == 2);
    CHECK(cli({"--engine", "mpi", "--input", kData + "/id2.mtx"}).code == 2);
    CHECK(cli({"--trace-stride", "0", "--input", kData + "/id2.mtx"}).code == 2);
    const std::string bad = write_file("dup.mtx", kHeader + "1 1 2\n1 1 1\n1 1 1\n");
    const CliRun dup = cli({"--input", bad});
    CHECK(dup.code == 2);
    CHECK(dup.err.find("DuplicateEntry") != std::string::npos);
    const std::string empty_col = write_file("empty_col.mtx", kHeader + "1 2 1\n1 1 1\n");
    CHECK(cli({"--input", empty_col}).code == 2);
  }
  SUBCASE("help is not an error") { CHECK(cli({"--help"}).code == 0); }
  SUBCASE("solver self-check failures map to 3") {
    CHECK(is_internal(ErrorCode::FeasibilityViolation));
    CHECK(is_internal(ErrorCode::LocalityViolation));
    CHECK(is_internal(ErrorCode::CertificateShortfall));
    CHECK_FALSE(is_internal(ErrorCode::ParseError));
    CHECK_FALSE(is_internal(ErrorCode::EpsilonOutOfRange));
  }
}

TEST_CASE("identical requests give byte-identical documents") {
  const std::vector<std::string> args{"--alpha", "1.5", "--epsilon", "0.05", "--input",
                                      kData + "/small34.mtx", "--max-iters", "5000"};
  const CliRun a = cli(args);
  const CliRun b = cli(args);
  REQUIRE(a.code == 0);
  CHECK(without_clock(a.out) == without_clock(b.out));
  // the clock is the last member so every other field keeps its position
  CHECK(a.out.rfind("\"wall_clock_seconds\"") > a.out.rfind("\"locality_audit\""));

  std::ifstream golden(kData + "/golden/small34_alpha1.5.json");
  REQUIRE(golden.good());
  std::stringstream expected;
  expected << golden.rdbuf();
  CHECK(without_clock(a.out) == without_clock(expected.str()));
}

TEST_CASE("JSON numbers round-trip exactly") {
  const CliRun r = cli({"--alpha", "3", "--epsilon", "0.03", "--input", kData + "/small34.mtx",
                        "--max-iters", "2000"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  RawMatrix raw = read_matrix_market_file(kData + "/small34.mtx");
  const PackingInstance p = standardize_packing(raw.rows, raw.cols, raw.entries, 3.0);
  PackingConfig c;
  c.alpha = 3.0;
  c.epsilon = 0.03;
  c.max_iterations = 2000;
  const PackingSolution s = solve_packing(p, c);
  CHECK(doc["solution"].get<std::vector<double>>() == s.x);
  CHECK(doc["objective"].get<double>() == s.utility);
  CHECK(doc["gap"].get<double>() == *s.gap);
  CHECK(doc["dual_certificate"].get<std::vector<double>>() == *s.dual_certificate);
  CHECK(doc["scaling"]["scale"].get<double>() == 0.5);
}

TEST_CASE("round engine through the CLI") {
  const std::vector<std::string> base{"--alpha", "0.3", "--epsilon", "0.1", "--input",
                                      kData + "/small34.mtx", "--max-iters", "3000"};
  auto rounds = base;
  rounds.insert(rounds.end(), {"--engine", "rounds"});
  const auto mono = nlohmann::json::parse(cli(base).out);
  const auto dist = nlohmann::json::parse(cli(rounds).out);
  CHECK(mono["solution"] == dist["solution"]);
  CHECK(mono["objective"] == dist["objective"]);
  CHECK(mono["locality_audit"].is_null());
  CHECK(dist["locality_audit"]["out_of_column"].get<std::uint64_t>() == 0);
  CHECK(dist["locality_audit"]["rounds"].get<std::uint64_t>() == 3000);
}

TEST_CASE("trace files") {
  SUBCASE("empty trace is just the header") {
    std::ostringstream out;
    write_trace(out, {});
    CHECK(out.str() == "iter,utility,max_load,f_r,gap\n");
  }
  SUBCASE("1x1, alpha 1") {
    const std::string path = scratch("one.csv").string();
    const CliRun r = cli({"--alpha", "1", "--input", kData + "/one.mtx", "--trace", path,
                          "--max-iters", "100", "--trace-stride", "10"});
    REQUIRE(r.code == 0);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "iter,utility,max_load,f_r,gap");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      REQUIRE(cells.size() >= 4);
      if (rows == 0) {
        CHECK(cells[0] == "0");
        CHECK(std::stod(cells[1]) == doctest::Approx(std::log(0.9)));
      }
      CHECK(std::stod(cells[2]) <= 1.0);
      CHECK(line.back() == ',');  // no gap for alpha = 1
      ++rows;
    }
    CHECK(rows == 11);
  }
  SUBCASE("overflow marker") {
    TraceRow row;
    row.f_r = {std::numeric_limits<double>::infinity(), true};
    row.gap = 0.25;
    std::ostringstream out;
    write_trace(out, std::span<const TraceRow>(&row, 1));
    CHECK(out.str().find(",+overflow,0.25\n") != std::string::npos);
  }
  SUBCASE("unwritable path") {
    CHECK(cli({"--input", kData + "/one.mtx", "--max-iters", "5", "--trace",
               "/nonexistent_dir/t.csv"})
              .code == 2);
  }
}
