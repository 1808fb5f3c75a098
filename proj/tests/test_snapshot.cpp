#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ealab/experiment_config.hpp"
#include "ealab/field.hpp"
#include "ealab/reports.hpp"
#include "ealab/snapshot.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace ealab;
namespace fs = std::filesystem;

namespace {

/// Fresh scratch directory per test binary run, removed on destruction.
struct ScratchDir {
  fs::path path;
  ScratchDir() {
    path = fs::temp_directory_path() / "ealab-snapshot-tests";
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(static_cast<bool>(out));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

// ---------------------------------------------------------------------------------
// binary field snapshots
// ---------------------------------------------------------------------------------

TEST_CASE("snapshot: round trips are bit-identical") {
  ScratchDir dir;
  struct Case {
    int dim, n, rank;
    unsigned seed;
  };
  for (const Case& c : {Case{2, 16, 0, 5}, Case{2, 32, 1, 6}, Case{2, 16, 2, 7},
                        Case{3, 16, 1, 8}, Case{3, 8, 2, 9}}) {
    Grid g(c.dim, c.n);
    auto f = random_field(g, c.rank, 3, c.seed);
    const std::string path = dir.file("roundtrip.eafs");
    save_snapshot(f, path, 0.625);

    auto loaded = load_snapshot(path);
    CHECK(loaded.timestamp == 0.625);
    CHECK(loaded.field.grid() == g);
    CHECK(loaded.field.rank() == c.rank);
    REQUIRE(loaded.field.phys().size() == f.phys().size());
    CHECK(loaded.field.phys() == f.phys());
  }
}

TEST_CASE("snapshot: header arithmetic fixes the file size") {
  ScratchDir dir;
  Grid g(3, 32);
  auto f = SpectralField::zero(g, 1);
  const std::string path = dir.file("sized.eafs");
  save_snapshot(f, path);
  // 4 magic + 4 version + 4 dim + 4 rank + 3*4 resolution + 8 time stamp,
  // then 3 * 32^3 samples of 8 bytes.
  CHECK(fs::file_size(path) == 36 + 3 * 32768 * 8);

  const std::string bytes = read_bytes(path);
  CHECK(bytes.substr(0, 4) == "EAFS");
}

TEST_CASE("snapshot: refuses foreign, truncated, and padded files") {
  ScratchDir dir;
  Grid g(2, 16);
  auto f = random_field(g, 1, 3, 17);
  const std::string good_path = dir.file("good.eafs");
  save_snapshot(f, good_path, 1.5);
  const std::string good = read_bytes(good_path);

  // Magic mismatch.
  std::string wrong = good;
  wrong[0] = 'X';
  write_bytes(dir.file("magic.eafs"), wrong);
  CHECK_THROWS_AS(load_snapshot(dir.file("magic.eafs")), std::runtime_error);

  // Unsupported version.
  std::string version = good;
  version[4] = static_cast<char>(99);
  write_bytes(dir.file("version.eafs"), version);
  CHECK_THROWS_AS(load_snapshot(dir.file("version.eafs")), std::runtime_error);

  // Truncations: inside the header and inside the payload.
  write_bytes(dir.file("trunc-header.eafs"), good.substr(0, 10));
  CHECK_THROWS_AS(load_snapshot(dir.file("trunc-header.eafs")),
                  std::runtime_error);
  write_bytes(dir.file("trunc-payload.eafs"),
              good.substr(0, good.size() - 5));
  CHECK_THROWS_AS(load_snapshot(dir.file("trunc-payload.eafs")),
                  std::runtime_error);

  // Trailing bytes are as suspicious as missing ones.
  write_bytes(dir.file("padded.eafs"), good + "zz");
  CHECK_THROWS_AS(load_snapshot(dir.file("padded.eafs")), std::runtime_error);

  // Malformed header fields.
  std::string bad_dim = good;
  bad_dim[8] = 5;
  write_bytes(dir.file("dim.eafs"), bad_dim);
  CHECK_THROWS_AS(load_snapshot(dir.file("dim.eafs")), std::runtime_error);
  std::string bad_rank = good;
  bad_rank[12] = 7;
  write_bytes(dir.file("rank.eafs"), bad_rank);
  CHECK_THROWS_AS(load_snapshot(dir.file("rank.eafs")), std::runtime_error);

  // Missing and unwritable paths.
  CHECK_THROWS_AS(load_snapshot(dir.file("absent.eafs")), std::runtime_error);
  CHECK_THROWS_AS(save_snapshot(f, dir.file("no-such-dir/f.eafs")),
                  std::runtime_error);
}

// ---------------------------------------------------------------------------------
// experiment configuration
// ---------------------------------------------------------------------------------

TEST_CASE("config: parses every key with comments and whitespace") {
  const std::string text =
      "# run shape\n"
      "resolution = 128\n"
      "alpha = 0.1   # filter scale\n"
      "dt = 0.0005\n"
      "t_final = 2.5\n"
      "\n"
      "lambda = 32\n"
      "r = 0.25\n"
      "d = 2\n"
      "direction_set = 1\n"
      "parameter_file = ledger.cfg\n"
      "output_dir = out/run1\n"
      "seed = 77\n";
  auto c = parse_config_text(text);
  CHECK(c.resolution == 128);
  CHECK(c.alpha == 0.1);
  CHECK(c.dt == 0.0005);
  CHECK(c.t_final == 2.5);
  CHECK(c.lambda == 32.0);
  CHECK(c.r == 0.25);
  CHECK(c.d == 2);
  CHECK(c.direction_set == 1);
  CHECK(c.parameter_file == "ledger.cfg");
  CHECK(c.output_dir == "out/run1");
  CHECK(c.seed == 77);
}

TEST_CASE("config: omitted keys keep defaults") {
  auto c = parse_config_text("alpha = 2\n");
  ExperimentConfig d;
  CHECK(c.alpha == 2.0);
  CHECK(c.resolution == d.resolution);
  CHECK(c.dt == d.dt);
  CHECK(c.seed == d.seed);
  CHECK(c.output_dir == d.output_dir);
}

TEST_CASE("config: rejects unknown keys, duplicates, and bad values") {
  CHECK_THROWS_AS(parse_config_text("alphq = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("alpha = 1\nalpha = 2\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("dt = fast\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("resolution = 12abc\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("just some words\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("= 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("dt =\n"), std::invalid_argument);

  // Physical values must be positive.
  CHECK_THROWS_AS(parse_config_text("alpha = -1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("alpha = 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("dt = -0.1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("d = 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("r = 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("seed = -4\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("direction_set = -1\n"),
                  std::invalid_argument);
}

TEST_CASE("config: formatting round trips exactly") {
  ExperimentConfig c;
  c.resolution = 256;
  c.alpha = 0.1;  // not exactly representable; must still round trip
  c.dt = 1.0 / 3.0;
  c.t_final = 0.7;
  c.lambda = 64;
  c.r = 0.125;
  c.d = 1;
  c.direction_set = 2;
  c.parameter_file = "params.cfg";
  c.output_dir = "runs/a";
  c.seed = 123456789;

  auto back = parse_config_text(format_config(c));
  CHECK(back.resolution == c.resolution);
  CHECK(back.alpha == c.alpha);
  CHECK(back.dt == c.dt);
  CHECK(back.t_final == c.t_final);
  CHECK(back.lambda == c.lambda);
  CHECK(back.r == c.r);
  CHECK(back.d == c.d);
  CHECK(back.direction_set == c.direction_set);
  CHECK(back.parameter_file == c.parameter_file);
  CHECK(back.output_dir == c.output_dir);
  CHECK(back.seed == c.seed);
}

TEST_CASE("config: file loading") {
  ScratchDir dir;
  const std::string path = dir.file("run.cfg");
  write_bytes(path, "resolution = 64\nseed = 9\n");
  auto c = parse_config_file(path);
  CHECK(c.resolution == 64);
  CHECK(c.seed == 9);
  CHECK_THROWS_AS(parse_config_file(dir.file("missing.cfg")),
                  std::invalid_argument);
}

// ---------------------------------------------------------------------------------
// report emission
// ---------------------------------------------------------------------------------

TEST_CASE("reports: 17-digit formatting reproduces doubles exactly") {
  for (double v : {1.0 / 3.0, 6.283185307179586476925286766559, 1e-300,
                   12345.678901234567, -0.1, 0.0}) {
    const std::string s = format_g17(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_g17(0.5) == "0.5");
}

TEST_CASE("reports: tables render as comma-separated text") {
  ReportTable t;
  t.name = "Hamiltonian series";
  t.columns = {"t", "H_alpha"};
  t.add_row(numeric_row({0.0, 1.25}));
  t.add_row(numeric_row({0.5, 1.25}));
  CHECK(t.to_csv() == "t,H_alpha\n0,1.25\n0.5,1.25\n");

  CHECK_THROWS_AS(t.add_row({"only one"}), std::invalid_argument);

  // Cells holding separators or quotes are quoted.
  ReportTable q;
  q.name = "notes";
  q.columns = {"id", "text"};
  q.add_row({"1", "a,b"});
  q.add_row({"2", "say \"hi\""});
  CHECK(q.to_csv() == "id,text\n1,\"a,b\"\n2,\"say \"\"hi\"\"\"\n");

  // Exact-rational cells pass through verbatim.
  ReportTable r;
  r.name = "ledger slacks";
  r.columns = {"id", "slack"};
  r.add_row({"6", "81243/32768"});
  CHECK(r.to_csv() == "id,slack\n6,81243/32768\n");
}

TEST_CASE("reports: bundles render and write to disk") {
  ScratchDir dir;
  ReportBundle bundle;
  bundle.summary = "all checks passed";
  ReportTable t;
  t.name = "L^p scaling";
  t.columns = {"n", "p", "r", "measured", "predicted"};
  t.add_row(numeric_row({0, 1, 0.5, 3.0e-2, 2.9e-2}));
  bundle.tables.push_back(t);

  const std::string text = render_report(bundle);
  CHECK(text.find("all checks passed\n") != std::string::npos);
  CHECK(text.find("== L^p scaling ==\n") != std::string::npos);
  CHECK(text.find("n,p,r,measured,predicted\n") != std::string::npos);

  const auto written =
      write_report(bundle, (dir.path / "nested" / "deeper").string(), "run1");
  REQUIRE(written.size() == 2);
  CHECK(read_bytes(written[0]) == "all checks passed\n");
  CHECK(read_bytes(written[1]) == bundle.tables[0].to_csv());
  CHECK(written[1].find("run1-l-p-scaling.csv") != std::string::npos);
}

TEST_CASE("reports: output directory resolution") {
  unsetenv("EAF_OUTPUT_DIR");
  CHECK(resolve_output_dir("configured") == "configured");
  CHECK(resolve_output_dir("") == ".");
  setenv("EAF_OUTPUT_DIR", "/tmp/forced", 1);
  CHECK(resolve_output_dir("configured") == "/tmp/forced");
  setenv("EAF_OUTPUT_DIR", "", 1);
  CHECK(resolve_output_dir("configured") == "configured");
  unsetenv("EAF_OUTPUT_DIR");
}
