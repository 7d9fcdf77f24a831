#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "tfec/dataset.hpp"
#include "tfec/errors.hpp"

using namespace tfec;
namespace fs = std::filesystem;

namespace {

const char* kTiny =
    "# comment line\n"
    "@problemName Tiny\n"
    "@univariate true\n"
    "@classLabel true a b\n"
    "@data\n"
    "1,2,3:a\n"
    "4,5,6:b\n";

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "tfec_dataset_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("two univariate series with labels a and b") {
  const auto ds = parse_ts(kTiny);
  CHECK(ds.name == "Tiny");
  CHECK(ds.size == 2);
  CHECK(ds.length == 3);
  CHECK(ds.channels == 1);
  REQUIRE(ds.class_count);
  CHECK(*ds.class_count == 2);
  CHECK(*ds.labels == std::vector<int>{0, 1});
  CHECK(ds.samples == std::vector<double>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("samples are stored series, timestep, channel") {
  const auto ds = parse_ts("@dimensions 2\n@classLabel false\n@data\n1,2,3:10,20,30\n");
  CHECK(ds.channels == 2);
  CHECK(ds.samples == std::vector<double>{1, 10, 2, 20, 3, 30});
  CHECK_FALSE(ds.labels);
  const auto s = ds.series(0);
  CHECK(s(2, 1) == 30);
}

TEST_CASE("labels become dense in order of first appearance") {
  const auto ds = parse_ts("@classLabel true z y x\n@data\n1,2:y\n3,4:z\n5,6:y\n7,8:x\n");
  CHECK(*ds.labels == std::vector<int>{0, 1, 0, 2});
  CHECK(ds.class_names == std::vector<std::string>{"y", "z", "x"});
}

TEST_CASE("malformed headers report their line") {
  try {
    parse_ts("@problemName X\n@bogusTag 3\n@data\n1,2\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("ragged channels within a series are a parse error") {
  CHECK_THROWS_AS(parse_ts("@dimensions 2\n@classLabel false\n@data\n1,2,3:1,2\n"), ParseError);
}

TEST_CASE("series of different lengths are unsupported") {
  CHECK_THROWS_AS(parse_ts("@classLabel false\n@data\n1,2,3\n1,2,3,4\n"), UnsupportedCorpus);
}

TEST_CASE("missing values and timestamps are unsupported") {
  CHECK_THROWS_AS(parse_ts("@classLabel false\n@data\n1,?,3\n"), UnsupportedCorpus);
  CHECK_THROWS_AS(parse_ts("@timeStamps true\n@data\n1,2,3\n"), UnsupportedCorpus);
}

TEST_CASE("an empty corpus is rejected") {
  CHECK_THROWS_AS(parse_ts("@problemName Empty\n@data\n"), ParseError);
}

TEST_CASE("round trip through canonical text is exact") {
  auto ds = oracle::random_corpus(7, 5, 9, 3, 2);
  ds.samples[4] = 0.1 + 0.2;  // not representable in a short decimal
  ds.samples[5] = -1e-300;
  const auto back = parse_ts(to_ts(ds));
  CHECK(back.samples == ds.samples);
  CHECK(*back.labels == *ds.labels);
  CHECK(back.length == ds.length);
  CHECK(back.channels == ds.channels);
}

TEST_CASE("z-normalisation of [1,2,3] and of a constant channel") {
  MTSDataset ds = parse_ts("@dimensions 2\n@classLabel false\n@data\n1,2,3:5,5,5\n");
  const auto z = znormalize(ds);
  const double a = std::sqrt(1.5);
  CHECK(z.samples[0] == doctest::Approx(-a).epsilon(1e-12));
  CHECK(z.samples[2] == doctest::Approx(0.0));
  CHECK(z.samples[4] == doctest::Approx(a).epsilon(1e-12));
  CHECK(z.samples[1] == 0.0);
  CHECK(z.samples[3] == 0.0);
  CHECK(z.samples[5] == 0.0);
}

TEST_CASE("z-normalised channels have zero mean and unit variance, and the map is idempotent") {
  auto ds = oracle::random_corpus(11, 10, 50, 3, 2);
  for (std::size_t i = 0; i < ds.samples.size(); ++i) ds.samples[i] = 3.0 * ds.samples[i] + 7.0;
  const auto z = znormalize(ds);
  for (std::size_t i = 0; i < z.size; ++i) {
    for (std::size_t c = 0; c < z.channels; ++c) {
      double mean = 0.0, sq = 0.0;
      for (std::size_t t = 0; t < z.length; ++t) mean += z.samples[(i * z.length + t) * z.channels + c];
      mean /= static_cast<double>(z.length);
      for (std::size_t t = 0; t < z.length; ++t) {
        const double d = z.samples[(i * z.length + t) * z.channels + c] - mean;
        sq += d * d;
      }
      CHECK(std::abs(mean) < 1e-9);
      CHECK(std::abs(std::sqrt(sq / static_cast<double>(z.length)) - 1.0) < 1e-9);
    }
  }
  const auto zz = znormalize(z);
  for (std::size_t k = 0; k < z.samples.size(); ++k) CHECK(std::abs(zz.samples[k] - z.samples[k]) < 1e-9);
}

TEST_CASE("the BasicMotions training split has the published shape") {
  const auto ds = load_ts(fs::path(TFEC_TEST_DATA) / "BasicMotions_TRAIN.ts");
  CHECK(stats(ds) == DatasetStats{"BasicMotions", 40, 100, 6, 4});
  CHECK(ds.class_names.size() == 4);
}

TEST_CASE("a missing file is an I/O error naming the file") {
  try {
    load_ts("/definitely/not/here.ts");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("file not found") != std::string::npos);
  }
}

TEST_CASE("load errors carry the path and line") {
  const auto p = scratch("broken.ts");
  write(p, "@problemName B\n@data\n1,2,3\n1,2,3,4:5\n");
  try {
    load_ts(p);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("broken.ts") != std::string::npos);
  }
}

TEST_CASE("split files are merged when asked") {
  const auto dir = scratch("split");
  fs::create_directories(dir);
  write(dir / "Tiny_TRAIN.ts", kTiny);
  write(dir / "Tiny_TEST.ts", "@problemName Tiny\n@classLabel true a b\n@data\n7,8,9:b\n");
  const auto merged = load_corpus(dir / "Tiny_TRAIN.ts", true);
  CHECK(merged.size == 3);
  CHECK(*merged.labels == std::vector<int>{0, 1, 1});
  CHECK(load_corpus(dir / "Tiny_TRAIN.ts", false).size == 2);
  CHECK(load_corpus(dir, true).size == 3);
}

TEST_CASE("concatenated corpora re-densify labels by name") {
  const auto a = parse_ts("@classLabel true a b\n@data\n1,2:b\n");
  const auto b = parse_ts("@classLabel true a b\n@data\n3,4:a\n5,6:b\n");
  const auto c = concat(a, b);
  CHECK(*c.labels == std::vector<int>{0, 1, 0});
  CHECK(*c.class_count == 2);
}
