#include <doctest.h>

#include "kot/error.hpp"
#include "kot/io.hpp"
#include "oracles.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

using namespace kot;
namespace fs = std::filesystem;

TEST_CASE("double formatting round-trips") {
  kot::testing::Rng rng(1);
  std::uniform_real_distribution<double> e(-300, 300);
  std::uniform_real_distribution<double> m(-1, 1);
  for (int i = 0; i < 2000; ++i) {
    const double v = m(rng) * std::pow(10.0, e(rng));
    CHECK(io::parse_double(io::format_double(v)) == v);
  }
  for (double v : {0.0, -0.0, 1.0, 0.1, std::numeric_limits<double>::denorm_min(),
                   std::numeric_limits<double>::max()}) {
    CHECK(io::parse_double(io::format_double(v)) == v);
  }
  CHECK(io::format_double(std::nan("")) == "nan");
  CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(std::isnan(io::parse_double("nan")));
  CHECK_THROWS_AS(io::parse_double("1.0x"), ConfigError);
  CHECK_THROWS_AS(io::parse_double(""), ConfigError);
}

TEST_CASE("csv round trip") {
  kot::testing::Rng rng(2);
  const Matrix m = kot::testing::random_matrix(7, 3, rng);
  const io::CsvTable t = io::parse_csv(io::to_csv(m, {"a", "b", "c"}));
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  CHECK(t.values == m);
  const io::CsvTable bare = io::parse_csv(io::to_csv(m));
  CHECK(bare.header.empty());
  CHECK(bare.values == m);
}

TEST_CASE("csv parsing") {
  const io::CsvTable t = io::parse_csv("x,y\n1,2\n3.5,-4e-3\n");
  CHECK(t.values.rows() == 2);
  CHECK(t.values(1, 1) == -4e-3);
  CHECK(io::parse_csv("1,2\r\n3,4").values(1, 0) == 3.0);
  CHECK_THROWS_AS(io::parse_csv("1,2\n3\n"), ConfigError);
  CHECK_THROWS_AS(io::parse_csv("a,b\n1,zz\n"), ConfigError);
}

TEST_CASE("files and checksums") {
  CHECK(io::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(io::sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const fs::path dir = fs::temp_directory_path() / "kot_test_io" / "nested";
  fs::remove_all(dir.parent_path());
  io::write_file(dir / "f.txt", "abc");
  CHECK(io::read_file(dir / "f.txt") == "abc");
  CHECK(io::sha256_file(dir / "f.txt") == io::sha256_hex("abc"));
  const Matrix m = Matrix::Identity(3, 2);
  io::write_csv(dir / "m.csv", m, {"p", "q"});
  CHECK(io::read_csv(dir / "m.csv").values == m);
  CHECK_THROWS(io::read_file(dir / "missing.txt"));
  fs::remove_all(dir.parent_path());
}
