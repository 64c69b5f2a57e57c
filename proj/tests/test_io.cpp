#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hmk/io.hpp"

using namespace hmk;

TEST_CASE("numbers round-trip at 17 digits") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) CHECK(std::stod(io::num(v)) == v);
  CHECK(io::num(0.1) == "0.10000000000000001");
}

TEST_CASE("csv cells with separators are quoted") {
  CHECK(io::csv_escape("plain") == "plain");
  CHECK(io::csv_escape("a,b") == "\"a,b\"");
  CHECK(io::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(io::csv_line({"x", "1,2"}) == "x,\"1,2\"\n");
}

TEST_CASE("pair syntax") {
  auto [x, xp] = io::parse_pair("2,0.5,-1,1;0,0,0,0.25", 4);
  CHECK(x.t == 2.0);
  CHECK(x.x_perp == std::vector<double>{0.5, -1.0});
  CHECK(x.z == 1.0);
  CHECK(xp.z == 0.25);
  CHECK_THROWS_AS(io::parse_pair("1,2;3,4", 3), Error);
  CHECK_THROWS_AS(io::parse_pair("1,2,3", 3), Error);
  CHECK_THROWS_AS(io::parse_pair("1,x,3;0,0,1", 3), Error);
  auto [a, b] = io::parse_pair("0.3,0.8;0,1", 2);
  CHECK(a.x_perp.empty());
  CHECK(b.z == 1.0);
}

TEST_CASE("ranges include the upper end") {
  const auto r = io::parse_range("0.5:4:0.25");
  CHECK(r.size() == 15);
  CHECK(r.front() == 0.5);
  CHECK(r.back() == doctest::Approx(4.0));
  CHECK_THROWS_AS(io::parse_range("1:0:0.1"), Error);
  CHECK_THROWS_AS(io::parse_range("0:1:0"), Error);
}

TEST_CASE("flat config") {
  const auto c = io::FlatConfig::parse("# comment\nd = 3\nkappa = 0.5  # trailing\n\nname = a b\n");
  CHECK(c.integer("d", 4) == 3);
  CHECK(c.real("kappa", 0.0) == 0.5);
  CHECK(c.str("name", "") == "a b");
  CHECK(c.real("missing", 7.0) == 7.0);
  CHECK(c.unused().empty());
  CHECK_THROWS_AS(io::FlatConfig::parse("d = 3\nd = 4\n"), Error);
  CHECK_THROWS_AS(io::FlatConfig::parse("no equals sign\n"), Error);
  CHECK_THROWS_AS(io::FlatConfig::parse("d = 3.5\n").integer("d", 0), Error);
  CHECK_THROWS_AS(io::FlatConfig::parse("flag = maybe\n").boolean("flag", true), Error);
  const auto u = io::FlatConfig::parse("a = 1\nb = 2\n");
  (void)u.real("a", 0.0);
  CHECK(u.unused() == std::vector<std::string>{"b"});
}

TEST_CASE("atomic write replaces the file and leaves no temp") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "hmk_io_test";
  fs::remove_all(dir);
  const fs::path f = dir / "sub" / "out.csv";
  io::write_atomic(f, "first\n");
  io::write_atomic(f, "second\n");
  std::ifstream in(f);
  std::string s;
  std::getline(in, s);
  CHECK(s == "second");
  CHECK_FALSE(fs::exists(f.string() + ".tmp"));
  fs::remove_all(dir);
}
