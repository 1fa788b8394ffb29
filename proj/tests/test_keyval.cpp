#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rramc/errors.hpp"
#include "rramc/fileio.hpp"
#include "rramc/keyval.hpp"
#include "rramc/textio.hpp"
#include "testutil.hpp"

using namespace rramc;

TEST_CASE("parse skips comments and blanks, trims, keeps order") {
  auto doc = keyval::parse("# header\n\n a = 1 \nb=two\n\n# tail\nc = 3\n");
  REQUIRE(doc.entries().size() == 3);
  CHECK(doc.entries()[0].first == "a");
  CHECK(doc.entries()[1].first == "b");
  CHECK(doc.entries()[2].first == "c");
  CHECK(doc.get("b") == "two");
  CHECK(!doc.has("d"));
  CHECK(doc.get("d") == std::nullopt);
}

TEST_CASE("last value wins but first position is kept") {
  auto doc = keyval::parse("a = 1\nb = 2\na = 3\n");
  REQUIRE(doc.entries().size() == 2);
  CHECK(doc.entries()[0].first == "a");
  CHECK(doc.get("a") == "3");
  CHECK(doc.serialize() == "a = 3\nb = 2\n");
}

TEST_CASE("missing equals sign is a config error with line info") {
  CHECK_THROWS_AS(keyval::parse("a = 1\nnonsense\n"), ConfigError);
  try {
    keyval::parse("a = 1\nnonsense\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("typed getters") {
  auto doc = keyval::parse("x = 2.5\nn = 12\ns = hello\nbad = 1x\n");
  CHECK(doc.get_double("x") == 2.5);
  CHECK(doc.get_uint("n") == 12);
  CHECK(doc.get_string("s", "") == "hello");
  CHECK(doc.get_double("absent", 7.0) == 7.0);
  CHECK(doc.get_uint("absent", 9) == 9);
  CHECK_THROWS_AS(doc.get_double("bad"), ConfigError);
  CHECK_THROWS_AS(doc.get_uint("bad"), ConfigError);
  CHECK_THROWS_AS(doc.get_double("absent"), ConfigError);
}

TEST_CASE("merge_from overlays and appends") {
  auto base = keyval::parse("a = 1\nb = 2\n");
  auto top = keyval::parse("b = 20\nc = 30\n");
  base.merge_from(top);
  CHECK(base.serialize() == "a = 1\nb = 20\nc = 30\n");
}

TEST_CASE("file round trip") {
  testutil::TempDir dir;
  keyval::Document doc;
  doc.set("alpha", "1e-3");
  doc.set("beta", "x");
  keyval::save_file(doc, dir.sub("conf.txt"));
  auto back = keyval::load_file(dir.sub("conf.txt"));
  CHECK(back.serialize() == doc.serialize());
  CHECK_THROWS_AS(keyval::load_file(dir.sub("missing.txt")), IoFailure);
}

TEST_CASE("textio formatting is stable") {
  CHECK(textio::sci(0.0) == "0.000000e+00");
  CHECK(textio::sci(5.83e-15) == "5.830000e-15");
  CHECK(textio::sci(-1.8) == "-1.800000e+00");
  CHECK(textio::pad(7, 3) == "007");
  CHECK(textio::pad(123, 2) == "123");
  CHECK(textio::index_width(1) == 1);
  CHECK(textio::index_width(10) == 1);
  CHECK(textio::index_width(11) == 2);
  CHECK(textio::index_width(100) == 2);
  CHECK(textio::index_width(101) == 3);
  double v = 0.1 + 0.2;
  CHECK(textio::parse_double(textio::full(v)) == v);
}

TEST_CASE("textio parsing rejects junk") {
  CHECK(textio::parse_double("2.5e-3") == 2.5e-3);
  CHECK(textio::parse_uint("42") == 42);
  CHECK(textio::parse_int("-42") == -42);
  CHECK_THROWS_AS(textio::parse_double("1.2.3"), ConfigError);
  CHECK_THROWS_AS(textio::parse_double(""), ConfigError);
  CHECK_THROWS_AS(textio::parse_uint("-3"), ConfigError);
  CHECK_THROWS_AS(textio::parse_uint("12ab"), ConfigError);
}

TEST_CASE("textio split and trim") {
  auto parts = textio::split("a,b,,c", ',');
  REQUIRE(parts.size() == 4);
  CHECK(parts[2].empty());
  auto words = textio::split_ws("  one\t two  three ");
  REQUIRE(words.size() == 3);
  CHECK(words[0] == "one");
  CHECK(textio::trim("  x  ") == "x");
  CHECK(textio::trim("   ").empty());
}

TEST_CASE("fileio round trip and errors") {
  testutil::TempDir dir;
  fileio::write_text(dir.sub("f.txt"), "payload\n");
  CHECK(fileio::read_text(dir.sub("f.txt")) == "payload\n");
  CHECK(fileio::exists(dir.sub("f.txt")));
  CHECK(!fileio::exists(dir.sub("g.txt")));
  CHECK_THROWS_AS(fileio::read_text(dir.sub("g.txt")), IoFailure);
  fileio::ensure_dir(dir.sub("a/b/c"));
  fileio::write_bytes(dir.sub("a/b/c/x.bin"), std::vector<std::uint8_t>{1, 2, 3});
  CHECK(fileio::read_text(dir.sub("a/b/c/x.bin")).size() == 3);
}
