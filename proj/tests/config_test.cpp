#include "forge/config.hpp"

#include "doctest.h"
#include "forge/artifacts.hpp"

#include <cstdio>

using namespace forge;

TEST_CASE("minimal config fills defaults") {
  RunConfig cfg = parse_config("structure = w\n");
  CHECK(cfg.variant == Leq0Variant::paper_truncated);
  CHECK(cfg.godel == "godel-v1");
  CHECK(cfg.budget == 100);
  CHECK(cfg.make_presentation().family() == StructureFamily::ordinal_order);
}

TEST_CASE("bad ordinal under the default bound is a range error") {
  CHECK_THROWS_AS(parse_config("structure = w^(w^2*1)*1\n"),
                  std::invalid_argument);
}

TEST_CASE("duplicate keys are named") {
  try {
    parse_config("budget = 5\nbudget = 6\n");
    FAIL("expected throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("budget") != std::string::npos);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("unknown keys and bad values carry line numbers") {
  CHECK_THROWS_AS(parse_config("nonsense = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("budget = 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("godel = godel-v2\n"), std::invalid_argument);
}

TEST_CASE("structure specs") {
  Ordinal bound = Ordinal::omega_omega();
  CHECK(presentation_from_spec("5", bound).family() ==
        StructureFamily::finite_order);
  CHECK(presentation_from_spec("q", bound).family() ==
        StructureFamily::rational_order);
  CHECK(presentation_from_spec("vq", bound).family() ==
        StructureFamily::rational_vector_space);
  Presentation p = presentation_from_spec("w,perm:13:50", bound);
  CHECK(p.family() == StructureFamily::ordinal_order);
  CHECK(p.describe().find("permuted") != std::string::npos);
  CHECK_THROWS_AS(presentation_from_spec("w,shuffle:1", bound),
                  std::invalid_argument);
}

TEST_CASE("config set parsing") {
  RunConfig cfg = parse_config("set = 5,2,2,9\n");
  CHECK(cfg.parse_set() == std::vector<int>{2, 5, 9});
}

TEST_CASE("iso map file round trip") {
  PartialMap m;
  m.add(0, 4);
  m.add(1, 2);
  std::string text = iso_map_to_text(m);
  CHECK(text == "b0 -> a4\nb1 -> a2\n");
  PartialMap back = iso_map_from_text(text);
  CHECK(back == m);
}

TEST_CASE("atomic write and read") {
  std::string path = "/tmp/forge_config_test_artifact.txt";
  atomic_write(path, "hello\n");
  CHECK(read_file(path) == "hello\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_file("/tmp/forge_missing_artifact_xyz"),
                  MissingArtifact);
}
