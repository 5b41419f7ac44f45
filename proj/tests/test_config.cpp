#include <string>

#include "doctest.h"
#include "slipflow/config.hpp"
#include "slipflow/errors.hpp"

using namespace slipflow;

namespace {

ConfigError parse_error(const std::string& text) {
  try {
    parse_config(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError");
  return ConfigError("");
}

}  // namespace

TEST_CASE("minimal config takes the defaults") {
  const RunConfig c = parse_config("schema_version = 1\n");
  const RunConfig d;
  CHECK(canonical_text(c) == canonical_text(d));
  CHECK(c.domain == "strip");
  CHECK(c.flux() == 1e-2);
  CHECK(c.resolution() == 16);
}

TEST_CASE("values, lists and comments") {
  const RunConfig c = parse_config(
      "# header\n"
      "schema_version = 1\n"
      "\n"
      "alpha = 2.5   # trailing comment\n"
      "flux = 0.5, 1, 4\n"
      "resolution = 4, 8\n"
      "strip.bump_wall = lower\n"
      "domain = disk\n");
  CHECK(c.alpha == 2.5);
  CHECK(c.fluxes == std::vector<double>{0.5, 1.0, 4.0});
  CHECK(c.resolutions == std::vector<int>{4, 8});
  CHECK(c.bump_wall == "lower");
  CHECK(c.domain == "disk");
  CHECK(c.flux() == 4.0);
}

TEST_CASE("errors name the line and field") {
  SUBCASE("missing schema_version") {
    const ConfigError e = parse_error("alpha = 1\n");
    CHECK(e.field() == "schema_version");
  }
  SUBCASE("unknown key") {
    const ConfigError e = parse_error("schema_version = 1\nalpah = 1\n");
    CHECK(e.line() == 2);
    CHECK(e.field() == "alpah");
  }
  SUBCASE("duplicate key") {
    const ConfigError e = parse_error("schema_version = 1\nalpha = 1\n\nalpha = 2\n");
    CHECK(e.line() == 4);
    CHECK(e.field() == "alpha");
  }
  SUBCASE("not a number") {
    const ConfigError e = parse_error("schema_version = 1\nstrip.zeta = six\n");
    CHECK(e.line() == 2);
    CHECK(e.field() == "strip.zeta");
  }
  SUBCASE("bad list entry") {
    const ConfigError e = parse_error("schema_version = 1\nresolution = 8, 1.5\n");
    CHECK(e.field() == "resolution");
  }
  SUBCASE("no equals sign") {
    const ConfigError e = parse_error("schema_version = 1\nalpha 1\n");
    CHECK(e.line() == 2);
  }
  SUBCASE("bad choice") {
    const ConfigError e = parse_error("schema_version = 1\ndomain = cube\n");
    CHECK(e.field() == "domain");
  }
  SUBCASE("wrong schema version") {
    const ConfigError e = parse_error("schema_version = 2\n");
    CHECK(e.line() == 1);
    CHECK(e.field() == "schema_version");
  }
  SUBCASE("validation reports the line of the offending key") {
    const ConfigError e = parse_error("schema_version = 1\nalpha = 1\nflux = 1, 0.5\n");
    CHECK(e.line() == 3);
    CHECK(e.field() == "flux");
    CHECK(std::string(e.what()).find("t.cfg:3") != std::string::npos);
  }
}

TEST_CASE("validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  auto field_of = [](const RunConfig& bad) {
    try {
      bad.validate();
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string();
  };
  RunConfig a = c;
  a.alpha = -1.0;
  CHECK(field_of(a) == "alpha");
  RunConfig t = c;
  t.transition = t.zeta;
  CHECK(field_of(t) == "strip.transition");
  RunConfig k = c;
  k.carrier_hi = 1.0;
  CHECK(field_of(k) == "carrier.lo");
  RunConfig r = c;
  r.resolutions = {8, 8};
  CHECK(field_of(r) == "resolution");
  RunConfig u = c;
  u.uniqueness_starts = 1;
  CHECK(field_of(u) == "uniqueness.starts");
}

TEST_CASE("canonical text round trips and ignores layout") {
  const RunConfig c = parse_config("schema_version = 1\nalpha = 0.1\nflux = 0.001, 0.3\nstrip.bump_amplitude = 0.3\n");
  const std::string text = canonical_text(c);
  CHECK(canonical_text(parse_config(text)) == text);
  CHECK(text.find("alpha = 0.1\n") != std::string::npos);
  CHECK(text.find("flux = 0.001, 0.3\n") != std::string::npos);

  const RunConfig reordered = parse_config("strip.bump_amplitude = 0.30\n# note\nflux = 1e-3,0.3\nalpha = .1\nschema_version = 1\n");
  CHECK(config_hash(reordered) == config_hash(c));
  CHECK(config_hash(parse_config("schema_version = 1\nalpha = 0.2\n")) != config_hash(c));
}

TEST_CASE("the source path is not hashed") {
  CHECK(config_hash(parse_config("schema_version = 1\n", "a.cfg")) == config_hash(parse_config("schema_version = 1\n", "b.cfg")));
}

TEST_CASE("fnv1a reference vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ull);
  CHECK(config_hash(RunConfig{}).size() == 16);
}

TEST_CASE("the template parses to the defaults") {
  const RunConfig c = parse_config(config_template());
  CHECK(canonical_text(c) == canonical_text(RunConfig{}));
}

TEST_CASE("section of a strip") {
  RunConfig c;
  c.upper_level = 2.0;
  const DomainSpec s = c.section_spec();
  REQUIRE(s.is_interval());
  CHECK(std::get<IntervalDomain>(s.kind).length == 2.0);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_config("/nonexistent/slipflow.cfg"), ConfigError);
}
