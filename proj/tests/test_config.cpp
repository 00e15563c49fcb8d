#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <string>

#include <json.hpp>

#include "config.h"
#include "doctest.h"
#include "errors.h"

using namespace urec;
using nlohmann::json;

namespace {

struct EnvGuard {
  // Restores UNLEARN_RECON_SEED on scope exit.
  std::string saved;
  bool had = false;
  EnvGuard() {
    if (const char* v = std::getenv("UNLEARN_RECON_SEED")) {
      saved = v;
      had = true;
    }
    unsetenv("UNLEARN_RECON_SEED");
  }
  ~EnvGuard() {
    if (had)
      setenv("UNLEARN_RECON_SEED", saved.c_str(), 1);
    else
      unsetenv("UNLEARN_RECON_SEED");
  }
};

}  // namespace

TEST_CASE("an empty document parses to the built-in defaults") {
  Config c = parse_config(json::object());
  Config d;
  CHECK(c == d);
  CHECK(c.master_seed == kDefaultMasterSeed);
  CHECK(c.unlearn.gamma == kDefaultGamma);
  CHECK(c.unlearn.lambda == kDefaultLambda);
  CHECK(c.data.n_retain == 10 * c.data.n_forget);
  CHECK(c.ablate.fractions.size() == 6);
  CHECK(c.ablate.methods.size() == 3);
}

TEST_CASE("the shipped default config mirrors the built-ins exactly") {
  Config file = load_config(UREC_DEFAULT_CONFIG);
  Config builtin;
  CHECK(file == builtin);
  CHECK(config_sha256(file) == config_sha256(builtin));
}

TEST_CASE("partial overrides keep everything else at default") {
  json j = {{"train", {{"epochs", 7}, {"cascades", 2}}},
            {"unlearn", {{"methods", {{"nl", {{"lr", 0.25}}}}}}}};
  Config c = parse_config(j);
  CHECK(c.train.epochs == 7);
  CHECK(c.train.arch.cascades == 2);
  CHECK(c.train.arch.channels == ArchConfig{}.channels);
  CHECK(c.unlearn.hp(Method::Nl).lr == 0.25);
  CHECK(c.unlearn.hp(Method::Nl).batch_size == UnlearnSection{}.nl.batch_size);
  CHECK(c.unlearn.hp(Method::Ft) == UnlearnSection{}.ft);
  CHECK(c.data == CorpusConfig{});
}

TEST_CASE("unknown keys are rejected with their full path") {
  CHECK_THROWS_WITH_AS(parse_config({{"data", {{"heigth", 64}}}}),
                       doctest::Contains("data.heigth"), UsageError);
  CHECK_THROWS_WITH_AS(parse_config({{"bogus", 1}}), doctest::Contains("bogus"), UsageError);
  CHECK_THROWS_WITH_AS(
      parse_config({{"unlearn", {{"methods", {{"nl", {{"momentum", 0.9}}}}}}}}),
      doctest::Contains("unlearn.methods.nl.momentum"), UsageError);
}

TEST_CASE("types and ranges are validated") {
  CHECK_THROWS_AS(parse_config({{"seed", -3}}), UsageError);
  CHECK_THROWS_AS(parse_config({{"seed", "one"}}), UsageError);
  CHECK_THROWS_AS(parse_config({{"train", {{"lr", 0.0}}}}), UsageError);
  CHECK_THROWS_AS(parse_config({{"train", {{"batch_size", 0}}}}), UsageError);
  CHECK_THROWS_AS(parse_config({{"train", {{"cascades", 0}}}}), UsageError);
  CHECK_THROWS_AS(parse_config({{"data", {{"center_fraction", 1.5}}}}), UsageError);
  CHECK_THROWS_AS(parse_config({{"unlearn", {{"budget_fraction", 0.0}}}}), UsageError);
  CHECK_THROWS_AS(parse_config({{"unlearn", {{"gamma", -1e-3}}}}), UsageError);
  CHECK_THROWS_AS(parse_config({{"unlearn", {{"lambda", -1.0}}}}), UsageError);
  CHECK_THROWS_AS(parse_config({{"ablate", {{"methods", json::array()}}}}), UsageError);
  CHECK_THROWS_AS(parse_config({{"ablate", {{"methods", {"warp"}}}}}), UsageError);
  CHECK_THROWS_AS(parse_config({{"ablate", {{"fractions", {0.1, 2.0}}}}}), UsageError);
  CHECK_THROWS_AS(parse_config(json::array()), UsageError);
}

TEST_CASE("schema version must be the supported one") {
  CHECK(parse_config({{"schema_version", 1}}) == Config{});
  CHECK_THROWS_WITH_AS(parse_config({{"schema_version", 2}}),
                       doctest::Contains("schema_version"), UsageError);
}

TEST_CASE("canonical serialization round trips") {
  Config c;
  c.master_seed = 99;
  c.data.height = 32;
  c.train.epochs = 3;
  c.unlearn.gamma = 0.5;
  c.unlearn.hp(Method::GaL1Ft).batch_size = 2;
  c.ablate.methods = {Method::Nl};
  c.ablate.fractions = {0.25, 0.5};
  Config back = parse_config(config_to_json(c));
  CHECK(back == c);
}

TEST_CASE("config digests are stable and sensitive") {
  Config a, b;
  CHECK(config_sha256(a) == config_sha256(b));
  b.master_seed = 2;
  CHECK(config_sha256(a) != config_sha256(b));
  Config c;
  c.unlearn.hp(Method::Nl).lr *= 2.0;
  CHECK(config_sha256(a) != config_sha256(c));
}

TEST_CASE("missing or malformed config files are usage errors") {
  CHECK_THROWS_AS(load_config("/nonexistent/urec.json"), UsageError);
}

TEST_CASE("the seed environment variable overrides the config seed") {
  EnvGuard guard;
  CHECK(apply_seed_env(7) == 7);
  setenv("UNLEARN_RECON_SEED", "123", 1);
  CHECK(apply_seed_env(7) == 123);
  setenv("UNLEARN_RECON_SEED", "", 1);
  CHECK(apply_seed_env(7) == 7);  // empty means unset
  setenv("UNLEARN_RECON_SEED", "12x", 1);
  CHECK_THROWS_AS(apply_seed_env(7), UsageError);
  setenv("UNLEARN_RECON_SEED", "-5", 1);
  CHECK_THROWS_AS(apply_seed_env(7), UsageError);
  setenv("UNLEARN_RECON_SEED", "18446744073709551615", 1);
  CHECK(apply_seed_env(7) == 18446744073709551615ull);
}
