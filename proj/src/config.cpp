#include "config.h"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>

#include "checksum.h"
#include "errors.h"

using nlohmann::json;
using nlohmann::ordered_json;

namespace urec {
namespace {

void require_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw UsageError("config: " + path + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key))
      throw UsageError("config: unknown key '" + (path.empty() ? key : path + "." + key) + "'");
  }
}

double get_num(const json& j, const std::string& path) {
  if (!j.is_number()) throw UsageError("config: " + path + " must be a number");
  return j.get<double>();
}

size_t get_count(const json& j, const std::string& path) {
  // Accept any integer representation (the parser stores non-negative values
  // as unsigned, but programmatically built JSON may carry signed ints).
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<int64_t>() < 0))
    throw UsageError("config: " + path + " must be a non-negative integer");
  return j.get<size_t>();
}

double get_fraction(const json& j, const std::string& path) {
  double v = get_num(j, path);
  if (v <= 0.0 || v > 1.0) throw UsageError("config: " + path + " must be in (0, 1]");
  return v;
}

double get_positive(const json& j, const std::string& path) {
  double v = get_num(j, path);
  if (v <= 0.0) throw UsageError("config: " + path + " must be positive");
  return v;
}

void parse_method_hp(const json& j, const std::string& path, MethodHp& hp) {
  require_keys(j, path, {"lr", "batch_size"});
  if (j.contains("lr")) hp.lr = get_positive(j.at("lr"), path + ".lr");
  if (j.contains("batch_size")) {
    hp.batch_size = get_count(j.at("batch_size"), path + ".batch_size");
    if (hp.batch_size == 0) throw UsageError("config: " + path + ".batch_size must be positive");
  }
}

}  // namespace

const MethodHp& UnlearnSection::hp(Method m) const {
  switch (m) {
    case Method::Ft: return ft;
    case Method::FullFt: return full_ft;
    case Method::GaL1: return ga_l1;
    case Method::Nl: return nl;
    case Method::GaL1Ft: return ga_l1_ft;
    case Method::NlFt: return nl_ft;
  }
  throw UsageError("unknown method");
}

MethodHp& UnlearnSection::hp(Method m) {
  return const_cast<MethodHp&>(static_cast<const UnlearnSection*>(this)->hp(m));
}

bool operator==(const CorpusConfig& a, const CorpusConfig& b) {
  return a.height == b.height && a.width == b.width && a.n_coils == b.n_coils &&
         a.accel == b.accel && a.center_fraction == b.center_fraction &&
         a.n_retain == b.n_retain && a.n_forget == b.n_forget &&
         a.n_retain_test == b.n_retain_test && a.n_forget_test == b.n_forget_test;
}

bool operator==(const Config& a, const Config& b) {
  return a.master_seed == b.master_seed && a.data == b.data && a.train == b.train &&
         a.unlearn == b.unlearn && a.ablate == b.ablate;
}

Config parse_config(const json& j) {
  Config c;
  require_keys(j, "", {"schema_version", "seed", "data", "train", "unlearn", "ablate"});
  if (j.contains("schema_version")) {
    size_t v = get_count(j.at("schema_version"), "schema_version");
    if (v != 1) throw UsageError("config: unsupported schema_version " + std::to_string(v));
  }
  if (j.contains("seed")) c.master_seed = static_cast<uint64_t>(get_count(j.at("seed"), "seed"));

  if (j.contains("data")) {
    const json& d = j.at("data");
    require_keys(d, "data",
                 {"height", "width", "n_coils", "accel", "center_fraction", "n_retain",
                  "n_forget", "n_retain_test", "n_forget_test"});
    if (d.contains("height")) c.data.height = get_count(d.at("height"), "data.height");
    if (d.contains("width")) c.data.width = get_count(d.at("width"), "data.width");
    if (d.contains("n_coils")) c.data.n_coils = get_count(d.at("n_coils"), "data.n_coils");
    if (d.contains("accel"))
      c.data.accel = static_cast<unsigned>(get_count(d.at("accel"), "data.accel"));
    if (d.contains("center_fraction"))
      c.data.center_fraction = get_fraction(d.at("center_fraction"), "data.center_fraction");
    if (d.contains("n_retain")) c.data.n_retain = get_count(d.at("n_retain"), "data.n_retain");
    if (d.contains("n_forget")) c.data.n_forget = get_count(d.at("n_forget"), "data.n_forget");
    if (d.contains("n_retain_test"))
      c.data.n_retain_test = get_count(d.at("n_retain_test"), "data.n_retain_test");
    if (d.contains("n_forget_test"))
      c.data.n_forget_test = get_count(d.at("n_forget_test"), "data.n_forget_test");
  }

  if (j.contains("train")) {
    const json& t = j.at("train");
    require_keys(t, "train", {"epochs", "lr", "batch_size", "cascades", "channels"});
    if (t.contains("epochs")) c.train.epochs = get_count(t.at("epochs"), "train.epochs");
    if (t.contains("lr")) c.train.lr = get_positive(t.at("lr"), "train.lr");
    if (t.contains("batch_size")) {
      c.train.batch_size = get_count(t.at("batch_size"), "train.batch_size");
      if (c.train.batch_size == 0) throw UsageError("config: train.batch_size must be positive");
    }
    if (t.contains("cascades")) c.train.arch.cascades = get_count(t.at("cascades"), "train.cascades");
    if (t.contains("channels")) c.train.arch.channels = get_count(t.at("channels"), "train.channels");
    if (c.train.arch.cascades == 0 || c.train.arch.channels == 0)
      throw UsageError("config: train.cascades and train.channels must be positive");
  }

  if (j.contains("unlearn")) {
    const json& u = j.at("unlearn");
    require_keys(u, "unlearn",
                 {"budget_fraction", "retain_fraction", "gamma", "lambda", "methods"});
    if (u.contains("budget_fraction"))
      c.unlearn.budget_fraction = get_fraction(u.at("budget_fraction"), "unlearn.budget_fraction");
    if (u.contains("retain_fraction"))
      c.unlearn.retain_fraction = get_fraction(u.at("retain_fraction"), "unlearn.retain_fraction");
    if (u.contains("gamma")) {
      c.unlearn.gamma = get_num(u.at("gamma"), "unlearn.gamma");
      if (c.unlearn.gamma < 0.0) throw UsageError("config: unlearn.gamma must be non-negative");
    }
    if (u.contains("lambda")) {
      c.unlearn.lambda = get_num(u.at("lambda"), "unlearn.lambda");
      if (c.unlearn.lambda < 0.0) throw UsageError("config: unlearn.lambda must be non-negative");
    }
    if (u.contains("methods")) {
      const json& ms = u.at("methods");
      require_keys(ms, "unlearn.methods", {"ft", "full_ft", "ga_l1", "nl", "ga_l1_ft", "nl_ft"});
      for (Method m : all_methods())
        if (ms.contains(method_name(m)))
          parse_method_hp(ms.at(method_name(m)), std::string("unlearn.methods.") + method_name(m),
                          c.unlearn.hp(m));
    }
  }

  if (j.contains("ablate")) {
    const json& a = j.at("ablate");
    require_keys(a, "ablate", {"methods", "fractions"});
    if (a.contains("methods")) {
      if (!a.at("methods").is_array()) throw UsageError("config: ablate.methods must be an array");
      c.ablate.methods.clear();
      for (const json& m : a.at("methods")) {
        if (!m.is_string()) throw UsageError("config: ablate.methods entries must be strings");
        c.ablate.methods.push_back(method_from_name(m.get<std::string>()));
      }
      if (c.ablate.methods.empty()) throw UsageError("config: ablate.methods must be non-empty");
    }
    if (a.contains("fractions")) {
      if (!a.at("fractions").is_array())
        throw UsageError("config: ablate.fractions must be an array");
      c.ablate.fractions.clear();
      for (const json& f : a.at("fractions"))
        c.ablate.fractions.push_back(get_fraction(f, "ablate.fractions[]"));
      if (c.ablate.fractions.empty()) throw UsageError("config: ablate.fractions must be non-empty");
    }
  }

  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw UsageError("config: parse error in " + path + ": " + e.what());
  }
  return parse_config(j);
}

uint64_t apply_seed_env(uint64_t config_seed) {
  const char* env = std::getenv("UNLEARN_RECON_SEED");
  if (!env || !*env) return config_seed;
  for (const char* p = env; *p; ++p)
    if (*p < '0' || *p > '9')
      throw UsageError("UNLEARN_RECON_SEED must be a base-10 unsigned integer");
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (errno == ERANGE || !end || *end != '\0')
    throw UsageError("UNLEARN_RECON_SEED out of range");
  return static_cast<uint64_t>(v);
}

ordered_json config_to_json(const Config& c) {
  ordered_json j;
  j["schema_version"] = 1;
  j["seed"] = c.master_seed;
  j["data"] = {{"height", c.data.height},
               {"width", c.data.width},
               {"n_coils", c.data.n_coils},
               {"accel", c.data.accel},
               {"center_fraction", c.data.center_fraction},
               {"n_retain", c.data.n_retain},
               {"n_forget", c.data.n_forget},
               {"n_retain_test", c.data.n_retain_test},
               {"n_forget_test", c.data.n_forget_test}};
  j["train"] = {{"epochs", c.train.epochs},
                {"lr", c.train.lr},
                {"batch_size", c.train.batch_size},
                {"cascades", c.train.arch.cascades},
                {"channels", c.train.arch.channels}};
  ordered_json methods;
  for (Method m : all_methods())
    methods[method_name(m)] = {{"lr", c.unlearn.hp(m).lr},
                               {"batch_size", c.unlearn.hp(m).batch_size}};
  j["unlearn"] = {{"budget_fraction", c.unlearn.budget_fraction},
                  {"retain_fraction", c.unlearn.retain_fraction},
                  {"gamma", c.unlearn.gamma},
                  {"lambda", c.unlearn.lambda},
                  {"methods", methods}};
  ordered_json anames = ordered_json::array();
  for (Method m : c.ablate.methods) anames.push_back(method_name(m));
  j["ablate"] = {{"methods", anames}, {"fractions", c.ablate.fractions}};
  return j;
}

std::string config_sha256(const Config& c) { return sha256_hex(config_to_json(c).dump(2)); }

}  // namespace urec
