#include "manifest.h"

#include <sys/utsname.h>

#include <filesystem>
#include <fstream>

#include "checksum.h"
#include "errors.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace urec {
namespace {

fs::path manifest_path(const std::string& workdir) { return fs::path(workdir) / "manifest.json"; }

void write_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << text;
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void verify_hash_field(const fs::path& workdir, const ordered_json& entry, const char* path_key,
                       const char* hash_key) {
  if (!entry.contains(path_key) || !entry.contains(hash_key)) return;
  fs::path p = workdir / entry.at(path_key).get<std::string>();
  if (!fs::exists(p)) throw DataError("manifest: missing artifact " + p.string());
  std::string h = sha256_file(p.string());
  if (h != entry.at(hash_key).get<std::string>())
    throw DataError("manifest: hash mismatch for " + p.string());
}

}  // namespace

std::string host_description() {
  struct utsname u{};
  if (uname(&u) != 0) return "unknown";
  return std::string(u.sysname) + " " + u.release + " " + u.machine;
}

ordered_json manifest_read(const std::string& workdir) {
  fs::path p = manifest_path(workdir);
  std::ifstream in(p);
  if (!in) throw DataError("manifest: cannot open " + p.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("manifest: parse error in " + p.string() + ": " + e.what());
  }
  if (!j.contains("version") || j.at("version").get<int>() != 1)
    throw DataError("manifest: unsupported version in " + p.string());
  return j;
}

void manifest_append(const std::string& workdir, uint64_t master_seed,
                     const ordered_json& entry) {
  fs::create_directories(workdir);
  ordered_json j;
  if (fs::exists(manifest_path(workdir))) {
    j = manifest_read(workdir);
    if (j.at("master_seed").get<uint64_t>() != master_seed)
      throw DataError("manifest: workdir was populated with a different master seed");
  } else {
    j["version"] = 1;
    j["tool_version"] = kToolVersion;
    j["host"] = host_description();
    j["master_seed"] = master_seed;
    j["entries"] = ordered_json::array();
  }
  j["entries"].push_back(entry);
  write_atomic(manifest_path(workdir), j.dump(2) + "\n");
}

void manifest_verify(const std::string& workdir) {
  ordered_json j = manifest_read(workdir);
  for (const ordered_json& entry : j.at("entries")) {
    verify_hash_field(workdir, entry, "checkpoint", "checkpoint_sha256");
    if (entry.contains("datasets"))
      for (const auto& [name, ds] : entry.at("datasets").items()) {
        (void)name;
        verify_hash_field(workdir, ds, "manifest", "manifest_sha256");
      }
    if (entry.contains("cells"))
      for (const ordered_json& cell : entry.at("cells"))
        verify_hash_field(workdir, cell, "checkpoint", "checkpoint_sha256");
  }
}

}  // namespace urec
