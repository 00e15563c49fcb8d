#include "model.h"

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>

#include "checksum.h"
#include "rng.h"

using json = nlohmann::ordered_json;

namespace urec {

namespace {
constexpr char kMagic[4] = {'U', 'R', 'C', 'K'};
constexpr uint32_t kCheckpointVersion = 1;
}  // namespace

size_t param_count(const ArchConfig& arch) {
  return arch.cascades * (37 * arch.channels + 3);
}

ModelParams init_params(const ArchConfig& arch, uint64_t seed) {
  if (arch.cascades == 0 || arch.channels == 0)
    throw UsageError("init_params: cascades and channels must be >= 1");
  ModelParams p;
  p.arch = arch;
  p.values.assign(param_count(arch), 0.0);
  Rng g(derive_seed(seed, "init"));
  const double a1 = 1.0 / std::sqrt(2.0 * 9.0);  // conv1 fan-in: 2 channels × 3×3
  const double a2 = 1.0 / std::sqrt(static_cast<double>(arch.channels) * 9.0);
  for (size_t t = 0; t < arch.cascades; ++t) {
    p.dc(t) = 1.0;
    double* w1 = p.conv1(t);
    for (size_t i = 0; i < 18 * arch.channels; ++i) w1[i] = g.uniform(-a1, a1);
    double* w2 = p.conv2(t);
    for (size_t i = 0; i < 18 * arch.channels; ++i) w2[i] = g.uniform(-a2, a2);
  }
  return p;
}

std::vector<double> flatten(const ModelParams& p) { return p.values; }

ModelParams unflatten(const ArchConfig& arch, const std::vector<double>& v) {
  if (v.size() != param_count(arch))
    throw UsageError("unflatten: vector length does not match architecture");
  ModelParams p;
  p.arch = arch;
  p.values = v;
  return p;
}

void save_checkpoint(const ModelParams& p, const std::string& path) {
  json arch_json;
  arch_json["cascades"] = p.arch.cascades;
  arch_json["channels"] = p.arch.channels;
  std::string arch_str = arch_json.dump();

  std::string buf;
  buf.append(kMagic, 4);
  auto put_u32 = [&buf](uint32_t v) {
    char raw[4];
    std::memcpy(raw, &v, 4);
    buf.append(raw, 4);
  };
  put_u32(kCheckpointVersion);
  put_u32(static_cast<uint32_t>(arch_str.size()));
  buf.append(arch_str);
  put_u32(static_cast<uint32_t>(p.values.size()));
  for (double v : p.values) {
    float f = static_cast<float>(v);
    char raw[4];
    std::memcpy(raw, &f, 4);
    buf.append(raw, 4);
  }
  put_u32(crc32_bytes(buf.data(), buf.size()));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing checkpoint: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 16 || std::memcmp(buf.data(), kMagic, 4) != 0)
    throw DataError("not a checkpoint file: " + path);

  uint32_t stored_crc;
  std::memcpy(&stored_crc, buf.data() + buf.size() - 4, 4);
  if (stored_crc != crc32_bytes(buf.data(), buf.size() - 4))
    throw DataError("checkpoint checksum mismatch: " + path);

  size_t pos = 4;
  auto get_u32 = [&buf, &pos, &path]() {
    if (pos + 4 > buf.size()) throw DataError("truncated checkpoint: " + path);
    uint32_t v;
    std::memcpy(&v, buf.data() + pos, 4);
    pos += 4;
    return v;
  };
  uint32_t version = get_u32();
  if (version != kCheckpointVersion) throw DataError("unsupported checkpoint version");
  uint32_t arch_len = get_u32();
  if (pos + arch_len > buf.size()) throw DataError("truncated checkpoint: " + path);
  json arch_json = json::parse(buf.substr(pos, arch_len));
  pos += arch_len;

  ModelParams p;
  p.arch.cascades = arch_json.at("cascades").get<size_t>();
  p.arch.channels = arch_json.at("channels").get<size_t>();
  uint32_t n = get_u32();
  if (n != param_count(p.arch))
    throw DataError("checkpoint parameter count does not match architecture");
  if (pos + 4ull * n + 4 != buf.size()) throw DataError("truncated checkpoint: " + path);
  p.values.resize(n);
  for (uint32_t i = 0; i < n; ++i) {
    float f;
    std::memcpy(&f, buf.data() + pos, 4);
    pos += 4;
    p.values[i] = f;
  }
  return p;
}

}  // namespace urec
