#include "dataset.h"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "checksum.h"
#include "rng.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace urec {
namespace {

constexpr int kDatasetVersion = 1;

void quantize(ComplexImage& img) {
  for (cplx& v : img.data)
    v = cplx(static_cast<float>(v.real()), static_cast<float>(v.imag()));
}

void quantize(RealImage& img) {
  for (double& v : img.data) v = static_cast<float>(v);
}

std::string sample_file_name(size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sample_%04zu.bin", index);
  return buf;
}

std::vector<float> sample_to_floats(const Sample& s) {
  std::vector<float> out;
  out.reserve(2 * s.masked_kspace.n_coils * s.target.size() + s.target.size());
  for (const ComplexImage& plane : s.masked_kspace.planes)
    for (const cplx& v : plane.data) {
      out.push_back(static_cast<float>(v.real()));
      out.push_back(static_cast<float>(v.imag()));
    }
  for (double v : s.target.data) out.push_back(static_cast<float>(v));
  return out;
}

}  // namespace

const char* role_name(Role r) {
  switch (r) {
    case Role::Retain: return "retain";
    case Role::Forget: return "forget";
    case Role::RetainSubset: return "retain_subset";
    case Role::RetainTest: return "retain_test";
    case Role::ForgetTest: return "forget_test";
  }
  return "unknown";
}

Role role_from_name(const std::string& s) {
  if (s == "retain") return Role::Retain;
  if (s == "forget") return Role::Forget;
  if (s == "retain_subset") return Role::RetainSubset;
  if (s == "retain_test") return Role::RetainTest;
  if (s == "forget_test") return Role::ForgetTest;
  throw DataError("unknown dataset role: " + s);
}

Anatomy role_anatomy(Role r) {
  return (r == Role::Forget || r == Role::ForgetTest) ? Anatomy::B : Anatomy::A;
}

Sample make_sample(Anatomy anatomy, uint64_t sample_seed, const std::string& id,
                   const CorpusConfig& cfg) {
  Sample s;
  s.anatomy = anatomy;
  s.id = id;
  ComplexImage img = make_phantom(anatomy, sample_seed, cfg.height, cfg.width);
  CoilSensitivities maps =
      make_coil_maps(cfg.n_coils, cfg.height, cfg.width, derive_seed(sample_seed, "coils"));
  MultiCoilKSpace full = forward_model(img, maps);
  s.target = rss_target(full);
  s.mask = make_mask(cfg.width, cfg.accel, cfg.center_fraction,
                     derive_seed(sample_seed, "sample-mask"));
  s.masked_kspace = undersample(full, s.mask);
  for (ComplexImage& plane : s.masked_kspace.planes) quantize(plane);
  quantize(s.target);
  return s;
}

namespace {

Dataset build_split(Role role, size_t n, uint64_t master_seed, const CorpusConfig& cfg) {
  Dataset d;
  d.role = role;
  d.seed = derive_seed(master_seed, role_name(role));
  for (size_t i = 0; i < n; ++i) {
    char id[64];
    std::snprintf(id, sizeof(id), "%s-%03zu", role_name(role), i);
    d.samples.push_back(
        make_sample(role_anatomy(role), derive_seed(d.seed, "sample", i), id, cfg));
  }
  return d;
}

}  // namespace

Corpus build_corpus(const CorpusConfig& cfg, uint64_t master_seed) {
  if (cfg.n_retain != 10 * cfg.n_forget)
    throw DataError("build_corpus: retain-to-forget ratio must be 10:1");
  Corpus c;
  c.retain = build_split(Role::Retain, cfg.n_retain, master_seed, cfg);
  c.forget = build_split(Role::Forget, cfg.n_forget, master_seed, cfg);
  c.retain_test = build_split(Role::RetainTest, cfg.n_retain_test, master_seed, cfg);
  c.forget_test = build_split(Role::ForgetTest, cfg.n_forget_test, master_seed, cfg);
  return c;
}

void write_dataset(const Dataset& d, const std::string& dir) {
  fs::create_directories(dir);
  json manifest;
  manifest["version"] = kDatasetVersion;
  manifest["role"] = role_name(d.role);
  manifest["seed"] = d.seed;
  manifest["n_samples"] = d.samples.size();
  size_t h = d.samples.empty() ? 0 : d.samples[0].target.height;
  size_t w = d.samples.empty() ? 0 : d.samples[0].target.width;
  size_t nc = d.samples.empty() ? 0 : d.samples[0].masked_kspace.n_coils;
  manifest["height"] = h;
  manifest["width"] = w;
  manifest["n_coils"] = nc;
  json samples = json::array();
  for (size_t i = 0; i < d.samples.size(); ++i) {
    const Sample& s = d.samples[i];
    std::string fname = sample_file_name(i);
    std::vector<float> buf = sample_to_floats(s);
    std::ofstream out(fs::path(dir) / fname, std::ios::binary);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    out.close();
    json rec;
    rec["id"] = s.id;
    rec["file"] = fname;
    rec["crc32"] = crc32_bytes(buf.data(), buf.size() * sizeof(float));
    rec["anatomy"] = s.anatomy == Anatomy::A ? "A" : "B";
    rec["mask_accel"] = s.mask.accel;
    rec["mask_center_fraction"] = s.mask.center_fraction;
    json kept = json::array();
    for (bool b : s.mask.kept) kept.push_back(b ? 1 : 0);
    rec["mask_kept"] = std::move(kept);
    samples.push_back(std::move(rec));
  }
  manifest["samples"] = std::move(samples);
  std::ofstream mf(fs::path(dir) / "manifest.json");
  mf << manifest.dump(2) << "\n";
}

Dataset read_dataset(const std::string& dir) {
  std::ifstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw DataError("missing manifest: " + dir);
  json manifest;
  try {
    mf >> manifest;
  } catch (const std::exception& e) {
    throw DataError("corrupt manifest in " + dir + ": " + e.what());
  }
  Dataset d;
  d.role = role_from_name(manifest.at("role").get<std::string>());
  d.seed = manifest.at("seed").get<uint64_t>();
  size_t n = manifest.at("n_samples").get<size_t>();
  size_t h = manifest.at("height").get<size_t>();
  size_t w = manifest.at("width").get<size_t>();
  size_t nc = manifest.at("n_coils").get<size_t>();
  const json& samples = manifest.at("samples");
  if (samples.size() != n) throw DataError("manifest sample count mismatch in " + dir);

  for (const json& rec : samples) {
    std::string fname = rec.at("file").get<std::string>();
    fs::path path = fs::path(dir) / fname;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing sample file: " + path.string());
    std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
    size_t expect = (2 * nc * h * w + h * w) * sizeof(float);
    if (raw.size() != expect)
      throw DataError("sample file size mismatch: " + path.string());
    uint32_t crc = crc32_bytes(raw.data(), raw.size());
    if (crc != rec.at("crc32").get<uint32_t>())
      throw DataError("checksum mismatch: " + path.string());

    const float* f = reinterpret_cast<const float*>(raw.data());
    Sample s;
    s.id = rec.at("id").get<std::string>();
    s.anatomy = rec.at("anatomy").get<std::string>() == "A" ? Anatomy::A : Anatomy::B;
    s.mask.width = w;
    s.mask.accel = rec.at("mask_accel").get<double>();
    s.mask.center_fraction = rec.at("mask_center_fraction").get<double>();
    const json& kept = rec.at("mask_kept");
    if (kept.size() != w) throw DataError("mask width mismatch: " + path.string());
    s.mask.kept.resize(w);
    for (size_t c = 0; c < w; ++c) s.mask.kept[c] = kept[c].get<int>() != 0;
    s.masked_kspace.n_coils = nc;
    for (size_t c = 0; c < nc; ++c) {
      ComplexImage plane(h, w);
      for (size_t i = 0; i < h * w; ++i) {
        plane.data[i] = cplx(f[0], f[1]);
        f += 2;
      }
      s.masked_kspace.planes.push_back(std::move(plane));
    }
    s.target = RealImage(h, w);
    for (size_t i = 0; i < h * w; ++i) s.target.data[i] = *f++;
    d.samples.push_back(std::move(s));
  }
  return d;
}

}  // namespace urec
