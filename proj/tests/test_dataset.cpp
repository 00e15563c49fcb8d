#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <string>

#include "dataset.h"
#include "doctest.h"
#include "errors.h"
#include "mri.h"

using namespace urec;
namespace fs = std::filesystem;

namespace {

CorpusConfig tiny_config() {
  CorpusConfig cfg;
  cfg.height = 16;
  cfg.width = 16;
  cfg.n_coils = 2;
  cfg.accel = 4;
  cfg.center_fraction = 0.125;
  cfg.n_retain = 10;
  cfg.n_forget = 1;
  cfg.n_retain_test = 2;
  cfg.n_forget_test = 2;
  return cfg;
}

bool samples_equal(const Sample& a, const Sample& b) {
  if (a.id != b.id || a.anatomy != b.anatomy) return false;
  if (a.mask.kept != b.mask.kept) return false;
  if (a.target.data != b.target.data) return false;
  if (a.masked_kspace.planes.size() != b.masked_kspace.planes.size()) return false;
  for (size_t c = 0; c < a.masked_kspace.planes.size(); ++c)
    if (a.masked_kspace.planes[c].data != b.masked_kspace.planes[c].data) return false;
  return true;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("role names round trip") {
  for (Role r : {Role::Retain, Role::Forget, Role::RetainSubset, Role::RetainTest,
                 Role::ForgetTest})
    CHECK(role_from_name(role_name(r)) == r);
  CHECK_THROWS_AS(role_from_name("bogus"), DataError);
  CHECK(role_anatomy(Role::Retain) == Anatomy::A);
  CHECK(role_anatomy(Role::RetainSubset) == Anatomy::A);
  CHECK(role_anatomy(Role::RetainTest) == Anatomy::A);
  CHECK(role_anatomy(Role::Forget) == Anatomy::B);
  CHECK(role_anatomy(Role::ForgetTest) == Anatomy::B);
}

TEST_CASE("corpus has the expected splits, sizes, and anatomies") {
  Corpus c = build_corpus(tiny_config(), 3);
  CHECK(c.retain.role == Role::Retain);
  CHECK(c.forget.role == Role::Forget);
  CHECK(c.retain_test.role == Role::RetainTest);
  CHECK(c.forget_test.role == Role::ForgetTest);
  CHECK(c.retain.samples.size() == 10);
  CHECK(c.forget.samples.size() == 1);
  CHECK(c.retain_test.samples.size() == 2);
  CHECK(c.forget_test.samples.size() == 2);
  for (const Sample& s : c.retain.samples) CHECK(s.anatomy == Anatomy::A);
  for (const Sample& s : c.forget.samples) CHECK(s.anatomy == Anatomy::B);
  CHECK(c.retain.samples[0].id == "retain-000");
  CHECK(c.forget_test.samples[1].id == "forget_test-001");
}

TEST_CASE("ratio violations are rejected") {
  CorpusConfig cfg = tiny_config();
  cfg.n_retain = 9;
  CHECK_THROWS_AS(build_corpus(cfg, 1), DataError);
  cfg.n_retain = 11;
  CHECK_THROWS_AS(build_corpus(cfg, 1), DataError);
}

TEST_CASE("corpus generation is deterministic in the master seed") {
  Corpus a = build_corpus(tiny_config(), 5);
  Corpus b = build_corpus(tiny_config(), 5);
  for (size_t i = 0; i < a.retain.samples.size(); ++i)
    CHECK(samples_equal(a.retain.samples[i], b.retain.samples[i]));
  Corpus c = build_corpus(tiny_config(), 6);
  CHECK(!samples_equal(a.retain.samples[0], c.retain.samples[0]));
}

TEST_CASE("splits use disjoint sample streams") {
  Corpus c = build_corpus(tiny_config(), 2);
  CHECK(!samples_equal(c.retain.samples[0], c.retain_test.samples[0]));
}

TEST_CASE("samples are quantized to float32 at generation") {
  Sample s = make_sample(Anatomy::A, 77, "q-check", tiny_config());
  for (const ComplexImage& plane : s.masked_kspace.planes)
    for (const cplx& v : plane.data) {
      CHECK(v.real() == static_cast<double>(static_cast<float>(v.real())));
      CHECK(v.imag() == static_cast<double>(static_cast<float>(v.imag())));
    }
  for (double v : s.target.data)
    CHECK(v == static_cast<double>(static_cast<float>(v)));
}

TEST_CASE("dropped mask columns are zero in the stored k-space") {
  Sample s = make_sample(Anatomy::B, 8, "mask-check", tiny_config());
  for (const ComplexImage& plane : s.masked_kspace.planes)
    for (size_t r = 0; r < plane.height; ++r)
      for (size_t c = 0; c < plane.width; ++c)
        if (!s.mask.kept[c]) CHECK(plane.at(r, c) == cplx(0.0, 0.0));
}

TEST_CASE("datasets survive a disk round trip exactly") {
  TempDir dir("urec_dataset_roundtrip");
  Corpus c = build_corpus(tiny_config(), 4);
  write_dataset(c.forget_test, dir.path.string());
  Dataset back = read_dataset(dir.path.string());
  CHECK(back.role == Role::ForgetTest);
  CHECK(back.seed == c.forget_test.seed);
  REQUIRE(back.samples.size() == c.forget_test.samples.size());
  for (size_t i = 0; i < back.samples.size(); ++i)
    CHECK(samples_equal(back.samples[i], c.forget_test.samples[i]));
}

TEST_CASE("corrupted sample bytes are detected") {
  TempDir dir("urec_dataset_corrupt");
  Corpus c = build_corpus(tiny_config(), 4);
  write_dataset(c.forget, dir.path.string());
  fs::path victim = dir.path / "sample_0000.bin";
  {
    std::fstream f(victim, std::ios::in | std::ios::out | std::ios::binary);
    f.seekg(12);
    char b = 0;
    f.read(&b, 1);
    b = static_cast<char>(b ^ 0x5A);
    f.seekp(12);
    f.write(&b, 1);
  }
  CHECK_THROWS_AS(read_dataset(dir.path.string()), DataError);
  CHECK_THROWS_WITH_AS(read_dataset(dir.path.string()),
                       doctest::Contains("checksum mismatch"), DataError);
}

TEST_CASE("truncated sample files are detected") {
  TempDir dir("urec_dataset_truncated");
  Corpus c = build_corpus(tiny_config(), 4);
  write_dataset(c.forget, dir.path.string());
  fs::path victim = dir.path / "sample_0000.bin";
  fs::resize_file(victim, fs::file_size(victim) - 4);
  CHECK_THROWS_WITH_AS(read_dataset(dir.path.string()),
                       doctest::Contains("size mismatch"), DataError);
}

TEST_CASE("missing pieces are reported") {
  TempDir dir("urec_dataset_missing");
  CHECK_THROWS_WITH_AS(read_dataset((dir.path / "nope").string()),
                       doctest::Contains("missing manifest"), DataError);
  Corpus c = build_corpus(tiny_config(), 4);
  write_dataset(c.forget, dir.path.string());
  fs::remove(dir.path / "sample_0000.bin");
  CHECK_THROWS_WITH_AS(read_dataset(dir.path.string()),
                       doctest::Contains("missing sample file"), DataError);
}

TEST_CASE("manifest corruption is reported") {
  TempDir dir("urec_dataset_badmanifest");
  Corpus c = build_corpus(tiny_config(), 4);
  write_dataset(c.forget, dir.path.string());
  std::ofstream(dir.path / "manifest.json") << "{ not json";
  CHECK_THROWS_WITH_AS(read_dataset(dir.path.string()),
                       doctest::Contains("corrupt manifest"), DataError);
}
