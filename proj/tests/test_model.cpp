#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "errors.h"
#include "model.h"

using namespace urec;
namespace fs = std::filesystem;

TEST_CASE("parameter count follows the cascade formula") {
  CHECK(param_count({3, 4}) == 453);    // 3 * (37*4 + 3)
  CHECK(param_count({6, 4}) == 906);
  CHECK(param_count({3, 8}) == 897);    // 3 * (37*8 + 3)
  CHECK(param_count({1, 1}) == 40);
  CHECK(param_count({2, 2}) == 154);
}

TEST_CASE("initialization is deterministic with the documented structure") {
  ArchConfig arch{3, 4};
  ModelParams p = init_params(arch, 9);
  ModelParams q = init_params(arch, 9);
  CHECK(p.values == q.values);
  CHECK(init_params(arch, 10).values != p.values);
  REQUIRE(p.values.size() == param_count(arch));

  double bound1 = 1.0 / std::sqrt(2.0 * 9.0);   // conv1 fan_in = 2 * 3 * 3
  double bound2 = 1.0 / std::sqrt(4.0 * 9.0);   // conv2 fan_in = channels * 3 * 3
  for (size_t t = 0; t < arch.cascades; ++t) {
    CHECK(p.dc(t) == 1.0);
    for (size_t i = 0; i < 18 * arch.channels; ++i) {
      CHECK(p.conv1(t)[i] <= bound1);
      CHECK(p.conv1(t)[i] >= -bound1);
    }
    for (size_t i = 0; i < arch.channels; ++i) CHECK(p.bias1(t)[i] == 0.0);
    for (size_t i = 0; i < 18 * arch.channels; ++i) {
      CHECK(p.conv2(t)[i] <= bound2);
      CHECK(p.conv2(t)[i] >= -bound2);
    }
    CHECK(p.bias2(t)[0] == 0.0);
    CHECK(p.bias2(t)[1] == 0.0);
  }
}

TEST_CASE("offset accessors tile the flat vector without gaps") {
  ArchConfig arch{2, 3};
  ModelParams p = init_params(arch, 1);
  for (size_t i = 0; i < p.values.size(); ++i) p.values[i] = static_cast<double>(i);
  size_t per = 37 * arch.channels + 3;
  for (size_t t = 0; t < arch.cascades; ++t) {
    size_t base = t * per;
    CHECK(p.dc(t) == static_cast<double>(base));
    CHECK(p.conv1(t)[0] == static_cast<double>(base + 1));
    CHECK(p.bias1(t)[0] == static_cast<double>(base + 1 + 18 * arch.channels));
    CHECK(p.conv2(t)[0] == static_cast<double>(base + 1 + 19 * arch.channels));
    CHECK(p.bias2(t)[0] == static_cast<double>(base + 1 + 37 * arch.channels));
    CHECK(p.bias2(t)[1] == static_cast<double>(base + per - 1));
  }
}

TEST_CASE("flatten and unflatten are inverse") {
  ArchConfig arch{3, 4};
  ModelParams p = init_params(arch, 2);
  std::vector<double> flat = flatten(p);
  CHECK(flat == p.values);
  ModelParams back = unflatten(arch, flat);
  CHECK(back.arch == arch);
  CHECK(back.values == p.values);
  CHECK_THROWS_AS(unflatten(arch, std::vector<double>(7)), UsageError);
}

TEST_CASE("checkpoints round trip through float32 quantization") {
  ArchConfig arch{3, 4};
  ModelParams p = init_params(arch, 3);
  p.values[5] = 0.1234567890123456789;  // not representable in float32
  fs::path path = fs::temp_directory_path() / "urec_model_ckpt.urck";
  save_checkpoint(p, path.string());
  ModelParams back = load_checkpoint(path.string());
  CHECK(back.arch == arch);
  REQUIRE(back.values.size() == p.values.size());
  for (size_t i = 0; i < p.values.size(); ++i)
    CHECK(back.values[i] == static_cast<double>(static_cast<float>(p.values[i])));
  CHECK(back.values[5] != p.values[5]);

  // A second save of the loaded params reproduces the file byte for byte.
  fs::path path2 = fs::temp_directory_path() / "urec_model_ckpt2.urck";
  save_checkpoint(back, path2.string());
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  fs::remove(path);
  fs::remove(path2);
}

TEST_CASE("checkpoint corruption and truncation are detected") {
  ArchConfig arch{1, 2};
  ModelParams p = init_params(arch, 4);
  fs::path path = fs::temp_directory_path() / "urec_model_bad.urck";
  save_checkpoint(p, path.string());

  SUBCASE("flipped payload byte fails the integrity check") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekg(-8, std::ios::end);
    char b = 0;
    f.read(&b, 1);
    b = static_cast<char>(b ^ 0x3C);
    f.seekp(-8, std::ios::end);
    f.write(&b, 1);
    f.close();
    CHECK_THROWS_AS(load_checkpoint(path.string()), DataError);
  }

  SUBCASE("truncated file is rejected") {
    fs::resize_file(path, fs::file_size(path) - 5);
    CHECK_THROWS_AS(load_checkpoint(path.string()), DataError);
  }

  SUBCASE("wrong magic is rejected") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
    f.close();
    CHECK_THROWS_AS(load_checkpoint(path.string()), DataError);
  }

  SUBCASE("missing file is rejected") {
    CHECK_THROWS_AS(load_checkpoint("/nonexistent/urec.urck"), DataError);
  }
  fs::remove(path);
}
