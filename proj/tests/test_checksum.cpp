#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "checksum.h"
#include "doctest.h"

using namespace urec;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  std::filesystem::path p = std::filesystem::temp_directory_path() / name;
  std::ofstream out(p, std::ios::binary);
  out << contents;
  return p;
}

}  // namespace

TEST_CASE("crc32 matches the standard check value") {
  const std::string check = "123456789";
  CHECK(crc32_bytes(check.data(), check.size()) == 0xCBF43926u);
  CHECK(crc32_bytes(nullptr, 0) == 0u);
  const std::string a = "a";
  CHECK(crc32_bytes(a.data(), a.size()) == 0xE8B7BE43u);
}

TEST_CASE("sha256 matches published digests") {
  CHECK(sha256_hex(std::string{}) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex(std::string{"abc"}) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex(std::string{"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"}) ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("sha256 handles block boundaries") {
  // Padding crosses a block boundary between 55 and 56 bytes of input.
  std::string s55(55, 'x');
  std::string s56(56, 'x');
  std::string s64(64, 'x');
  CHECK(sha256_hex(s55) != sha256_hex(s56));
  CHECK(sha256_hex(s56) != sha256_hex(s64));
  CHECK(sha256_hex(s55).size() == 64);
  for (char c : sha256_hex(s64)) CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
}

TEST_CASE("file digests match in-memory digests") {
  std::string body = "the quick brown fox jumps over the lazy dog\n";
  auto p = temp_file("urec_checksum_test.bin", body);
  CHECK(crc32_file(p.string()) == crc32_bytes(body.data(), body.size()));
  CHECK(sha256_file(p.string()) == sha256_hex(body));
  std::filesystem::remove(p);
}

TEST_CASE("missing file reports an error") {
  CHECK_THROWS(crc32_file("/nonexistent/urec/file.bin"));
  CHECK_THROWS(sha256_file("/nonexistent/urec/file.bin"));
}
