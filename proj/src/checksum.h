#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace urec {

uint32_t crc32_bytes(const void* data, size_t len);
uint32_t crc32_file(const std::string& path);

// Lowercase hex SHA-256; used for config/checkpoint identity in manifests.
std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(const std::string& s);
std::string sha256_file(const std::string& path);

}  // namespace urec
