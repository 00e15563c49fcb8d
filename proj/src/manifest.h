#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace urec {

inline constexpr const char* kToolVersion = "0.1.0";

std::string host_description();

// Workdir-level manifest: header (version, tool, host, master seed) plus an
// append-only entry list, one entry per pipeline stage invocation. Appending
// under a different master seed than the existing file is an error.
nlohmann::ordered_json manifest_read(const std::string& workdir);
void manifest_append(const std::string& workdir, uint64_t master_seed,
                     const nlohmann::ordered_json& entry);

// Checks that every checkpoint/dataset referenced with a hash still exists
// and hashes to the recorded value.
void manifest_verify(const std::string& workdir);

}  // namespace urec
