#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cfrecs {

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64(const std::string& text);

// "fnv1a64:" + 16 hex digits over the file's bytes.
std::string digest_file(const std::string& path);

// Reproducibility snapshot: command, seed, the resolved config, and a digest
// per named input. Deliberately timestamp-free so reruns are byte-identical.
void write_run_manifest(const std::string& path, const std::string& command,
                        const std::string& config_json, std::uint64_t seed,
                        const std::vector<std::pair<std::string, std::string>>& inputs);

}  // namespace cfrecs
