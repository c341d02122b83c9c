#include "cfrecs/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cfrecs/error.hpp"
#include "json.hpp"

namespace cfrecs {

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t fnv1a64(const std::string& text) { return fnv1a64(text.data(), text.size()); }

std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("digest: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  char out[32];
  std::snprintf(out, sizeof(out), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return out;
}

void write_run_manifest(const std::string& path, const std::string& command,
                        const std::string& config_json, std::uint64_t seed,
                        const std::vector<std::pair<std::string, std::string>>& inputs) {
  nlohmann::json config = nlohmann::json::object();
  if (!config_json.empty()) {
    try {
      config = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("manifest: config is not valid JSON: " + std::string(e.what()));
    }
  }
  nlohmann::json digests = nlohmann::json::object();
  for (const auto& [name, file] : inputs) digests[name] = digest_file(file);
  nlohmann::json manifest = {
      {"command", command}, {"seed", seed}, {"config", config}, {"inputs", digests}};
  std::ofstream out(path);
  if (!out) throw ValidationError("manifest '" + path + "': cannot open for writing");
  out << manifest.dump(2) << '\n';
  if (!out) throw ValidationError("manifest '" + path + "': write failed");
}

}  // namespace cfrecs
