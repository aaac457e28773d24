#include "relnav/train/manifest.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "relnav/common/error.hpp"
#include "relnav/numeric/rng.hpp"

namespace relnav::train {

std::uint64_t config_hash(const std::string& config_text) {
  return numeric::Rng::fnv1a(config_text);
}

void write_manifest(const std::string& dir, const std::string& command,
                    const std::string& config_text, std::uint64_t seed) {
  nlohmann::json j;
  j["command"] = command;
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << config_hash(config_text);
  j["config_hash"] = hash.str();
  j["seed"] = seed;
  j["tool_version"] = "0.1.0";
  j["schema_versions"] = {{"environment", 1}, {"relations", 1}, {"params", 1}};
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::ostringstream ts;
  ts << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
  j["generated_at"] = ts.str();

  const std::string path = dir + "/manifest.json";
  std::ofstream out(path);
  if (!out) throw IoError("write_manifest: cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace relnav::train
