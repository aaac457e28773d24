#pragma once

#include <cstdint>
#include <string>

namespace relnav::train {

// Writes <dir>/manifest.json stamping the command, a hash of the exact
// configuration, the seed and the file schema versions, so any output
// directory can be traced back to the run that produced it. The timestamp
// is informational and excluded from reproducibility comparisons.
void write_manifest(const std::string& dir, const std::string& command,
                    const std::string& config_text, std::uint64_t seed);

std::uint64_t config_hash(const std::string& config_text);

}  // namespace relnav::train
