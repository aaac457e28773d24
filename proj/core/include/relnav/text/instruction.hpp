#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relnav/env/environment.hpp"
#include "relnav/text/vocabulary.hpp"

namespace relnav::text {

struct Instruction {
  std::vector<int> tokens;  // token ids over the vocabulary
  int target_node = -1;
  int target_object = -1;  // category id

  std::string render(const Vocabulary& v) const;
  std::string to_json(const Vocabulary& v) const;
  static Instruction from_json(const std::string& line);
};

// Nouns found in an instruction, in scan order, duplicates kept.
struct NounExtraction {
  std::vector<int> categories;  // noun token id == category id
  std::vector<int> positions;   // strictly increasing source indices
  bool empty() const { return categories.empty(); }
};

// Seeded filler tokens interleaved with landmark nouns sampled along the
// shortest start->target route, always ending with the target object noun.
// Falls back to the target noun alone when the route offers no landmarks.
Instruction synthesize_instruction(const env::EnvironmentGraph& g, int start, int target_node,
                                   int target_object, const Vocabulary& vocab,
                                   std::uint64_t seed);

// In-order scan keeping every token that belongs to the noun database.
NounExtraction extract_nouns(const Instruction& instr, const Vocabulary& vocab);

}  // namespace relnav::text
