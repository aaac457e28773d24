#include "relnav/text/instruction.hpp"

#include <json.hpp>

#include "relnav/common/error.hpp"
#include "relnav/env/shortest_path.hpp"
#include "relnav/numeric/rng.hpp"

namespace relnav::text {

using numeric::Rng;

std::string Instruction::render(const Vocabulary& v) const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += v.token(tokens[i]);
  }
  return out;
}

std::string Instruction::to_json(const Vocabulary& v) const {
  nlohmann::json j;
  j["tokens"] = tokens;
  j["target_node"] = target_node;
  j["target_object"] = target_object;
  j["text"] = render(v);
  return j.dump();
}

Instruction Instruction::from_json(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("instruction: invalid JSON: ") + e.what());
  }
  Instruction instr;
  instr.tokens = j.at("tokens").get<std::vector<int>>();
  instr.target_node = j.at("target_node").get<int>();
  instr.target_object = j.at("target_object").get<int>();
  if (instr.tokens.empty()) throw IoError("instruction: empty token list");
  return instr;
}

Instruction synthesize_instruction(const env::EnvironmentGraph& g, int start, int target_node,
                                   int target_object, const Vocabulary& vocab,
                                   std::uint64_t seed) {
  bool target_placed = false;
  for (const auto& o : g.objects_at(target_node)) {
    if (o.category == target_object) target_placed = true;
  }
  if (!target_placed) {
    throw ContractError("synthesize_instruction: target object " +
                        std::to_string(target_object) + " is not placed at node " +
                        std::to_string(target_node));
  }

  Rng rng(seed);
  const auto route = env::shortest_path(g, start, target_node);

  // Landmarks: object nouns seen at intermediate route nodes, in path order.
  std::vector<int> landmarks;
  for (std::size_t i = 1; i + 1 < route.nodes.size(); ++i) {
    const auto& objs = g.objects_at(route.nodes[i]);
    if (objs.empty()) continue;
    landmarks.push_back(objs[rng.index(objs.size())].category);
  }
  while (landmarks.size() > 3) landmarks.erase(landmarks.begin() + static_cast<std::ptrdiff_t>(
                                                   rng.index(landmarks.size())));

  const int fillers = vocab.filler_count();
  auto filler = [&]() { return vocab.filler_base() + static_cast<int>(rng.index(
                                                         static_cast<std::size_t>(fillers))); };

  Instruction instr;
  instr.target_node = target_node;
  instr.target_object = target_object;
  for (int lm : landmarks) {
    const int lead = 1 + static_cast<int>(rng.index(2));
    for (int i = 0; i < lead; ++i) instr.tokens.push_back(filler());
    instr.tokens.push_back(lm);
  }
  const int lead = 1 + static_cast<int>(rng.index(2));
  for (int i = 0; i < lead; ++i) instr.tokens.push_back(filler());
  instr.tokens.push_back(target_object);
  return instr;
}

NounExtraction extract_nouns(const Instruction& instr, const Vocabulary& vocab) {
  if (vocab.noun_count() == 0) throw ContractError("extract_nouns: empty noun database");
  NounExtraction out;
  for (std::size_t i = 0; i < instr.tokens.size(); ++i) {
    if (vocab.is_noun(instr.tokens[i])) {
      out.categories.push_back(instr.tokens[i]);
      out.positions.push_back(static_cast<int>(i));
    }
  }
  return out;
}

}  // namespace relnav::text
