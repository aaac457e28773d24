#include "relnav/text/vocabulary.hpp"

#include <fstream>

#include <json.hpp>

#include "relnav/common/error.hpp"

namespace relnav::text {

namespace {

// Indoor object nouns, roughly the frequent categories of household scans.
const char* const kObjectNouns[] = {
    "chair",    "table",   "lamp",      "sofa",     "bed",       "door",     "window",
    "cabinet",  "shelf",   "mirror",    "picture",  "plant",     "sink",     "toilet",
    "bathtub",  "towel",   "curtain",   "pillow",   "desk",      "monitor",  "keyboard",
    "fridge",   "oven",    "microwave", "counter",  "stool",     "rug",      "clock",
    "vase",     "basket",  "dresser",   "wardrobe", "bookshelf", "fireplace", "television",
    "painting", "cushion", "bench",     "drawer",   "stairs",    "railing",  "thermostat",
    "decor",    "heater",  "fan",       "switch",   "hanger",    "ladder"};

const char* const kFillerWords[] = {"walk", "to",   "the",  "go",   "past", "then",
                                    "find", "near", "stop", "at",   "room", "and",
                                    "into", "left", "right", "ahead"};

}  // namespace

Vocabulary Vocabulary::build(int noun_count) {
  if (noun_count < 1) throw ContractError("Vocabulary::build: noun_count must be >= 1");
  Vocabulary v;
  v.noun_count_ = noun_count;
  const int named = static_cast<int>(sizeof(kObjectNouns) / sizeof(kObjectNouns[0]));
  for (int i = 0; i < noun_count; ++i) {
    if (i < named) {
      v.tokens_.emplace_back(kObjectNouns[i]);
    } else {
      v.tokens_.push_back("object_" + std::to_string(i));
    }
  }
  for (const char* w : kFillerWords) v.tokens_.emplace_back(w);
  return v;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) throw LookupError("Vocabulary: unknown token id " + std::to_string(id));
  return tokens_[static_cast<std::size_t>(id)];
}

bool Vocabulary::is_noun(int id) const {
  if (id < 0 || id >= size()) throw LookupError("Vocabulary: unknown token id " + std::to_string(id));
  return id < noun_count_;
}

std::optional<int> Vocabulary::find(const std::string& token) const {
  for (int i = 0; i < size(); ++i) {
    if (tokens_[static_cast<std::size_t>(i)] == token) return i;
  }
  return std::nullopt;
}

std::string Vocabulary::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < size(); ++i) {
    arr.push_back({{"token", tokens_[static_cast<std::size_t>(i)]}, {"is_noun", is_noun(i)}});
  }
  return arr.dump(2);
}

Vocabulary Vocabulary::from_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("vocabulary: invalid JSON: ") + e.what());
  }
  Vocabulary v;
  bool in_fillers = false;
  for (const auto& item : arr) {
    const bool noun = item.at("is_noun").get<bool>();
    if (noun && in_fillers) throw IoError("vocabulary: nouns must precede filler words");
    if (!noun) in_fillers = true;
    v.tokens_.push_back(item.at("token").get<std::string>());
    if (noun) ++v.noun_count_;
  }
  if (v.noun_count_ == 0) throw IoError("vocabulary: no nouns");
  return v;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("Vocabulary::save: cannot open " + path);
  out << to_json() << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("Vocabulary::load: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

}  // namespace relnav::text
