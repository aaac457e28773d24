#pragma once

#include <optional>
#include <string>
#include <vector>

namespace relnav::text {

// Token vocabulary: object-category nouns first (token id == category id),
// filler words after. The noun block doubles as the noun database used for
// object-related token extraction.
class Vocabulary {
 public:
  static Vocabulary build(int noun_count);

  int size() const { return static_cast<int>(tokens_.size()); }
  int noun_count() const { return noun_count_; }
  int filler_count() const { return size() - noun_count_; }
  const std::string& token(int id) const;
  bool is_noun(int id) const;
  std::optional<int> find(const std::string& token) const;
  // First filler token id (fillers occupy [noun_count, size)).
  int filler_base() const { return noun_count_; }

  std::string to_json() const;
  static Vocabulary from_json(const std::string& text);
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::vector<std::string> tokens_;
  int noun_count_ = 0;
};

}  // namespace relnav::text
