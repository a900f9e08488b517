#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace hopqa {

/// One surface token with character offsets into the source string.
struct WordToken {
  std::string text;  // lowercased
  int begin = 0;     // [begin, end) in the original string
  int end = 0;
};

// Lowercase word/punctuation split: runs of alphanumerics form words, any
// other non-space character is its own token.
std::vector<WordToken> word_tokenize(const std::string& text);

/// Whitespace+punctuation vocabulary with fixed special ids. [UNK] is
/// reserved as the sentence marker and never produced from corpus text;
/// unknown words map to [OOV] instead.
class Tokenizer {
 public:
  static constexpr int kPad = 0;
  static constexpr int kCls = 1;
  static constexpr int kSep = 2;
  static constexpr int kUnk = 3;  // sentence marker
  static constexpr int kOov = 4;
  static constexpr int kYes = 5;
  static constexpr int kNo = 6;
  static constexpr int kNumSpecials = 7;

  Tokenizer();

  // Vocabulary from corpus text, ordered by (frequency desc, lexicographic)
  // after the reserved specials.
  static Tokenizer build(const std::vector<std::string>& corpus);

  int vocab_size() const { return static_cast<int>(id_to_token_.size()); }
  int id_of(const std::string& token) const;  // [OOV] for unknown words
  const std::string& token_of(int id) const;

  std::vector<int> encode(const std::string& text) const;
  // Space-joined tokens; punctuation attaches to the preceding token.
  std::string decode(const std::vector<int>& ids) const;

  nlohmann::json to_json() const;
  static Tokenizer from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static Tokenizer load(const std::string& path);

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

}  // namespace hopqa
