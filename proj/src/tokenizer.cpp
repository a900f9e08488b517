#include "hopqa/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <stdexcept>

namespace hopqa {

using nlohmann::json;

namespace {
const std::vector<std::string> kSpecials = {"[PAD]", "[CLS]", "[SEP]", "[UNK]",
                                            "[OOV]", "yes",   "no"};

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }
}  // namespace

std::vector<WordToken> word_tokenize(const std::string& text) {
  std::vector<WordToken> out;
  const int n = static_cast<int>(text.size());
  int i = 0;
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (is_word_char(c)) {
      int j = i;
      while (j < n && is_word_char(static_cast<unsigned char>(text[j]))) ++j;
      std::string w = text.substr(i, j - i);
      std::transform(w.begin(), w.end(), w.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      out.push_back({std::move(w), i, j});
      i = j;
    } else {
      out.push_back({std::string(1, text[i]), i, i + 1});
      ++i;
    }
  }
  return out;
}

Tokenizer::Tokenizer() {
  id_to_token_ = kSpecials;
  for (int i = 0; i < static_cast<int>(id_to_token_.size()); ++i) {
    token_to_id_[id_to_token_[i]] = i;
  }
}

Tokenizer Tokenizer::build(const std::vector<std::string>& corpus) {
  std::map<std::string, long> freq;
  for (const std::string& text : corpus) {
    for (const WordToken& t : word_tokenize(text)) ++freq[t.text];
  }
  std::vector<std::pair<std::string, long>> entries(freq.begin(), freq.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Tokenizer tok;
  for (const auto& [word, count] : entries) {
    (void)count;
    if (tok.token_to_id_.count(word)) continue;  // "yes"/"no" already reserved
    tok.token_to_id_[word] = static_cast<int>(tok.id_to_token_.size());
    tok.id_to_token_.push_back(word);
  }
  return tok;
}

int Tokenizer::id_of(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kOov : it->second;
}

const std::string& Tokenizer::token_of(int id) const {
  if (id < 0 || id >= vocab_size()) {
    throw std::out_of_range("token id " + std::to_string(id) + " out of vocabulary");
  }
  return id_to_token_[id];
}

std::vector<int> Tokenizer::encode(const std::string& text) const {
  std::vector<int> ids;
  for (const WordToken& t : word_tokenize(text)) ids.push_back(id_of(t.text));
  return ids;
}

std::string Tokenizer::decode(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids) {
    const std::string& tok = token_of(id);
    const bool punct = tok.size() == 1 && !is_word_char(static_cast<unsigned char>(tok[0]));
    if (!out.empty() && !punct) out += ' ';
    out += tok;
  }
  return out;
}

json Tokenizer::to_json() const { return json{{"tokens", id_to_token_}}; }

Tokenizer Tokenizer::from_json(const json& j) {
  Tokenizer tok;
  std::vector<std::string> tokens = j.at("tokens").get<std::vector<std::string>>();
  if (tokens.size() < kSpecials.size() ||
      !std::equal(kSpecials.begin(), kSpecials.end(), tokens.begin())) {
    throw std::runtime_error("tokenizer file does not carry the reserved specials");
  }
  tok.id_to_token_ = std::move(tokens);
  tok.token_to_id_.clear();
  for (int i = 0; i < static_cast<int>(tok.id_to_token_.size()); ++i) {
    tok.token_to_id_[tok.id_to_token_[i]] = i;
  }
  return tok;
}

void Tokenizer::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write tokenizer file " + path);
  out << to_json().dump(1) << "\n";
}

Tokenizer Tokenizer::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read tokenizer file " + path);
  json j;
  in >> j;
  return from_json(j);
}

}  // namespace hopqa
