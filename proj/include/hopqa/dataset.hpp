#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace hopqa {

enum class AnswerType { Span, Yes, No };

struct Document {
  std::string title;
  std::vector<std::string> sentences;
};

struct SupportingFact {
  std::string title;
  int sent_id = 0;
  bool operator==(const SupportingFact& o) const {
    return title == o.title && sent_id == o.sent_id;
  }
};

/// One QA instance: question, candidate documents, supporting-fact labels,
/// answer. Documents containing supporting facts are the relevant ones.
struct Example {
  std::string id;
  std::string question;
  std::string answer;
  AnswerType answer_type = AnswerType::Span;
  std::vector<Document> documents;
  std::vector<SupportingFact> supporting_facts;

  // 1 for every document whose title appears in supporting_facts.
  std::vector<int> relevance_labels() const;
  std::vector<int> gold_doc_indices() const;
  int doc_index(const std::string& title) const;  // -1 when absent
};

AnswerType answer_type_of(const std::string& answer);

// Distractor-style JSON: [{_id, question, answer, supporting_facts, context}].
std::vector<Example> parse_examples(const nlohmann::json& j);
std::vector<Example> load_hotpot(const std::string& path);
nlohmann::json examples_to_json(const std::vector<Example>& examples);
void save_hotpot(const std::string& path, const std::vector<Example>& examples);

struct SquadLoadResult {
  std::vector<Example> examples;
  int skipped = 0;  // unresolved answer offsets
};

// SQuAD v1.1 JSON. One candidate document per example; the sentence holding
// the answer offset becomes the supporting fact.
SquadLoadResult load_squad(const std::string& path);
SquadLoadResult parse_squad(const nlohmann::json& j);

}  // namespace hopqa
