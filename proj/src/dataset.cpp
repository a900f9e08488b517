#include "hopqa/dataset.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace hopqa {

using nlohmann::json;

std::vector<int> Example::relevance_labels() const {
  std::set<std::string> relevant;
  for (const SupportingFact& sf : supporting_facts) relevant.insert(sf.title);
  std::vector<int> labels(documents.size(), 0);
  for (std::size_t i = 0; i < documents.size(); ++i) {
    labels[i] = relevant.count(documents[i].title) ? 1 : 0;
  }
  return labels;
}

std::vector<int> Example::gold_doc_indices() const {
  std::vector<int> out;
  std::vector<int> labels = relevance_labels();
  // Order of first appearance in supporting_facts, matching hop order.
  std::vector<std::string> seen;
  for (const SupportingFact& sf : supporting_facts) {
    bool dup = false;
    for (const std::string& s : seen) dup = dup || s == sf.title;
    if (!dup) seen.push_back(sf.title);
  }
  for (const std::string& title : seen) {
    int idx = doc_index(title);
    if (idx >= 0) out.push_back(idx);
  }
  return out;
}

int Example::doc_index(const std::string& title) const {
  for (std::size_t i = 0; i < documents.size(); ++i) {
    if (documents[i].title == title) return static_cast<int>(i);
  }
  return -1;
}

AnswerType answer_type_of(const std::string& answer) {
  if (answer == "yes") return AnswerType::Yes;
  if (answer == "no") return AnswerType::No;
  return AnswerType::Span;
}

std::vector<Example> parse_examples(const json& j) {
  if (!j.is_array()) throw std::runtime_error("dataset root must be a JSON array");
  std::vector<Example> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& rec = j[i];
    try {
      Example ex;
      ex.id = rec.at("_id").get<std::string>();
      ex.question = rec.at("question").get<std::string>();
      ex.answer = rec.at("answer").get<std::string>();
      ex.answer_type = answer_type_of(ex.answer);
      for (const json& doc : rec.at("context")) {
        Document d;
        d.title = doc.at(0).get<std::string>();
        d.sentences = doc.at(1).get<std::vector<std::string>>();
        ex.documents.push_back(std::move(d));
      }
      for (const json& sf : rec.at("supporting_facts")) {
        ex.supporting_facts.push_back(
            {sf.at(0).get<std::string>(), sf.at(1).get<int>()});
      }
      for (const SupportingFact& sf : ex.supporting_facts) {
        if (ex.doc_index(sf.title) < 0) {
          throw std::runtime_error("supporting-fact title '" + sf.title +
                                   "' missing from context");
        }
      }
      out.push_back(std::move(ex));
    } catch (const std::exception& e) {
      throw std::runtime_error("record " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Example> load_hotpot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read dataset file " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return parse_examples(j);
}

json examples_to_json(const std::vector<Example>& examples) {
  json arr = json::array();
  for (const Example& ex : examples) {
    json context = json::array();
    for (const Document& d : ex.documents) context.push_back({d.title, d.sentences});
    json sp = json::array();
    for (const SupportingFact& sf : ex.supporting_facts) sp.push_back({sf.title, sf.sent_id});
    arr.push_back({{"_id", ex.id},
                   {"question", ex.question},
                   {"answer", ex.answer},
                   {"supporting_facts", sp},
                   {"context", context}});
  }
  return arr;
}

void save_hotpot(const std::string& path, const std::vector<Example>& examples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file " + path);
  out << examples_to_json(examples).dump(1) << "\n";
}

namespace {

// Crude but deterministic: sentences end at ". " boundaries.
std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t dot = text.find(". ", start);
    if (dot == std::string::npos) {
      out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, dot + 1 - start));
    start = dot + 2;
  }
  if (out.empty()) out.push_back(text);
  return out;
}

}  // namespace

SquadLoadResult parse_squad(const json& j) {
  SquadLoadResult result;
  for (const json& article : j.at("data")) {
    const std::string title = article.value("title", std::string("article"));
    for (const json& para : article.at("paragraphs")) {
      const std::string context = para.at("context").get<std::string>();
      const std::vector<std::string> sentences = split_sentences(context);
      // Character offset of each sentence inside the paragraph.
      std::vector<std::size_t> sent_begin;
      std::size_t pos = 0;
      for (const std::string& s : sentences) {
        pos = context.find(s, pos);
        sent_begin.push_back(pos);
        pos += s.size();
      }
      for (const json& qa : para.at("qas")) {
        const json& answers = qa.at("answers");
        if (answers.empty()) {
          ++result.skipped;
          continue;
        }
        const std::string text = answers[0].at("text").get<std::string>();
        const int answer_start = answers[0].at("answer_start").get<int>();
        if (answer_start < 0 ||
            context.compare(answer_start, text.size(), text) != 0) {
          ++result.skipped;
          continue;
        }
        int sent_id = 0;
        for (std::size_t s = 0; s < sent_begin.size(); ++s) {
          if (static_cast<std::size_t>(answer_start) >= sent_begin[s]) {
            sent_id = static_cast<int>(s);
          }
        }
        Example ex;
        ex.id = qa.at("id").get<std::string>();
        ex.question = qa.at("question").get<std::string>();
        ex.answer = text;
        ex.answer_type = answer_type_of(text);
        ex.documents.push_back({title, sentences});
        ex.supporting_facts.push_back({title, sent_id});
        result.examples.push_back(std::move(ex));
      }
    }
  }
  return result;
}

SquadLoadResult load_squad(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read dataset file " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return parse_squad(j);
}

}  // namespace hopqa
