#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hopqa/dataset.hpp"

namespace hopqa {

// Lowercase, strip punctuation, drop articles a/an/the, collapse whitespace.
std::string normalize_answer(const std::string& s);

struct PrF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Token-bag precision/recall/F1 on normalized answers. Two empty bags count
// as a vacuous match (all ones).
PrF1 answer_prf(const std::string& pred, const std::string& gold);
std::pair<double, double> answer_em_f1(const std::string& pred, const std::string& gold);

using SpSet = std::set<std::pair<std::string, int>>;
PrF1 sp_prf(const SpSet& pred, const SpSet& gold);
std::pair<double, double> sp_em_f1(const SpSet& pred, const SpSet& gold);

// Set EM/F1 over predicted vs gold document titles (two titles each).
std::pair<double, double> doc_em_f1(const std::set<std::string>& pred,
                                    const std::set<std::string>& gold);

// Joint precision/recall are the per-component products.
PrF1 joint_prf(const PrF1& ans, const PrF1& sp);

struct MetricReport {
  double ans_em = 0.0, ans_f1 = 0.0;
  double sp_em = 0.0, sp_f1 = 0.0;
  double joint_em = 0.0, joint_f1 = 0.0;
  double doc_em = 0.0, doc_f1 = 0.0;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

// predictions: {"answer": {id: string}, "sp": {id: [[title, sent_id], ...]}}.
// Every gold id is scored; ids missing from the predictions score zero.
// Document metrics compare the titles cited in predicted vs gold supporting
// facts unless the caller overrides them from selector output.
MetricReport evaluate(const nlohmann::json& predictions, const std::vector<Example>& gold);
MetricReport evaluate_files(const std::string& pred_path, const std::string& gold_path);

}  // namespace hopqa
