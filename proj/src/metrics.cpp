#include "hopqa/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hopqa {

using nlohmann::json;

std::string normalize_answer(const std::string& s) {
  std::string lowered;
  lowered.reserve(s.size());
  for (char c : s) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (std::ispunct(u)) continue;
    lowered += static_cast<char>(std::tolower(u));
  }
  std::istringstream iss(lowered);
  std::string word, out;
  while (iss >> word) {
    if (word == "a" || word == "an" || word == "the") continue;
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

namespace {

std::vector<std::string> normalized_tokens(const std::string& s) {
  std::istringstream iss(normalize_answer(s));
  std::vector<std::string> out;
  std::string word;
  while (iss >> word) out.push_back(word);
  return out;
}

PrF1 from_counts(double common, double pred_size, double gold_size) {
  if (pred_size == 0.0 && gold_size == 0.0) return {1.0, 1.0, 1.0};  // vacuous match
  if (common == 0.0) return {0.0, 0.0, 0.0};
  PrF1 r;
  r.precision = common / pred_size;
  r.recall = common / gold_size;
  r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

}  // namespace

PrF1 answer_prf(const std::string& pred, const std::string& gold) {
  std::vector<std::string> p = normalized_tokens(pred);
  std::vector<std::string> g = normalized_tokens(gold);
  std::map<std::string, int> counts;
  for (const std::string& w : g) ++counts[w];
  double common = 0.0;
  for (const std::string& w : p) {
    auto it = counts.find(w);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      common += 1.0;
    }
  }
  return from_counts(common, static_cast<double>(p.size()), static_cast<double>(g.size()));
}

std::pair<double, double> answer_em_f1(const std::string& pred, const std::string& gold) {
  const double em = normalize_answer(pred) == normalize_answer(gold) ? 1.0 : 0.0;
  return {em, answer_prf(pred, gold).f1};
}

PrF1 sp_prf(const SpSet& pred, const SpSet& gold) {
  double common = 0.0;
  for (const auto& p : pred) common += gold.count(p) ? 1.0 : 0.0;
  return from_counts(common, static_cast<double>(pred.size()),
                     static_cast<double>(gold.size()));
}

std::pair<double, double> sp_em_f1(const SpSet& pred, const SpSet& gold) {
  return {pred == gold ? 1.0 : 0.0, sp_prf(pred, gold).f1};
}

std::pair<double, double> doc_em_f1(const std::set<std::string>& pred,
                                    const std::set<std::string>& gold) {
  double common = 0.0;
  for (const std::string& t : pred) common += gold.count(t) ? 1.0 : 0.0;
  PrF1 r = from_counts(common, static_cast<double>(pred.size()),
                       static_cast<double>(gold.size()));
  return {pred == gold ? 1.0 : 0.0, r.f1};
}

PrF1 joint_prf(const PrF1& ans, const PrF1& sp) {
  PrF1 j;
  j.precision = ans.precision * sp.precision;
  j.recall = ans.recall * sp.recall;
  j.f1 = (j.precision + j.recall) > 0.0
             ? 2.0 * j.precision * j.recall / (j.precision + j.recall)
             : 0.0;
  return j;
}

json MetricReport::to_json() const {
  return json{{"ans_em", ans_em},     {"ans_f1", ans_f1},   {"sp_em", sp_em},
              {"sp_f1", sp_f1},       {"joint_em", joint_em}, {"joint_f1", joint_f1},
              {"doc_em", doc_em},     {"doc_f1", doc_f1}};
}

std::string MetricReport::to_table() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "          EM        F1\n"
                "answer  %8.4f  %8.4f\n"
                "sp      %8.4f  %8.4f\n"
                "joint   %8.4f  %8.4f\n"
                "doc     %8.4f  %8.4f\n",
                ans_em, ans_f1, sp_em, sp_f1, joint_em, joint_f1, doc_em, doc_f1);
  return buf;
}

MetricReport evaluate(const json& predictions, const std::vector<Example>& gold) {
  const json answers = predictions.value("answer", json::object());
  const json sps = predictions.value("sp", json::object());
  MetricReport report;
  if (gold.empty()) return report;
  for (const Example& ex : gold) {
    std::string pred_answer;
    SpSet pred_sp;
    std::set<std::string> pred_titles;
    if (answers.contains(ex.id)) pred_answer = answers.at(ex.id).get<std::string>();
    if (sps.contains(ex.id)) {
      for (const json& pair : sps.at(ex.id)) {
        pred_sp.insert({pair.at(0).get<std::string>(), pair.at(1).get<int>()});
        pred_titles.insert(pair.at(0).get<std::string>());
      }
    }
    SpSet gold_sp;
    std::set<std::string> gold_titles;
    for (const SupportingFact& sf : ex.supporting_facts) {
      gold_sp.insert({sf.title, sf.sent_id});
      gold_titles.insert(sf.title);
    }

    PrF1 ans = answer_prf(pred_answer, ex.answer);
    const double ans_em =
        normalize_answer(pred_answer) == normalize_answer(ex.answer) ? 1.0 : 0.0;
    PrF1 sp = sp_prf(pred_sp, gold_sp);
    const double sp_em = pred_sp == gold_sp ? 1.0 : 0.0;
    PrF1 joint = joint_prf(ans, sp);
    auto [doc_em, doc_f1] = doc_em_f1(pred_titles, gold_titles);

    report.ans_em += ans_em;
    report.ans_f1 += ans.f1;
    report.sp_em += sp_em;
    report.sp_f1 += sp.f1;
    report.joint_em += ans_em * sp_em;
    report.joint_f1 += joint.f1;
    report.doc_em += doc_em;
    report.doc_f1 += doc_f1;
  }
  const double n = static_cast<double>(gold.size());
  report.ans_em /= n;
  report.ans_f1 /= n;
  report.sp_em /= n;
  report.sp_f1 /= n;
  report.joint_em /= n;
  report.joint_f1 /= n;
  report.doc_em /= n;
  report.doc_f1 /= n;
  return report;
}

MetricReport evaluate_files(const std::string& pred_path, const std::string& gold_path) {
  std::ifstream in(pred_path);
  if (!in) throw std::runtime_error("cannot read prediction file " + pred_path);
  json predictions;
  try {
    in >> predictions;
  } catch (const std::exception& e) {
    throw std::runtime_error(pred_path + ": " + e.what());
  }
  return evaluate(predictions, load_hotpot(gold_path));
}

}  // namespace hopqa
