#include "hopqa/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "hopqa/metrics.hpp"

namespace hopqa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json train_config_to_json(const TrainConfig& c) {
  return json{{"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"learning_rate", c.learning_rate},
              {"warmup_fraction", c.warmup_fraction},
              {"weight_decay", c.weight_decay},
              {"gamma", c.gamma},
              {"curriculum", curriculum_to_string(c.curriculum)},
              {"total_step_budget", c.total_step_budget},
              {"dev_log_limit", c.dev_log_limit}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig base) {
  base.epochs = j.value("epochs", base.epochs);
  base.batch_size = j.value("batch_size", base.batch_size);
  base.learning_rate = j.value("learning_rate", base.learning_rate);
  base.warmup_fraction = j.value("warmup_fraction", base.warmup_fraction);
  base.weight_decay = j.value("weight_decay", base.weight_decay);
  if (j.contains("gamma")) base.gamma = j.at("gamma").get<std::array<double, 3>>();
  if (j.contains("curriculum")) {
    base.curriculum = curriculum_from_string(j.at("curriculum").get<std::string>());
  }
  base.total_step_budget = j.value("total_step_budget", base.total_step_budget);
  base.dev_log_limit = j.value("dev_log_limit", base.dev_log_limit);
  return base;
}

}  // namespace

CrossAttentionMode cross_attention_from_string(const std::string& s) {
  if (s == "full") return CrossAttentionMode::Full;
  if (s == "ln_only") return CrossAttentionMode::LnOnly;
  if (s == "plain_only") return CrossAttentionMode::PlainOnly;
  if (s == "none") return CrossAttentionMode::None;
  throw std::invalid_argument("unknown cross-attention mode '" + s + "'");
}

std::string cross_attention_to_string(CrossAttentionMode m) {
  switch (m) {
    case CrossAttentionMode::Full: return "full";
    case CrossAttentionMode::LnOnly: return "ln_only";
    case CrossAttentionMode::PlainOnly: return "plain_only";
    case CrossAttentionMode::None: return "none";
  }
  return "full";
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  PipelineConfig cfg;
  cfg.reader_train.batch_size = 8;
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("data")) {
    const json& d = j.at("data");
    if (d.contains("synthetic")) {
      const json& s = d.at("synthetic");
      SyntheticConfig& sc = cfg.synthetic;
      sc.num_docs = s.value("num_docs", sc.num_docs);
      sc.single_hop_train = s.value("single_hop_train", sc.single_hop_train);
      sc.single_hop_dev = s.value("single_hop_dev", sc.single_hop_dev);
      sc.multi_hop_train = s.value("multi_hop_train", sc.multi_hop_train);
      sc.multi_hop_dev = s.value("multi_hop_dev", sc.multi_hop_dev);
      sc.num_people = s.value("num_people", sc.num_people);
      sc.num_works = s.value("num_works", sc.num_works);
      sc.num_cities = s.value("num_cities", sc.num_cities);
      sc.num_fields = s.value("num_fields", sc.num_fields);
      sc.bridge_work_fraction = s.value("bridge_work_fraction", sc.bridge_work_fraction);
      sc.bridge_study_fraction = s.value("bridge_study_fraction", sc.bridge_study_fraction);
    }
    if (d.contains("files")) {
      const json& f = d.at("files");
      cfg.file_single_hop_train = f.value("single_hop_train", std::string());
      cfg.file_single_hop_dev = f.value("single_hop_dev", std::string());
      cfg.file_multi_hop_train = f.value("multi_hop_train", std::string());
      cfg.file_multi_hop_dev = f.value("multi_hop_dev", std::string());
    }
  }
  if (j.contains("encoder")) {
    const json& e = j.at("encoder");
    EncoderConfig& ec = cfg.encoder;
    ec.max_seq_len = e.value("max_seq_len", ec.max_seq_len);
    ec.hidden_dim = e.value("hidden_dim", ec.hidden_dim);
    ec.num_layers = e.value("num_layers", ec.num_layers);
    ec.num_heads = e.value("num_heads", ec.num_heads);
    ec.feed_forward_dim = e.value("feed_forward_dim", ec.feed_forward_dim);
    ec.dropout_rate = e.value("dropout_rate", ec.dropout_rate);
  }
  if (j.contains("selector_train")) {
    cfg.selector_train = train_config_from_json(j.at("selector_train"), cfg.selector_train);
  }
  if (j.contains("reader_train")) {
    cfg.reader_train = train_config_from_json(j.at("reader_train"), cfg.reader_train);
  }
  if (j.contains("reader")) {
    const json& r = j.at("reader");
    cfg.max_answer_len = r.value("max_answer_len", cfg.max_answer_len);
    cfg.support_threshold = r.value("support_threshold", cfg.support_threshold);
    if (r.contains("cross_attention")) {
      cfg.cross_attention =
          cross_attention_from_string(r.at("cross_attention").get<std::string>());
    }
  }
  return cfg;
}

json PipelineConfig::to_json() const {
  const SyntheticConfig& sc = synthetic;
  json data{{"synthetic",
             {{"num_docs", sc.num_docs},
              {"single_hop_train", sc.single_hop_train},
              {"single_hop_dev", sc.single_hop_dev},
              {"multi_hop_train", sc.multi_hop_train},
              {"multi_hop_dev", sc.multi_hop_dev},
              {"num_people", sc.num_people},
              {"num_works", sc.num_works},
              {"num_cities", sc.num_cities},
              {"num_fields", sc.num_fields},
              {"bridge_work_fraction", sc.bridge_work_fraction},
              {"bridge_study_fraction", sc.bridge_study_fraction}}}};
  if (!file_multi_hop_train.empty() || !file_multi_hop_dev.empty() ||
      !file_single_hop_train.empty() || !file_single_hop_dev.empty()) {
    data["files"] = {{"single_hop_train", file_single_hop_train},
                     {"single_hop_dev", file_single_hop_dev},
                     {"multi_hop_train", file_multi_hop_train},
                     {"multi_hop_dev", file_multi_hop_dev}};
  }
  return json{
      {"seed", seed},
      {"data", data},
      {"encoder",
       {{"max_seq_len", encoder.max_seq_len},
        {"hidden_dim", encoder.hidden_dim},
        {"num_layers", encoder.num_layers},
        {"num_heads", encoder.num_heads},
        {"feed_forward_dim", encoder.feed_forward_dim},
        {"dropout_rate", encoder.dropout_rate}}},
      {"selector_train", train_config_to_json(selector_train)},
      {"reader_train", train_config_to_json(reader_train)},
      {"reader",
       {{"max_answer_len", max_answer_len},
        {"support_threshold", support_threshold},
        {"cross_attention", cross_attention_to_string(cross_attention)}}}};
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  if (path.empty()) {
    PipelineConfig cfg;
    cfg.reader_train.batch_size = 8;
    return cfg;
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return from_json(j);
}

RunPaths::RunPaths(std::string r) : root(std::move(r)) {}
std::string RunPaths::config() const { return root + "/config.json"; }
std::string RunPaths::checkpoints() const { return root + "/checkpoints"; }
std::string RunPaths::tokenizer() const { return checkpoints() + "/tokenizer.json"; }
std::string RunPaths::selector_stage1() const { return checkpoints() + "/selector_stage1.json"; }
std::string RunPaths::selector_stage2() const { return checkpoints() + "/selector_stage2.json"; }
std::string RunPaths::reader() const { return checkpoints() + "/reader.json"; }
std::string RunPaths::selections() const { return root + "/selections.json"; }
std::string RunPaths::predictions() const { return root + "/predictions.json"; }
std::string RunPaths::metrics() const { return root + "/metrics.json"; }
std::string RunPaths::train_log() const { return root + "/train.log"; }

DataBundle resolve_data(const PipelineConfig& cfg) {
  DataBundle data;
  if (!cfg.file_multi_hop_train.empty()) {
    data.multi_hop_train = load_hotpot(cfg.file_multi_hop_train);
    data.multi_hop_dev = load_hotpot(cfg.file_multi_hop_dev);
    if (!cfg.file_single_hop_train.empty()) {
      data.single_hop_train = load_hotpot(cfg.file_single_hop_train);
    }
    if (!cfg.file_single_hop_dev.empty()) {
      data.single_hop_dev = load_hotpot(cfg.file_single_hop_dev);
    }
    return data;
  }
  SyntheticData s = generate_synthetic(cfg.synthetic, cfg.seed);
  data.single_hop_train = std::move(s.single_hop_train);
  data.single_hop_dev = std::move(s.single_hop_dev);
  data.multi_hop_train = std::move(s.multi_hop_train);
  data.multi_hop_dev = std::move(s.multi_hop_dev);
  return data;
}

Tokenizer build_tokenizer(const DataBundle& data) {
  std::vector<std::string> corpus;
  auto add = [&corpus](const std::vector<Example>& examples) {
    for (const Example& ex : examples) {
      corpus.push_back(ex.question);
      corpus.push_back(ex.answer);
      for (const Document& d : ex.documents) {
        corpus.push_back(d.title);
        for (const std::string& s : d.sentences) corpus.push_back(s);
      }
    }
  };
  add(data.single_hop_train);
  add(data.single_hop_dev);
  add(data.multi_hop_train);
  add(data.multi_hop_dev);
  return Tokenizer::build(corpus);
}

json selections_to_json(const std::vector<Example>& examples,
                        const std::vector<SelectionResult>& results) {
  json out = json::object();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Example& ex = examples[i];
    const SelectionResult& r = results[i];
    json s1 = json::object(), s2 = json::object();
    for (std::size_t j = 0; j < ex.documents.size(); ++j) {
      s1[ex.documents[j].title] = r.stage1_scores[j];
      if (static_cast<int>(j) != r.p1_index) s2[ex.documents[j].title] = r.stage2_scores[j];
    }
    out[ex.id] = {{"p1", ex.documents[r.p1_index].title},
                  {"p2", ex.documents[r.p2_index].title},
                  {"stage1_scores", s1},
                  {"stage2_scores", s2}};
  }
  return out;
}

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::string pred_path, gold_path;
  std::int64_t seed = -1;  // -1: keep config value
  int stage = 1;
  std::string curriculum;
  bool oracle_docs = false;
  int count = -1;  // gen-data: overrides all four example counts
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void write_json_file(const std::string& path, const json& j) {
  write_text(path, j.dump(1) + "\n");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j;
  in >> j;
  return j;
}

PipelineConfig effective_config(const CliOptions& opt) {
  PipelineConfig cfg = PipelineConfig::load(opt.config_path);
  if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
  if (!opt.curriculum.empty()) {
    cfg.reader_train.curriculum = curriculum_from_string(opt.curriculum);
  }
  cfg.selector_train.seed = cfg.seed;
  cfg.reader_train.seed = cfg.seed;
  return cfg;
}

RunPaths prepare_run_dir(const PipelineConfig& cfg, const std::string& out_dir) {
  if (out_dir.empty()) throw std::runtime_error("--out run directory is required");
  RunPaths run(out_dir);
  fs::create_directories(run.checkpoints());
  write_json_file(run.config(), cfg.to_json());
  return run;
}

Tokenizer load_or_build_tokenizer(const RunPaths& run, const DataBundle& data) {
  if (fs::exists(run.tokenizer())) return Tokenizer::load(run.tokenizer());
  Tokenizer tok = build_tokenizer(data);
  tok.save(run.tokenizer());
  return tok;
}

Tokenizer require_tokenizer(const RunPaths& run, const std::string& needed_by) {
  if (!fs::exists(run.tokenizer())) {
    throw std::runtime_error(needed_by + " needs " + run.tokenizer() +
                             "; run train-selector or train-reader first");
  }
  return Tokenizer::load(run.tokenizer());
}

EncoderConfig encoder_config_for(const PipelineConfig& cfg, const Tokenizer& tok) {
  EncoderConfig ec = cfg.encoder;
  ec.vocab_size = tok.vocab_size();
  return ec;
}

ReaderConfig reader_config_for(const PipelineConfig& cfg, const Tokenizer& tok) {
  ReaderConfig rc;
  rc.encoder = encoder_config_for(cfg, tok);
  rc.cross_attention = cfg.cross_attention;
  rc.gamma = cfg.reader_train.gamma;
  rc.max_answer_len = cfg.max_answer_len;
  rc.support_threshold = cfg.support_threshold;
  return rc;
}

RelevanceModel load_relevance_model(const PipelineConfig& cfg, const Tokenizer& tok,
                                    const std::string& path, const std::string& stage_hint) {
  if (!fs::exists(path)) {
    throw std::runtime_error("missing checkpoint " + path + "; run " + stage_hint +
                             " first");
  }
  Rng rng(0);
  RelevanceModel model(encoder_config_for(cfg, tok), rng);
  model.load(path);
  return model;
}

ReaderModel load_reader_model(const PipelineConfig& cfg, const Tokenizer& tok,
                              const std::string& path) {
  if (!fs::exists(path)) {
    throw std::runtime_error("missing checkpoint " + path + "; run train-reader first");
  }
  Rng rng(0);
  ReaderModel model(reader_config_for(cfg, tok), rng);
  model.load(path);
  return model;
}

int cmd_gen_data(const CliOptions& opt) {
  PipelineConfig cfg = effective_config(opt);
  if (opt.count >= 0) {
    cfg.synthetic.single_hop_train = opt.count;
    cfg.synthetic.single_hop_dev = opt.count;
    cfg.synthetic.multi_hop_train = opt.count;
    cfg.synthetic.multi_hop_dev = opt.count;
  }
  if (opt.out_dir.empty()) throw std::runtime_error("--out directory is required");
  fs::create_directories(opt.out_dir);
  SyntheticData data = generate_synthetic(cfg.synthetic, cfg.seed);
  save_hotpot(opt.out_dir + "/sh_train.json", data.single_hop_train);
  save_hotpot(opt.out_dir + "/sh_dev.json", data.single_hop_dev);
  save_hotpot(opt.out_dir + "/mh_train.json", data.multi_hop_train);
  save_hotpot(opt.out_dir + "/mh_dev.json", data.multi_hop_dev);
  write_json_file(opt.out_dir + "/config.json", cfg.to_json());
  std::cout << "wrote sh_train/sh_dev/mh_train/mh_dev to " << opt.out_dir << "\n";
  return 0;
}

int cmd_train_selector(const CliOptions& opt) {
  PipelineConfig cfg = effective_config(opt);
  DataBundle data = resolve_data(cfg);
  RunPaths run = prepare_run_dir(cfg, opt.out_dir);
  Tokenizer tok = load_or_build_tokenizer(run, data);
  std::ofstream log(run.train_log(), std::ios::app);
  TrainLogger logger(&log);
  const EncoderConfig ec = encoder_config_for(cfg, tok);
  if (opt.stage == 1) {
    RelevanceModel stage1 = train_selector_stage1(data.multi_hop_train, data.multi_hop_dev,
                                                  tok, ec, cfg.selector_train, &logger);
    stage1.save(run.selector_stage1());
    std::cout << "saved " << run.selector_stage1() << "\n";
  } else if (opt.stage == 2) {
    RelevanceModel stage1 = load_relevance_model(cfg, tok, run.selector_stage1(),
                                                 "train-selector --stage 1");
    RelevanceModel stage2 =
        train_selector_stage2(stage1, data.multi_hop_train, data.multi_hop_dev, tok, ec,
                              cfg.selector_train, &logger);
    stage2.save(run.selector_stage2());
    std::cout << "saved " << run.selector_stage2() << "\n";
  } else {
    throw std::runtime_error("--stage must be 1 or 2");
  }
  return 0;
}

int cmd_train_reader(const CliOptions& opt) {
  PipelineConfig cfg = effective_config(opt);
  DataBundle data = resolve_data(cfg);
  RunPaths run = prepare_run_dir(cfg, opt.out_dir);
  Tokenizer tok = load_or_build_tokenizer(run, data);
  std::ofstream log(run.train_log(), std::ios::app);
  TrainLogger logger(&log);
  ReaderModel reader =
      train_reader(data.single_hop_train, data.multi_hop_train, data.multi_hop_dev, tok,
                   reader_config_for(cfg, tok), cfg.reader_train, &logger);
  reader.save(run.reader());
  std::cout << "saved " << run.reader() << "\n";
  return 0;
}

int cmd_select(const CliOptions& opt) {
  PipelineConfig cfg = effective_config(opt);
  DataBundle data = resolve_data(cfg);
  RunPaths run(opt.out_dir.empty() ? throw std::runtime_error("--out is required")
                                   : opt.out_dir);
  Tokenizer tok = require_tokenizer(run, "select");
  RelevanceModel stage1 =
      load_relevance_model(cfg, tok, run.selector_stage1(), "train-selector --stage 1");
  RelevanceModel stage2 =
      load_relevance_model(cfg, tok, run.selector_stage2(), "train-selector --stage 2");
  Selector selector(stage1, stage2, tok);
  std::vector<SelectionResult> results;
  results.reserve(data.multi_hop_dev.size());
  for (const Example& ex : data.multi_hop_dev) results.push_back(selector.select(ex));
  write_json_file(run.selections(), selections_to_json(data.multi_hop_dev, results));
  std::cout << "wrote " << run.selections() << "\n";
  return 0;
}

int cmd_answer(const CliOptions& opt) {
  PipelineConfig cfg = effective_config(opt);
  DataBundle data = resolve_data(cfg);
  RunPaths run(opt.out_dir.empty() ? throw std::runtime_error("--out is required")
                                   : opt.out_dir);
  Tokenizer tok = require_tokenizer(run, "answer");
  ReaderModel reader = load_reader_model(cfg, tok, run.reader());

  json selections;
  if (!opt.oracle_docs) {
    if (!fs::exists(run.selections())) {
      throw std::runtime_error("missing " + run.selections() + "; run select first");
    }
    selections = read_json_file(run.selections());
  }

  json answers = json::object(), sps = json::object();
  for (const Example& ex : data.multi_hop_dev) {
    std::vector<int> doc_indices;
    if (opt.oracle_docs) {
      doc_indices = ex.gold_doc_indices();
    } else {
      if (!selections.contains(ex.id)) {
        throw std::runtime_error("selections.json has no entry for question " + ex.id +
                                 "; run select on the same data first");
      }
      const json& sel = selections.at(ex.id);
      const int p1 = ex.doc_index(sel.at("p1").get<std::string>());
      const int p2 = ex.doc_index(sel.at("p2").get<std::string>());
      if (p1 < 0 || p2 < 0) {
        throw std::runtime_error("selected titles not found in question " + ex.id);
      }
      doc_indices = {p1, p2};
    }
    ReaderInput in =
        build_reader_input(tok, ex, doc_indices, cfg.encoder.max_seq_len, false);
    ReaderOutput out = reader.predict(in);
    answers[ex.id] = decode_answer(out, in, cfg.max_answer_len);
    json sp = json::array();
    for (const SupportingFact& sf :
         decode_supporting_facts(out, in, cfg.support_threshold)) {
      sp.push_back({sf.title, sf.sent_id});
    }
    sps[ex.id] = sp;
  }
  write_json_file(run.predictions(), json{{"answer", answers}, {"sp", sps}});
  std::cout << "wrote " << run.predictions() << "\n";
  return 0;
}

int cmd_eval(const CliOptions& opt) {
  if (opt.pred_path.empty() || opt.gold_path.empty()) {
    throw std::runtime_error("eval needs --pred and --gold");
  }
  MetricReport report = evaluate_files(opt.pred_path, opt.gold_path);
  std::cout << report.to_table() << report.to_json().dump(1) << "\n";
  return 0;
}

int cmd_pipeline(const CliOptions& opt) {
  PipelineConfig cfg = effective_config(opt);
  DataBundle data = resolve_data(cfg);
  RunPaths run = prepare_run_dir(cfg, opt.out_dir);
  Tokenizer tok = load_or_build_tokenizer(run, data);
  std::ofstream log(run.train_log(), std::ios::app);
  TrainLogger logger(&log);
  const EncoderConfig ec = encoder_config_for(cfg, tok);

  std::cout << "[1/5] training stage-1 selector\n" << std::flush;
  RelevanceModel stage1 = train_selector_stage1(data.multi_hop_train, data.multi_hop_dev,
                                                tok, ec, cfg.selector_train, &logger);
  stage1.save(run.selector_stage1());

  std::cout << "[2/5] training stage-2 selector\n" << std::flush;
  RelevanceModel stage2 =
      train_selector_stage2(stage1, data.multi_hop_train, data.multi_hop_dev, tok, ec,
                            cfg.selector_train, &logger);
  stage2.save(run.selector_stage2());

  std::cout << "[3/5] selecting documents on dev\n" << std::flush;
  Selector selector(stage1, stage2, tok);
  std::vector<SelectionResult> results;
  double sel_em = 0.0, sel_f1 = 0.0;
  for (const Example& ex : data.multi_hop_dev) {
    results.push_back(selector.select(ex));
    std::set<std::string> pred = {ex.documents[results.back().p1_index].title,
                                  ex.documents[results.back().p2_index].title};
    std::set<std::string> gold;
    for (const SupportingFact& sf : ex.supporting_facts) gold.insert(sf.title);
    auto [e, f] = doc_em_f1(pred, gold);
    sel_em += e;
    sel_f1 += f;
  }
  if (!data.multi_hop_dev.empty()) {
    sel_em /= static_cast<double>(data.multi_hop_dev.size());
    sel_f1 /= static_cast<double>(data.multi_hop_dev.size());
  }
  write_json_file(run.selections(), selections_to_json(data.multi_hop_dev, results));

  std::cout << "[4/5] training reader ("
            << curriculum_to_string(cfg.reader_train.curriculum) << ")\n"
            << std::flush;
  ReaderModel reader =
      train_reader(data.single_hop_train, data.multi_hop_train, data.multi_hop_dev, tok,
                   reader_config_for(cfg, tok), cfg.reader_train, &logger);
  reader.save(run.reader());

  std::cout << "[5/5] answering on selected documents\n" << std::flush;
  json answers = json::object(), sps = json::object();
  for (std::size_t i = 0; i < data.multi_hop_dev.size(); ++i) {
    const Example& ex = data.multi_hop_dev[i];
    ReaderInput in = build_reader_input(
        tok, ex, {results[i].p1_index, results[i].p2_index}, ec.max_seq_len, false);
    ReaderOutput out = reader.predict(in);
    answers[ex.id] = decode_answer(out, in, cfg.max_answer_len);
    json sp = json::array();
    for (const SupportingFact& sf :
         decode_supporting_facts(out, in, cfg.support_threshold)) {
      sp.push_back({sf.title, sf.sent_id});
    }
    sps[ex.id] = sp;
  }
  json predictions{{"answer", answers}, {"sp", sps}};
  write_json_file(run.predictions(), predictions);

  MetricReport report = evaluate(predictions, data.multi_hop_dev);
  // Document metrics reflect the selector, not titles cited in predicted sp.
  report.doc_em = sel_em;
  report.doc_f1 = sel_f1;
  write_json_file(run.metrics(), report.to_json());
  std::cout << report.to_table();
  return 0;
}

}  // namespace

int cli_run(std::vector<std::string> args) {
  CLI::App app{"two-stage document selection + multi-task reading pipeline"};
  app.require_subcommand(1);
  CliOptions opt;

  auto add_common = [&opt](CLI::App* sub, bool with_out = true) {
    sub->add_option("--config", opt.config_path, "JSON config file");
    sub->add_option("--seed", opt.seed, "override the config seed");
    if (with_out) sub->add_option("--out", opt.out_dir, "run directory");
  };

  CLI::App* gen = app.add_subcommand("gen-data", "generate the synthetic corpus");
  add_common(gen);
  gen->add_option("--count", opt.count, "override all four example counts");

  CLI::App* ts = app.add_subcommand("train-selector", "train one selection stage");
  add_common(ts);
  ts->add_option("--stage", opt.stage, "selection stage (1 or 2)")->check(CLI::Range(1, 2));

  CLI::App* tr = app.add_subcommand("train-reader", "train the reader");
  add_common(tr);
  tr->add_option("--curriculum", opt.curriculum,
                 "shd_then_mhd | mhd_only | shd_plus_mhd | shd_then_mixed");

  CLI::App* sel = app.add_subcommand("select", "run two-stage selection on dev data");
  add_common(sel);

  CLI::App* ans = app.add_subcommand("answer", "extract answers and supporting facts");
  add_common(ans);
  ans->add_flag("--oracle-docs", opt.oracle_docs, "read gold documents instead of selections");

  CLI::App* ev = app.add_subcommand("eval", "score a prediction file");
  ev->add_option("--pred", opt.pred_path, "prediction JSON")->required();
  ev->add_option("--gold", opt.gold_path, "gold dataset JSON")->required();

  CLI::App* pipe = app.add_subcommand("pipeline", "run selection, reading and evaluation");
  add_common(pipe);
  pipe->add_option("--curriculum", opt.curriculum,
                   "shd_then_mhd | mhd_only | shd_plus_mhd | shd_then_mixed");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gen->parsed()) return cmd_gen_data(opt);
    if (ts->parsed()) return cmd_train_selector(opt);
    if (tr->parsed()) return cmd_train_reader(opt);
    if (sel->parsed()) return cmd_select(opt);
    if (ans->parsed()) return cmd_answer(opt);
    if (ev->parsed()) return cmd_eval(opt);
    if (pipe->parsed()) return cmd_pipeline(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace hopqa
