#include "hopqa/synthetic.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "hopqa/rng.hpp"
#include "hopqa/tokenizer.hpp"

namespace hopqa {

namespace {

const std::vector<std::string> kFirstNames = {
    "Alice", "Boris", "Clara",   "Derek", "Elena", "Farid",  "Greta", "Hugo",
    "Irene", "Jonas", "Katya",   "Liam",  "Mira",  "Nadia",  "Oscar", "Priya",
    "Rosa",  "Sten",  "Tara",    "Ulrich", "Vera",  "Wanda",  "Yusuf", "Zelda"};
const std::vector<std::string> kLastNames = {
    "Almeida", "Brandt",  "Castillo", "Dupont", "Eriksen", "Fontaine",
    "Garland", "Hoffman", "Ibarra",   "Jansen", "Keller",  "Lindqvist",
    "Moreau",  "Novak",   "Okafor",   "Petrov", "Quiroga", "Rossi",
    "Sandoval", "Ueda",   "Vasquez",  "Winters", "Yamada",  "Zhang"};
const std::vector<std::string> kWorkAdjectives = {
    "Silent",  "Crimson",  "Endless",   "Hollow",   "Gilded",   "Frozen",
    "Wandering", "Burning", "Forgotten", "Midnight", "Emerald",  "Velvet",
    "Shattered", "Quiet",  "Amber",     "Distant"};
const std::vector<std::string> kWorkNouns = {
    "River",   "Lantern", "Harvest",     "Compass",   "Orchard", "Citadel",
    "Meadow",  "Archive", "Voyage",      "Garden",    "Mirror",  "Causeway",
    "Observatory", "Labyrinth", "Sonata", "Atlas"};
const std::vector<std::string> kCities = {
    "Montreux", "Fargo",   "Tbilisi",  "Osaka",   "Porto",  "Salzburg",
    "Cusco",    "Tromso",  "Valletta", "Adelaide", "Leipzig", "Galway",
    "Zanzibar", "Havana",  "Bergen",   "Sapporo", "Krakow", "Dakar",
    "Riga",     "Medellin"};
const std::vector<std::string> kFields = {
    "astronomy",   "linguistics", "volcanology",  "cartography",
    "mycology",    "paleontology", "acoustics",   "meteorology",
    "archaeology", "botany",      "seismology",   "oceanography",
    "cryptography", "ornithology", "geometry",    "toxicology"};

struct World {
  struct Person {
    std::string name;
    int city = 0, study = 0, born = 0;
  };
  struct Work {
    std::string title;
    int author = 0, field = 0;
  };
  std::vector<Person> people;
  std::vector<Work> works;
  std::vector<std::string> cities, fields;
  std::vector<std::vector<int>> author_works;

  Document work_doc(int wi) const {
    const Work& w = works[wi];
    const std::string& a = people[w.author].name;
    return {w.title,
            {w.title + " was written by " + a + ".",
             w.title + " is about " + fields[w.field] + "."}};
  }

  Document person_doc(int pi) const {
    const Person& p = people[pi];
    return {p.name,
            {p.name + " works in " + cities[p.city] + ".",
             p.name + " studies " + fields[p.study] + ".",
             p.name + " was born in " + cities[p.born] + "."}};
  }
};

World build_world(const SyntheticConfig& cfg, Rng& rng) {
  if (cfg.num_people < 2 || cfg.num_works < 2) {
    throw std::invalid_argument("synthetic config needs at least 2 people and 2 works");
  }
  if (cfg.num_people > static_cast<int>(kFirstNames.size() * kLastNames.size()) ||
      cfg.num_works > static_cast<int>(kWorkAdjectives.size() * kWorkNouns.size()) ||
      cfg.num_cities > static_cast<int>(kCities.size()) || cfg.num_cities < 1 ||
      cfg.num_fields > static_cast<int>(kFields.size()) || cfg.num_fields < 1) {
    throw std::invalid_argument("synthetic config exceeds the available name pools");
  }

  World w;
  w.cities.assign(kCities.begin(), kCities.begin() + cfg.num_cities);
  w.fields.assign(kFields.begin(), kFields.begin() + cfg.num_fields);

  std::vector<std::pair<int, int>> name_pairs;
  for (std::size_t i = 0; i < kFirstNames.size(); ++i)
    for (std::size_t j = 0; j < kLastNames.size(); ++j)
      name_pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
  rng.shuffle(name_pairs);
  for (int i = 0; i < cfg.num_people; ++i) {
    World::Person p;
    p.name = kFirstNames[name_pairs[i].first] + " " + kLastNames[name_pairs[i].second];
    p.city = rng.uniform_int(cfg.num_cities);
    p.study = rng.uniform_int(cfg.num_fields);
    p.born = rng.uniform_int(cfg.num_cities);
    w.people.push_back(std::move(p));
  }

  std::vector<std::pair<int, int>> title_pairs;
  for (std::size_t i = 0; i < kWorkAdjectives.size(); ++i)
    for (std::size_t j = 0; j < kWorkNouns.size(); ++j)
      title_pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
  rng.shuffle(title_pairs);
  for (int i = 0; i < cfg.num_works; ++i) {
    World::Work work;
    work.title = "The " + kWorkAdjectives[title_pairs[i].first] + " " +
                 kWorkNouns[title_pairs[i].second];
    work.author = rng.uniform_int(cfg.num_people);
    work.field = rng.uniform_int(cfg.num_fields);
    w.works.push_back(std::move(work));
  }
  // Comparison questions need two works by different authors and, when
  // possible, one author with two works.
  if (cfg.num_works >= 3) {
    w.works[1].author = w.works[0].author;
    if (w.works[2].author == w.works[0].author) {
      w.works[2].author = (w.works[0].author + 1) % cfg.num_people;
    }
  } else if (w.works[1].author == w.works[0].author) {
    w.works[1].author = (w.works[0].author + 1) % cfg.num_people;
  }

  w.author_works.assign(cfg.num_people, {});
  for (int i = 0; i < cfg.num_works; ++i) w.author_works[w.works[i].author].push_back(i);
  return w;
}

struct DocRef {
  bool is_work = false;
  int index = 0;
};

std::set<std::string> token_set(const std::string& text) {
  std::set<std::string> out;
  for (const WordToken& t : word_tokenize(text)) out.insert(t.text);
  return out;
}

std::set<std::string> doc_token_set(const Document& d) {
  std::set<std::string> out;
  for (const std::string& s : d.sentences) {
    for (const WordToken& t : word_tokenize(s)) out.insert(t.text);
  }
  return out;
}

// Candidate set: gold docs plus distractors, order shuffled.
void assemble_candidates(const World& w, Rng& rng, const std::vector<DocRef>& gold,
                         const std::set<int>& excluded_works,
                         const std::set<int>& excluded_people, int num_docs,
                         Example& ex) {
  std::vector<DocRef> pool;
  for (int i = 0; i < static_cast<int>(w.works.size()); ++i) {
    if (!excluded_works.count(i)) pool.push_back({true, i});
  }
  for (int i = 0; i < static_cast<int>(w.people.size()); ++i) {
    if (!excluded_people.count(i)) pool.push_back({false, i});
  }
  const int needed = num_docs - static_cast<int>(gold.size());
  if (needed < 0 || static_cast<int>(pool.size()) < needed) {
    throw std::invalid_argument(
        "synthetic vocabulary too small to build " + std::to_string(num_docs) +
        " disjoint candidate documents");
  }
  rng.shuffle(pool);
  std::vector<DocRef> chosen = gold;
  chosen.insert(chosen.end(), pool.begin(), pool.begin() + needed);
  rng.shuffle(chosen);
  for (const DocRef& r : chosen) {
    ex.documents.push_back(r.is_work ? w.work_doc(r.index) : w.person_doc(r.index));
  }
}

Example make_single_hop(const World& w, Rng& rng, const SyntheticConfig& cfg,
                        const std::string& id_prefix, int index) {
  Example ex;
  const int kind = rng.uniform_int(5);
  std::vector<DocRef> gold;
  std::set<int> ex_works, ex_people;
  std::string tag;
  if (kind == 0) {  // who wrote
    const int wi = rng.uniform_int(static_cast<int>(w.works.size()));
    const World::Work& work = w.works[wi];
    ex.question = "Who wrote " + work.title + "?";
    ex.answer = w.people[work.author].name;
    ex.supporting_facts = {{work.title, 0}};
    gold = {{true, wi}};
    ex_works = {wi};
    tag = "whowrote";
  } else if (kind == 1) {  // what is ... about
    const int wi = rng.uniform_int(static_cast<int>(w.works.size()));
    const World::Work& work = w.works[wi];
    ex.question = "What is " + work.title + " about?";
    ex.answer = w.fields[work.field];
    ex.supporting_facts = {{work.title, 1}};
    gold = {{true, wi}};
    ex_works = {wi};
    tag = "about";
  } else if (kind == 2) {  // where does ... work
    const int pi = rng.uniform_int(static_cast<int>(w.people.size()));
    const World::Person& p = w.people[pi];
    ex.question = "Where does " + p.name + " work?";
    ex.answer = w.cities[p.city];
    ex.supporting_facts = {{p.name, 0}};
    gold = {{false, pi}};
    ex_people = {pi};
    tag = "workplace";
  } else if (kind == 3) {  // what does ... study
    const int pi = rng.uniform_int(static_cast<int>(w.people.size()));
    const World::Person& p = w.people[pi];
    ex.question = "What does " + p.name + " study?";
    ex.answer = w.fields[p.study];
    ex.supporting_facts = {{p.name, 1}};
    gold = {{false, pi}};
    ex_people = {pi};
    tag = "study";
  } else {  // where was ... born
    const int pi = rng.uniform_int(static_cast<int>(w.people.size()));
    const World::Person& p = w.people[pi];
    ex.question = "Where was " + p.name + " born?";
    ex.answer = w.cities[p.born];
    ex.supporting_facts = {{p.name, 2}};
    gold = {{false, pi}};
    ex_people = {pi};
    tag = "born";
  }
  ex.answer_type = AnswerType::Span;
  ex.id = id_prefix + "-" + std::to_string(index) + "-" + tag;
  assemble_candidates(w, rng, gold, ex_works, ex_people, cfg.num_docs, ex);
  return ex;
}

Example make_multi_hop(const World& w, Rng& rng, const SyntheticConfig& cfg,
                       const std::string& id_prefix, int index) {
  Example ex;
  const double r = rng.next_double();
  if (r < cfg.bridge_work_fraction + cfg.bridge_study_fraction) {
    const bool ask_work = r < cfg.bridge_work_fraction;
    const int wi = rng.uniform_int(static_cast<int>(w.works.size()));
    const World::Work& work = w.works[wi];
    const int pi = work.author;
    const World::Person& p = w.people[pi];
    if (ask_work) {
      ex.question = "Where does the author of " + work.title + " work?";
      ex.answer = w.cities[p.city];
      ex.supporting_facts = {{work.title, 0}, {p.name, 0}};
    } else {
      ex.question = "What does the author of " + work.title + " study?";
      ex.answer = w.fields[p.study];
      ex.supporting_facts = {{work.title, 0}, {p.name, 1}};
    }
    ex.answer_type = AnswerType::Span;
    ex.id = id_prefix + "-" + std::to_string(index) + (ask_work ? "-bridgework" : "-bridgestudy");
    // Works by the same author would leak the bridge entity to stage one.
    std::set<int> ex_works(w.author_works[pi].begin(), w.author_works[pi].end());
    ex_works.insert(wi);
    assemble_candidates(w, rng, {{true, wi}, {false, pi}}, ex_works, {pi}, cfg.num_docs, ex);
    // Construction guarantee: the bridge document shares no token with the
    // question.
    std::set<std::string> q = token_set(ex.question);
    std::set<std::string> d2 = doc_token_set(w.person_doc(pi));
    for (const std::string& t : d2) {
      if (q.count(t)) {
        throw std::logic_error("bridge document shares token '" + t + "' with question");
      }
    }
    return ex;
  }

  // Yes/no comparison.
  bool same = rng.bernoulli(0.5);
  std::vector<int> multi;
  for (int pi = 0; pi < static_cast<int>(w.people.size()); ++pi) {
    if (w.author_works[pi].size() >= 2) multi.push_back(pi);
  }
  if (multi.empty()) same = false;
  int w1 = -1, w2 = -1;
  if (same) {
    const int pi = multi[rng.uniform_int(static_cast<int>(multi.size()))];
    const auto& ws = w.author_works[pi];
    w1 = ws[rng.uniform_int(static_cast<int>(ws.size()))];
    do {
      w2 = ws[rng.uniform_int(static_cast<int>(ws.size()))];
    } while (w2 == w1);
  } else {
    w1 = rng.uniform_int(static_cast<int>(w.works.size()));
    do {
      w2 = rng.uniform_int(static_cast<int>(w.works.size()));
    } while (w.works[w2].author == w.works[w1].author);
  }
  ex.question = "Were " + w.works[w1].title + " and " + w.works[w2].title +
                " written by the same person?";
  ex.answer = same ? "yes" : "no";
  ex.answer_type = same ? AnswerType::Yes : AnswerType::No;
  ex.supporting_facts = {{w.works[w1].title, 0}, {w.works[w2].title, 0}};
  ex.id = id_prefix + "-" + std::to_string(index) + "-cmp";
  assemble_candidates(w, rng, {{true, w1}, {true, w2}}, {w1, w2}, {}, cfg.num_docs, ex);
  return ex;
}

}  // namespace

bool is_bridge_example(const Example& ex) {
  return ex.id.find("-bridge") != std::string::npos;
}

SyntheticData generate_synthetic(const SyntheticConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  World world = build_world(cfg, rng);
  SyntheticData data;
  Rng sh_train = rng.fork(1), sh_dev = rng.fork(2), mh_train = rng.fork(3),
      mh_dev = rng.fork(4);
  for (int i = 0; i < cfg.single_hop_train; ++i) {
    data.single_hop_train.push_back(make_single_hop(world, sh_train, cfg, "sh-train", i));
  }
  for (int i = 0; i < cfg.single_hop_dev; ++i) {
    data.single_hop_dev.push_back(make_single_hop(world, sh_dev, cfg, "sh-dev", i));
  }
  for (int i = 0; i < cfg.multi_hop_train; ++i) {
    data.multi_hop_train.push_back(make_multi_hop(world, mh_train, cfg, "mh-train", i));
  }
  for (int i = 0; i < cfg.multi_hop_dev; ++i) {
    data.multi_hop_dev.push_back(make_multi_hop(world, mh_dev, cfg, "mh-dev", i));
  }
  return data;
}

}  // namespace hopqa
