// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Synthetic data only, fixed seeds.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "l2srl/pipeline.hpp"
#include "l2srl/report.hpp"
#include "l2srl/util.hpp"
#include "test_support.hpp"

using namespace l2srl;
using namespace l2srl::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

bool has_overlap(const Frame& f) {
  for (std::size_t i = 0; i < f.spans.size(); ++i) {
    if (f.spans[i].covers(f.predicate_index)) return true;
    for (std::size_t j = i + 1; j < f.spans.size(); ++j)
      if (f.spans[i].overlaps(f.spans[j])) return true;
  }
  return false;
}

std::string model_text(const TaggerModel& m) {
  std::ostringstream out;
  save_model(m, out);
  return out.str();
}

std::string corpus_text(const Corpus& c) {
  std::ostringstream out;
  write_corpus(c, out);
  return out.str();
}

Corpus corpus_from(const std::string& text) {
  std::istringstream in(text);
  return read_corpus(in);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    corpus_from(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

// ---------------------------------------------------------------------------

Outcome scorer_equivalence() {
  Outcome o;
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 500; ++trial) {
    Corpus pred, gold;
    int sentences = rand_int(rng, 1, 5);
    for (int s = 0; s < sentences; ++s) {
      int n = rand_int(rng, 1, 12);
      std::vector<Frame> gf, pf;
      for (int p = 1; p <= n; ++p) {
        if (rand_int(rng, 0, 2) == 0) gf.push_back(random_frame(rng, n, p));
        if (rand_int(rng, 0, 2) == 0) pf.push_back(random_frame(rng, n, p));
      }
      std::string id = "s" + std::to_string(s);
      pred.sentences.push_back(make_sentence(id, numbered_forms(n), pf));
      gold.sentences.push_back(make_sentence(id, numbered_forms(n), gf));
    }
    Counts c = score(pred, gold).total;
    BruteCounts b = brute_force_counts(pred, gold);
    Counts expected{b.matched, b.predicted, b.gold};
    o.require(c == expected, "counts differ on trial " + std::to_string(trial));
    o.require(c.precision() == expected.precision() && c.recall() == expected.recall() && c.f1() == expected.f1(),
              "P/R/F differ on trial " + std::to_string(trial));
  }
  if (o.pass) o.detail = "500 corpora";
  return o;
}

Outcome delta_f_anchor() {
  Outcome o;
  Corpus pred, gold;
  append_counts(pred, gold, "l1-", Lang::ENG, Side::L1, 31, 42, 42);
  append_counts(pred, gold, "l2-", Lang::ENG, Side::L2, 82, 118, 119);
  ScoreReport r = score_grouped(pred, gold, GroupBy::LangSide);
  std::string l1 = pct(r.groups.at(0).scores.total.f1()), l2 = pct(r.groups.at(1).scores.total.f1());
  std::string d = r.deltas.empty() ? "?" : pct(r.deltas[0].delta());
  o.require(l1 == "73.81", "F(L1) = " + l1);
  o.require(l2 == "69.20", "F(L2) = " + l2);
  o.require(d == "-4.61", "dF = " + d);
  if (o.pass) o.detail = "F(L1)=" + l1 + " F(L2)=" + l2 + " dF=" + d;
  return o;
}

Outcome oracle_suite() {
  Outcome o;
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    int n = rand_int(rng, 2, 14);
    int p = rand_int(rng, 1, n);
    Frame g = random_frame(rng, n, p, 0.6);
    if (g.spans.empty()) g.spans.push_back(Span{p == 1 ? 2 : 1, p == 1 ? 2 : 1, A(0)});
    Frame pf = random_frame(rng, n, p, 0.6);
    Corpus gold{{make_sentence("s", numbered_forms(n), {g})}};
    Corpus pred{{make_sentence("s", numbered_forms(n), {pf})}};
    std::vector<Corpus> snaps;
    OracleAnalysis a = oracle_sequence(pred, gold, {}, &snaps);
    double prev = a.original.f1();
    for (std::size_t k = 0; k < a.stages.size(); ++k) {
      o.require(a.stages[k].f1 >= prev, "F decreased at stage " + std::string(to_string(a.stages[k].kind)));
      prev = a.stages[k].f1;
      for (const auto& f : snaps[k].sentences[0].frames) o.require(!has_overlap(f), "overlapping spans after a stage");
    }
    o.require(a.stages.size() == 7 && pct(a.stages.back().f1) == "100.00", "final F " + pct(a.stages.back().f1));
  }
  if (o.pass) o.detail = "200 frame pairs";
  return o;
}

Outcome confusion_counting() {
  Outcome o;
  // predicate at token 1; tokens 2..6 carry arguments
  //   (2,2): gold A0, pred A1       exact boundaries, label differs -> (A0, A1)
  //   (3,3) gold A1 vs (3,4) pred   overlap without boundary match  -> nothing
  //   (5,5): pred A2 only           spurious                        -> (O, A2)
  //   (6,6): gold AM only           missed                          -> (AM, O)
  Frame gold{1, {{2, 2, A(0)}, {3, 3, A(1)}, {6, 6, AM()}}};
  Frame pred{1, {{2, 2, A(1)}, {3, 4, A(1)}, {5, 5, A(2)}}};
  Corpus g{{make_sentence("c", numbered_forms(6), {gold})}};
  Corpus p{{make_sentence("c", numbered_forms(6), {pred})}};
  ConfusionMatrix m = confusion_matrix(p, g);
  std::map<std::pair<std::string, std::string>, long> expected{{{"A0", "A1"}, 1}, {{"O", "A2"}, 1}, {{"AM", "O"}, 1}};
  std::map<std::pair<std::string, std::string>, long> got;
  for (const auto& [k, v] : m.counts())
    if (v) got[k] = v;
  o.require(got == expected, "matrix differs: " + render_tsv(m));
  o.require(m.at("A1", "A1") == 0 && m.at("A1", "O") == 0, "overlap event was counted");
  if (o.pass) o.detail = "3 counted cells, overlap ignored";
  return o;
}

Outcome agreement_metric() {
  Outcome o;
  auto identity = [](int n) {
    Alignment a{"p", {}};
    for (int i = 0; i < n; ++i) a.links.insert({i, i});
    return a;
  };
  // (a)
  auto s = make_sentence("x", numbered_forms(5), {Frame{3, {{1, 2, A(0)}, {4, 5, AM("TMP")}}}}, Lang::ENG, Side::L2, "p");
  PairRecall same = recall_pair(SentencePair{s, s, identity(5)});
  o.require(same.eligible && same.l2_recall == 1.0 && same.l1_recall == 1.0, "identity pair not (1.0, 1.0)");
  // (b)
  auto l2 = make_sentence("b2", numbered_forms(3), {Frame{2, {{1, 1, A(0)}, {3, 3, A(1)}}}}, Lang::ENG, Side::L2, "p");
  auto l1 = make_sentence("b1", numbered_forms(5), {Frame{3, {{1, 1, A(0)}, {4, 4, A(1)}, {5, 5, AM()}}}}, Lang::ENG,
                          Side::L1, "p");
  PairRecall worked = recall_pair(SentencePair{l2, l1, Alignment{"p", {{1, 2}, {0, 0}, {2, 3}}}});
  o.require(worked.l2_recall == 1.0, "worked example l2_recall " + format_fixed(worked.l2_recall, 4));
  o.require(std::abs(worked.l1_recall - 0.6667) <= 0.00005, "worked example l1_recall " + format_fixed(worked.l1_recall, 4));
  // (c)
  std::mt19937_64 rng(505);
  for (int trial = 0; trial < 200; ++trial) {
    int n2 = rand_int(rng, 2, 9), n1 = rand_int(rng, 2, 9);
    auto a2 = make_sentence("r2", numbered_forms(n2), {random_frame(rng, n2, rand_int(rng, 1, n2))}, Lang::JPN, Side::L2, "r");
    auto a1 = make_sentence("r1", numbered_forms(n1), {random_frame(rng, n1, rand_int(rng, 1, n1))}, Lang::JPN, Side::L1, "r");
    Alignment fwd{"r", {}}, back{"r", {}};
    int links = rand_int(rng, 0, n2 * n1 / 2);
    for (int k = 0; k < links; ++k) {
      int i = rand_int(rng, 0, n2 - 1), j = rand_int(rng, 0, n1 - 1);
      fwd.links.insert({i, j});
      back.links.insert({j, i});
    }
    PairRecall x = recall_pair(SentencePair{a2, a1, fwd}), y = recall_pair(SentencePair{a1, a2, back});
    o.require(x.l2_recall == y.l1_recall && x.l1_recall == y.l2_recall && x.eligible == y.eligible,
              "swap asymmetry on trial " + std::to_string(trial));
  }
  // (d)
  PairRecall edge;
  edge.eligible = true;
  edge.l2_recall = 0.9;
  edge.l1_recall = 0.9;
  std::vector<PairRecall> one{edge};
  o.require(select(one, SelectionConfig{0.9}).selected.empty(), "(0.9, 0.9) selected at p=0.9");
  if (o.pass) o.detail = "l1_recall=" + format_fixed(worked.l1_recall, 4);
  return o;
}

Outcome shared_tuples_equivalence() {
  Outcome o;
  std::mt19937_64 rng(606);
  static const std::vector<RoleLabel> roles = {A(0), A(1), A(2), AM(), AM("TMP")};
  for (int trial = 0; trial < 200; ++trial) {
    int n2 = rand_int(rng, 1, 10), n1 = rand_int(rng, 1, 10);
    auto tuples = [&](int n) {
      TupleSet t;
      int count = rand_int(rng, 0, 20);
      while (static_cast<int>(t.size()) < count && static_cast<int>(t.size()) < n * n * static_cast<int>(roles.size()))
        t.insert(RoleTuple{rand_int(rng, 1, n), rand_int(rng, 1, n), roles[static_cast<std::size_t>(rand_int(rng, 0, 4))]});
      return t;
    };
    TupleSet t2 = tuples(n2), t1 = tuples(n1);
    Alignment a{"r", {}};
    int links = rand_int(rng, 0, n2 * n1);
    for (int k = 0; k < links; ++k) a.links.insert({rand_int(rng, 0, n2 - 1), rand_int(rng, 0, n1 - 1)});
    for (bool coarse : {true, false}) {
      SharedTuples fast = shared_tuples(a, t2, t1, AgreementOptions{coarse});
      SharedTuples slow = brute_force_shared(a, t2, t1, coarse);
      o.require(fast.matched_l2 == slow.matched_l2 && fast.matched_l1 == slow.matched_l1,
                "mismatch on trial " + std::to_string(trial));
    }
  }
  if (o.pass) o.detail = "200 pairs";
  return o;
}

Outcome viterbi_optimality() {
  Outcome o;
  std::mt19937_64 rng(707);
  std::vector<RoleLabel> roles{A(0), A(1), AM()};
  LabelSet ls = LabelSet::for_roles(roles);
  for (int trial = 0; trial < 100; ++trial) {
    int n = rand_int(rng, 1, 7);
    int p = rand_int(rng, 1, n);
    auto s = make_sentence("v", numbered_forms(n, "t" + std::to_string(trial % 3)));
    TaggerModel m(ls);
    for (int i = 1; i <= n; ++i)
      for (const auto& f : extract_features(s, p, i))
        for (std::size_t l = 0; l < ls.size(); ++l) m.set_emission(f, l, rand_int(rng, -4, 4));
    for (std::size_t a = 0; a < ls.size(); ++a)
      for (std::size_t b = 0; b < ls.size(); ++b) m.set_transition(a, b, rand_int(rng, -4, 4));

    std::vector<PositionTag> best = viterbi_decode(m, s, p);
    o.require(static_cast<int>(best.size()) == n, "wrong length");
    const PositionTag* prev = nullptr;
    for (int i = 0; i < n; ++i) {
      o.require(best[static_cast<std::size_t>(i)].is_rel() == (i + 1 == p), "rel not forced at the predicate");
      o.require(transition_allowed(prev, best[static_cast<std::size_t>(i)]), "grammar violation");
      prev = &best[static_cast<std::size_t>(i)];
    }
    o.require(may_end_sequence(best.back()), "open run at sentence end");
    double got = sequence_score(m, s, p, best), expected = brute_force_best_score(m, s, p);
    o.require(got == expected, "trial " + std::to_string(trial) + ": decoded " + format_shortest(got) + " vs max " +
                                   format_shortest(expected));
  }
  if (o.pass) o.detail = "100 models";
  return o;
}

Outcome tagger_convergence() {
  Outcome o;
  Corpus toy = separable_toy_corpus(20);
  TaggerModel a = train(toy, TrainConfig{10, 1, true});
  TaggerModel b = train(toy, TrainConfig{10, 1, true});
  std::string f = pct(score(tag_corpus(a, toy), toy).total.f1());
  o.require(f == "100.00", "training-set F " + f);
  o.require(model_text(a) == model_text(b), "model files differ across runs");
  if (o.pass) o.detail = "F=" + f + ", identical model files";
  return o;
}

// Toy sentences in two templates. The L2 side differs from its correction only
// in punctuation, outside every argument, so consistent pairs align fully.
AnnotatedSentence templated(const std::string& id, int variant, const std::string& a0, const std::string& a1,
                            const std::pair<std::string, RoleLabel>& am, Side side, const std::string& pair,
                            const std::array<RoleLabel, 2>& core = {RoleLabel::core(0), RoleLabel::core(1)}) {
  if (variant == 0) {
    std::vector<std::string> forms{a0, am.first, "gives", a1};
    if (side == Side::L1) forms.push_back(".");
    return make_sentence(id, forms, {Frame{3, {{1, 1, core[0]}, {2, 2, am.second}, {4, 4, core[1]}}}}, Lang::ENG, side,
                         pair);
  }
  std::vector<std::string> forms{a0, "gives", "the", a1, am.first};
  if (side == Side::L2) forms.push_back("!");
  return make_sentence(id, forms, {Frame{2, {{1, 1, core[0]}, {3, 4, core[1]}, {5, 5, am.second}}}}, Lang::ENG, side,
                       pair);
}

void save(const fs::path& path, const Corpus& c) {
  std::ofstream out(path, std::ios::binary);
  write_corpus(c, out);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome retraining_loop() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("l2srl_acceptance_" + std::to_string(std::random_device{}()));
  fs::remove_all(dir);
  fs::create_directories(dir);

  const std::vector<std::string> a0s{"carol", "dave", "erin"}, a1s{"pear", "pen", "lamp"};
  const std::vector<std::pair<std::string, RoleLabel>> ams{{"tonight", AM("TMP")}, {"outside", AM("LOC")}};
  std::mt19937_64 rng(909);
  auto pick = [&](const auto& v) { return v[static_cast<std::size_t>(rand_int(rng, 0, static_cast<int>(v.size()) - 1))]; };

  Corpus pool_l2, pool_l1, test_l2, test_l1;
  for (int i = 0; i < 200; ++i) {
    std::string pid = "pool" + std::to_string(i);
    int variant = i % 2;
    std::string a0 = pick(a0s), a1 = pick(a1s);
    auto am = pick(ams);
    pool_l1.sentences.push_back(templated(pid + "-L1", variant, a0, a1, am, Side::L1, pid));
    // first 50 pairs agree with gold; the rest swap the core roles on the L2 side
    std::array<RoleLabel, 2> core = i < 50 ? std::array<RoleLabel, 2>{A(0), A(1)} : std::array<RoleLabel, 2>{A(1), A(0)};
    pool_l2.sentences.push_back(templated(pid + "-L2", variant, a0, a1, am, Side::L2, pid, core));
  }
  for (int i = 0; i < 30; ++i) {
    std::string a0 = pick(a0s), a1 = pick(a1s);
    auto am = pick(ams);
    test_l2.sentences.push_back(templated("t" + std::to_string(i) + "-L2", i % 2, a0, a1, am, Side::L2, "t" + std::to_string(i)));
    test_l1.sentences.push_back(templated("t" + std::to_string(i) + "-L1", i % 2, a0, a1, am, Side::L1, "t" + std::to_string(i)));
  }
  save(dir / "train.conll", separable_toy_corpus(20));
  save(dir / "pool_l2.conll", pool_l2);
  save(dir / "pool_l1.conll", pool_l1);
  save(dir / "test_l2.conll", test_l2);
  save(dir / "test_l1.conll", test_l1);

  PipelineConfig c;
  c.train_path = (dir / "train.conll").string();
  c.pool_l2_path = (dir / "pool_l2.conll").string();
  c.pool_l1_path = (dir / "pool_l1.conll").string();
  c.test_l2_path = (dir / "test_l2.conll").string();
  c.test_l1_path = (dir / "test_l1.conll").string();
  c.pool_annotated = true;
  c.report_dir = (dir / "run").string();
  RetrainReport r = run_retrain(c);
  o.require(r.pool_size == 200, "pool size " + std::to_string(r.pool_size));
  o.require(r.selected == 50, "selected " + std::to_string(r.selected));
  std::string detail;
  for (const auto& s : r.splits) {
    double before = s.baseline.total.f1(), after = s.retrained.total.f1();
    o.require(after >= before, s.split + " retrained F " + pct(after) + " < baseline " + pct(before));
    detail += s.split + " " + pct(before) + "->" + pct(after) + " ";
  }

  c.p = 1.0;
  c.report_dir = (dir / "empty").string();
  RetrainReport none = run_retrain(c);
  o.require(none.selected == 0, "p=1.0 selected pairs");
  o.require(none.models_identical, "empty selection changed the model");
  o.require(slurp(dir / "empty" / "01_baseline" / "model.txt") == slurp(dir / "empty" / "05_retrained" / "model.txt"),
            "model files differ byte-wise");
  o.require(slurp(dir / "empty" / "01_baseline" / "model.txt") == slurp(dir / "run" / "01_baseline" / "model.txt"),
            "baseline not reproducible across runs");
  fs::remove_all(dir);
  if (o.pass) o.detail = detail + "selected 50/200";
  return o;
}

Outcome io_round_trips() {
  Outcome o;
  // corpus
  const std::string canonical =
      "# id = s1\n# lang = JPN\n# side = L2\n# pair = p1\n"
      "1\t私\t_\tS-A0\tO\n2\tは\t_\tO\tO\n3\t食べた\tY\trel\tS-A1\n4\tあと\t_\tB-AM-TMP\tO\n5\t寝た\tY\tE-AM-TMP\trel\n\n"
      "# id = s2\n1\tgo\tY\trel\n\n";
  Corpus c = corpus_from(canonical);
  o.require(corpus_text(c) == canonical, "corpus write(read(x)) != x");
  o.require(corpus_from(corpus_text(c)) == c, "corpus read(write(v)) != v");
  std::mt19937_64 rng(1010);
  Corpus random;
  for (int k = 0; k < 50; ++k) {
    int n = rand_int(rng, 1, 10);
    std::vector<Frame> frames;
    for (int p = 1; p <= n; ++p)
      if (rand_int(rng, 0, 3) == 0) frames.push_back(random_frame(rng, n, p));
    random.sentences.push_back(make_sentence("r" + std::to_string(k), numbered_forms(n), frames, Lang::RUS, Side::L1, "q"));
  }
  o.require(corpus_from(corpus_text(random)) == random, "random corpus round trip");

  // alignments
  const std::string links = "p1\t0-0 0-1 2-3\np2\t\n";
  std::istringstream lin(links);
  AlignmentTable t = read_alignments(lin);
  std::ostringstream lout;
  write_alignments(t, lout);
  o.require(lout.str() == links, "alignment write(read(x)) != x");

  // model
  TaggerModel m = train(separable_toy_corpus(20));
  std::string mt = model_text(m);
  std::istringstream min(mt);
  TaggerModel back = load_model(min);
  o.require(model_text(back) == mt, "model write(read(x)) != x");
  for (const auto& s : separable_toy_corpus(20).sentences)
    o.require(viterbi_decode(back, s, s.frames[0].predicate_index) == viterbi_decode(m, s, s.frames[0].predicate_index),
              "reloaded model decodes differently");

  // rejections
  std::string crlf = canonical;
  crlf.insert(crlf.find("\n2\tは"), "\r");
  o.require(parse_error_line(crlf) == 5, "CRLF not rejected at line 5");
  std::string bad_tag = canonical;
  bad_tag.replace(bad_tag.find("S-A1"), 4, "S-Q9");
  o.require(parse_error_line(bad_tag) == 7, "malformed tag not rejected at line 7");
  std::string bad_run = canonical;
  bad_run.replace(bad_run.find("E-AM-TMP"), 8, "O");
  o.require(parse_error_line(bad_run) != 0, "unterminated run accepted");
  if (o.pass) o.detail = "corpus, alignment, model";
  return o;
}

Outcome split_sizes() {
  Outcome o;
  std::vector<SentencePair> pairs;
  for (Lang lang : {Lang::ENG, Lang::JPN, Lang::RUS, Lang::ARA})
    for (int i = 0; i < 150; ++i) {
      std::string pid = std::string(to_string(lang)) + std::to_string(i);
      pairs.push_back({make_sentence(pid + "-L2", {"x"}, {}, lang, Side::L2, pid),
                       make_sentence(pid + "-L1", {"x"}, {}, lang, Side::L1, pid), Alignment{pid, {{0, 0}}}});
    }
  DatasetSplit s = split_dataset(pairs, SplitSpec{50}, 1);
  o.require(s.dev.size() == 200, "dev " + std::to_string(s.dev.size()));
  o.require(s.test_l2.size() == 400, "test_l2 " + std::to_string(s.test_l2.size()));
  o.require(s.test_l1.size() == 400, "test_l1 " + std::to_string(s.test_l1.size()));
  if (o.pass) o.detail = "200 / 400 / 400";
  return o;
}

struct Criterion {
  int number;
  const char* name;
  double budget_s;  // 0 = no runtime bound
  Outcome (*run)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "scorer oracle equivalence", 10, scorer_equivalence},
      {2, "delta-F arithmetic anchor", 0, delta_f_anchor},
      {3, "oracle transformation suite", 10, oracle_suite},
      {4, "confusion-matrix counting", 0, confusion_counting},
      {5, "agreement metric", 0, agreement_metric},
      {6, "shared tuples brute-force equivalence", 0, shared_tuples_equivalence},
      {7, "viterbi optimality", 30, viterbi_optimality},
      {8, "tagger convergence", 0, tagger_convergence},
      {9, "retraining loop", 60, retraining_loop},
      {10, "io round trips", 0, io_round_trips},
      {11, "split sizes", 0, split_sizes},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && seconds >= c.budget_s) {
      o.pass = false;
      o.detail += " (over the " + format_shortest(c.budget_s) + " s budget)";
    }
    std::printf("%s  [%2d] %-40s %7.3fs  %s\n", o.pass ? "PASS" : "FAIL", c.number, c.name, seconds, o.detail.c_str());
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
