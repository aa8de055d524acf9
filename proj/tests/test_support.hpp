// Fixtures, random generators and brute-force oracles shared by the unit and
// acceptance suites. Nothing here calls into the code path it is used to check.
#ifndef L2SRL_TESTS_TEST_SUPPORT_HPP_
#define L2SRL_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "l2srl/agreement_filter.hpp"
#include "l2srl/corpus_io.hpp"
#include "l2srl/srl_eval.hpp"
#include "l2srl/srl_tagger.hpp"

namespace l2srl::testing {

inline RoleLabel A(int n) { return RoleLabel::core(n); }
inline RoleLabel AM(std::string sub = {}) { return RoleLabel::adjunct(std::move(sub)); }

inline AnnotatedSentence make_sentence(const std::string& id, const std::vector<std::string>& forms,
                                       std::vector<Frame> frames = {}, std::optional<Lang> lang = std::nullopt,
                                       std::optional<Side> side = std::nullopt, std::string pair_id = {}) {
  AnnotatedSentence s;
  s.id = id;
  s.lang = lang;
  s.side = side;
  s.pair_id = std::move(pair_id);
  for (std::size_t i = 0; i < forms.size(); ++i) s.tokens.push_back(Token{static_cast<int>(i) + 1, forms[i]});
  for (auto& f : frames) f.sort_spans();
  std::sort(frames.begin(), frames.end(), [](const Frame& a, const Frame& b) { return a.predicate_index < b.predicate_index; });
  s.frames = std::move(frames);
  return s;
}

inline std::vector<std::string> numbered_forms(int n, const std::string& prefix = "w") {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline int rand_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline RoleLabel random_label(std::mt19937_64& rng) {
  static const std::vector<RoleLabel> pool = {A(0), A(1), A(2), A(3), A(4), AM(), AM("TMP"), AM("LOC")};
  return pool[static_cast<std::size_t>(rand_int(rng, 0, static_cast<int>(pool.size()) - 1))];
}

// Valid frame: non-overlapping spans of length 1..4 that avoid the predicate.
inline Frame random_frame(std::mt19937_64& rng, int length, int predicate, double density = 0.5,
                          const std::function<RoleLabel(std::mt19937_64&)>& label = random_label) {
  Frame f;
  f.predicate_index = predicate;
  int i = 1;
  while (i <= length) {
    if (i == predicate || std::uniform_real_distribution<double>(0, 1)(rng) > density) {
      ++i;
      continue;
    }
    int max_end = i;
    while (max_end + 1 <= length && max_end + 1 != predicate && max_end + 1 - i < 4) ++max_end;
    int end = rand_int(rng, i, max_end);
    f.spans.push_back(Span{i, end, label(rng)});
    i = end + 1;
  }
  return f;
}

// Independent scorer oracle: flatten every span into (sentence, predicate,
// start, end, label) triples and count exact coincidences pairwise.
struct BruteCounts {
  long matched = 0, predicted = 0, gold = 0;
};

inline BruteCounts brute_force_counts(const Corpus& pred, const Corpus& gold, bool am_coarse = false) {
  using Triple = std::tuple<std::string, int, int, int, std::string>;
  auto flatten = [&](const Corpus& c) {
    std::vector<Triple> out;
    for (const auto& s : c.sentences)
      for (const auto& f : s.frames)
        for (const auto& sp : f.spans)
          out.emplace_back(s.id, f.predicate_index, sp.start, sp.end, am_coarse ? sp.label.coarse().str() : sp.label.str());
    return out;
  };
  auto p = flatten(pred), g = flatten(gold);
  BruteCounts c;
  c.predicted = static_cast<long>(p.size());
  c.gold = static_cast<long>(g.size());
  std::vector<bool> used(g.size(), false);
  for (const auto& t : p) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (!used[j] && g[j] == t) {
        used[j] = true;
        ++c.matched;
        break;
      }
    }
  }
  return c;
}

// Independent shared-tuple oracle: double loop over all tuple pairs.
inline SharedTuples brute_force_shared(const Alignment& a, const TupleSet& l2, const TupleSet& l1, bool am_coarse = true) {
  SharedTuples out;
  auto linked = [&](int i, int j) { return a.links.count({i, j}) > 0; };
  for (const auto& t2 : l2)
    for (const auto& t1 : l1) {
      bool same_role = am_coarse ? t2.role.coarse() == t1.role.coarse() : t2.role == t1.role;
      if (same_role && linked(t2.predicate - 1, t1.predicate - 1) && linked(t2.argument - 1, t1.argument - 1)) {
        out.matched_l2.insert(t2);
        out.matched_l1.insert(t1);
      }
    }
  return out;
}

// Every tag sequence over `labels` accepted by the S/B/I/E grammar with rel
// exactly at `predicate` (1-based).
inline std::vector<std::vector<PositionTag>> enumerate_valid_sequences(const LabelSet& labels, int length, int predicate) {
  using K = PositionTag::Kind;
  std::vector<std::vector<PositionTag>> out;
  std::vector<PositionTag> cur;
  std::function<void(int)> rec = [&](int pos) {
    if (pos > length) {
      if (cur.back().kind() != K::B && cur.back().kind() != K::I) out.push_back(cur);
      return;
    }
    for (const auto& t : labels.tags()) {
      if ((pos == predicate) != t.is_rel()) continue;
      if (cur.empty()) {
        if (t.kind() == K::I || t.kind() == K::E) continue;
      } else {
        const auto& prev = cur.back();
        bool in_run = prev.kind() == K::B || prev.kind() == K::I;
        if (in_run && !((t.kind() == K::I || t.kind() == K::E) && t.label() == prev.label())) continue;
        if (!in_run && (t.kind() == K::I || t.kind() == K::E)) continue;
      }
      cur.push_back(t);
      rec(pos + 1);
      cur.pop_back();
    }
  };
  rec(1);
  return out;
}

// Exhaustive maximum of the model score over grammar-valid sequences, by
// depth-first search with a precomputed per-position emission table. Scores
// follow the model definition directly: emissions plus label-bigram
// transitions, no start or end terms.
inline double brute_force_best_score(const TaggerModel& model, const AnnotatedSentence& s, int predicate) {
  using K = PositionTag::Kind;
  const LabelSet& ls = model.labels();
  const int n = s.length();
  std::vector<std::vector<double>> emit(static_cast<std::size_t>(n), std::vector<double>(ls.size(), 0.0));
  for (int i = 1; i <= n; ++i)
    for (const auto& f : extract_features(s, predicate, i))
      for (std::size_t l = 0; l < ls.size(); ++l) emit[static_cast<std::size_t>(i - 1)][l] += model.emission(f, l);
  double best = -1e300;
  std::vector<std::size_t> cur;
  std::function<void(int, double)> rec = [&](int pos, double acc) {
    if (pos > n) {
      K last = ls[cur.back()].kind();
      if (last != K::B && last != K::I) best = std::max(best, acc);
      return;
    }
    for (std::size_t l = 0; l < ls.size(); ++l) {
      const PositionTag& t = ls[l];
      if ((pos == predicate) != t.is_rel()) continue;
      double step = emit[static_cast<std::size_t>(pos - 1)][l];
      if (cur.empty()) {
        if (t.kind() == K::I || t.kind() == K::E) continue;
      } else {
        const PositionTag& prev = ls[cur.back()];
        bool in_run = prev.kind() == K::B || prev.kind() == K::I;
        bool continues = t.kind() == K::I || t.kind() == K::E;
        if (in_run != continues) continue;
        if (in_run && t.label() != prev.label()) continue;
        step += model.transition(cur.back(), l);
      }
      cur.push_back(l);
      rec(pos + 1, acc + step);
      cur.pop_back();
    }
  };
  rec(1, 0.0);
  return best;
}

// Separable toy corpus: each role is cued by its own filler word that never
// appears elsewhere, and every sentence shares one predicate word.
inline Corpus separable_toy_corpus(int sentences = 20) {
  Corpus c;
  const std::vector<std::pair<std::string, RoleLabel>> fillers = {
      {"alice", A(0)}, {"bob", A(0)}, {"apple", A(1)}, {"book", A(1)}, {"today", AM("TMP")}, {"home", AM("LOC")}};
  std::mt19937_64 rng(7);
  for (int k = 0; k < sentences; ++k) {
    // template: [A0] [AM] gives [A1] ; predicate at position 3 or 2
    const auto& a0 = fillers[static_cast<std::size_t>(rand_int(rng, 0, 1))];
    const auto& a1 = fillers[static_cast<std::size_t>(rand_int(rng, 2, 3))];
    const auto& am = fillers[static_cast<std::size_t>(rand_int(rng, 4, 5))];
    std::vector<std::string> forms;
    Frame f;
    if (k % 2 == 0) {
      forms = {a0.first, am.first, "gives", a1.first, "."};
      f = Frame{3, {Span{1, 1, a0.second}, Span{2, 2, am.second}, Span{4, 4, a1.second}}};
    } else {
      forms = {a0.first, "gives", "the", a1.first, am.first};
      f = Frame{2, {Span{1, 1, a0.second}, Span{3, 4, a1.second}, Span{5, 5, am.second}}};
    }
    c.sentences.push_back(make_sentence("toy" + std::to_string(k), forms, {f}, Lang::ENG, Side::L1, "tp" + std::to_string(k)));
  }
  return c;
}

// Pred/gold sentences realising exact micro counts (matched, predicted, gold):
// one 3-token sentence per unit with the predicate at token 1.
inline void append_counts(Corpus& pred, Corpus& gold, const std::string& prefix, Lang lang, Side side, long matched,
                          long predicted, long gold_n) {
  long spurious = predicted - matched, missed = gold_n - matched;
  long k = 0;
  auto add = [&](std::vector<Span> p, std::vector<Span> g) {
    std::string id = prefix + std::to_string(k++);
    pred.sentences.push_back(make_sentence(id, {"p", "x", "y"}, {Frame{1, std::move(p)}}, lang, side, id));
    gold.sentences.push_back(make_sentence(id, {"p", "x", "y"}, {Frame{1, std::move(g)}}, lang, side, id));
  };
  for (long i = 0; i < matched; ++i) add({{2, 2, A(0)}}, {{2, 2, A(0)}});
  for (long i = 0; i < std::max(spurious, missed); ++i) {
    std::vector<Span> p, g;
    if (i < spurious) p.push_back({3, 3, A(1)});
    if (i < missed) g.push_back({2, 2, A(0)});
    add(p, g);
  }
}

}  // namespace l2srl::testing

#endif  // L2SRL_TESTS_TEST_SUPPORT_HPP_
