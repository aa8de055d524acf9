#include "l2srl/srl_eval.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace l2srl {

std::string scoring_label(const RoleLabel& label, const ScoreOptions& options) {
  return options.am_coarse ? label.coarse().str() : label.str();
}

void RoleBreakdown::add_span(const RoleLabel& label, const std::string& key, const Counts& delta) {
  total += delta;
  if (label.is_core()) core += delta;
  if (label.is_adjunct()) adjunct += delta;
  per_role[key] += delta;
}

RoleBreakdown& RoleBreakdown::operator+=(const RoleBreakdown& o) {
  total += o.total;
  core += o.core;
  adjunct += o.adjunct;
  for (const auto& [k, c] : o.per_role) per_role[k] += c;
  return *this;
}

namespace {

bool span_matches(const Span& a, const Span& b, const ScoreOptions& options) {
  return a.same_extent(b) && labels_equal(a.label, b.label, options.am_coarse);
}

bool contains_match(const std::vector<Span>& spans, const Span& s, const ScoreOptions& options) {
  return std::any_of(spans.begin(), spans.end(), [&](const Span& g) { return span_matches(s, g, options); });
}

// Pred sentences indexed by id, after checking both corpora describe the same
// sentences with the same token counts.
std::unordered_map<std::string, const AnnotatedSentence*> align_corpora(const Corpus& pred, const Corpus& gold) {
  std::unordered_map<std::string, const AnnotatedSentence*> by_id;
  for (const auto& s : pred.sentences) by_id.emplace(s.id, &s);
  if (pred.sentences.size() != gold.sentences.size())
    throw MismatchedCorpora("predicted corpus has " + std::to_string(pred.sentences.size()) + " sentences, gold has " +
                            std::to_string(gold.sentences.size()));
  for (const auto& g : gold.sentences) {
    auto it = by_id.find(g.id);
    if (it == by_id.end()) throw MismatchedCorpora("sentence '" + g.id + "' missing from predicted corpus");
    if (it->second->length() != g.length())
      throw MismatchedCorpora("sentence '" + g.id + "' has " + std::to_string(it->second->length()) +
                              " predicted tokens but " + std::to_string(g.length()) + " gold tokens");
  }
  return by_id;
}

RoleBreakdown score_sentence(const AnnotatedSentence& pred, const AnnotatedSentence& gold, const ScoreOptions& options) {
  RoleBreakdown out;
  for (const auto& g : gold.frames) out += score_frame(pred.find_frame(g.predicate_index), &g, options);
  for (const auto& p : pred.frames)
    if (!gold.find_frame(p.predicate_index)) out += score_frame(&p, nullptr, options);
  return out;
}

}  // namespace

RoleBreakdown score_frame(const Frame* pred, const Frame* gold, const ScoreOptions& options) {
  static const std::vector<Span> kEmpty;
  const auto& p = pred ? pred->spans : kEmpty;
  const auto& g = gold ? gold->spans : kEmpty;
  RoleBreakdown out;
  // Spans within a frame never overlap, so each gold span can match at most
  // one predicted span.
  for (const auto& s : p) {
    Counts c{0, 1, 0};
    if (contains_match(g, s, options)) c.matched = 1;
    out.add_span(s.label, scoring_label(s.label, options), c);
  }
  for (const auto& s : g) out.add_span(s.label, scoring_label(s.label, options), Counts{0, 0, 1});
  return out;
}

ScoreReport score(const Corpus& pred, const Corpus& gold, const ScoreOptions& options) {
  auto by_id = align_corpora(pred, gold);
  ScoreReport report;
  for (const auto& g : gold.sentences) report += score_sentence(*by_id.at(g.id), g, options);
  return report;
}

ScoreReport score_grouped(const Corpus& pred, const Corpus& gold, GroupBy group_by, const ScoreOptions& options) {
  auto by_id = align_corpora(pred, gold);
  const bool need_lang = group_by != GroupBy::Side;
  const bool need_side = group_by != GroupBy::Lang;

  // (lang, side) ordering: language enum order, L1 before L2.
  std::map<std::pair<int, int>, ScoreReport::Group> groups;
  ScoreReport report;
  for (const auto& g : gold.sentences) {
    if (need_lang && !g.lang) throw MissingMetadata("sentence '" + g.id + "' has no language");
    if (need_side && !g.side) throw MissingMetadata("sentence '" + g.id + "' has no side");
    int lang_key = need_lang ? static_cast<int>(*g.lang) : -1;
    int side_key = need_side ? (*g.side == Side::L1 ? 0 : 1) : -1;
    std::string key;
    if (need_lang) key = std::string(to_string(*g.lang));
    if (need_lang && need_side) key += "-";
    if (need_side) key += std::string(to_string(*g.side));

    RoleBreakdown s = score_sentence(*by_id.at(g.id), g, options);
    report += s;
    auto& group = groups[{lang_key, side_key}];
    group.key = key;
    group.scores += s;
  }
  for (auto& [_, group] : groups) report.groups.push_back(std::move(group));

  if (need_side) {
    std::map<int, ScoreReport::Delta> deltas;
    std::map<int, int> seen;  // bit 1 = L1 present, bit 2 = L2 present
    for (const auto& [key, group] : groups) {
      auto& d = deltas[key.first];
      d.key = need_lang ? std::string(to_string(static_cast<Lang>(key.first))) : "ALL";
      if (key.second == 0) {
        d.l1_f = group.scores.total.f1();
        seen[key.first] |= 1;
      } else {
        d.l2_f = group.scores.total.f1();
        seen[key.first] |= 2;
      }
    }
    for (auto& [k, d] : deltas)
      if (seen[k] == 3) report.deltas.push_back(d);
  }
  return report;
}

ScoreReport iaa(const Corpus& annotator_a, const Corpus& annotator_b, const ScoreOptions& options) {
  return score_grouped(annotator_a, annotator_b, GroupBy::LangSide, options);
}

long ConfusionMatrix::at(const std::string& gold, const std::string& pred) const {
  auto it = counts_.find({gold, pred});
  return it == counts_.end() ? 0 : it->second;
}

long ConfusionMatrix::total() const {
  long n = 0;
  for (const auto& [_, c] : counts_) n += c;
  return n;
}

std::vector<std::string> ConfusionMatrix::labels() const {
  std::set<std::string> all;
  for (const auto& [key, _] : counts_) {
    if (key.first != kNone) all.insert(key.first);
    if (key.second != kNone) all.insert(key.second);
  }
  std::vector<std::string> out(all.begin(), all.end());
  out.emplace_back(kNone);
  return out;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  for (const auto& [key, c] : o.counts_) counts_[key] += c;
  return *this;
}

ConfusionMatrix confusion_matrix_frame(const Frame* pred, const Frame* gold, const ScoreOptions& options) {
  static const std::vector<Span> kEmpty;
  const auto& p = pred ? pred->spans : kEmpty;
  const auto& g = gold ? gold->spans : kEmpty;
  const std::string none(ConfusionMatrix::kNone);
  ConfusionMatrix m;
  for (const auto& ps : p) {
    auto exact = std::find_if(g.begin(), g.end(), [&](const Span& gs) { return gs.same_extent(ps); });
    if (exact != g.end()) {
      m.add(scoring_label(exact->label, options), scoring_label(ps.label, options));
    } else if (std::none_of(g.begin(), g.end(), [&](const Span& gs) { return gs.overlaps(ps); })) {
      m.add(none, scoring_label(ps.label, options));
    }
  }
  for (const auto& gs : g) {
    if (std::none_of(p.begin(), p.end(), [&](const Span& ps) { return ps.overlaps(gs); }))
      m.add(scoring_label(gs.label, options), none);
  }
  return m;
}

ConfusionMatrix confusion_matrix(const Corpus& pred, const Corpus& gold, const ScoreOptions& options) {
  auto by_id = align_corpora(pred, gold);
  ConfusionMatrix m;
  for (const auto& g : gold.sentences) {
    const AnnotatedSentence& p = *by_id.at(g.id);
    for (const auto& gf : g.frames) m += confusion_matrix_frame(p.find_frame(gf.predicate_index), &gf, options);
    for (const auto& pf : p.frames)
      if (!g.find_frame(pf.predicate_index)) m += confusion_matrix_frame(&pf, nullptr, options);
  }
  return m;
}

std::string_view to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::Fix: return "Fix";
    case OracleKind::Move: return "Move";
    case OracleKind::Merge: return "Merge";
    case OracleKind::Split: return "Split";
    case OracleKind::Boundary: return "Boundary";
    case OracleKind::Drop: return "Drop";
    case OracleKind::Add: return "Add";
  }
  return "?";
}

namespace {

// Whether `candidate` can join `spans` with the entries at `ignore` removed.
bool fits(const Frame& frame, const Span& candidate, std::initializer_list<std::size_t> ignore) {
  if (candidate.covers(frame.predicate_index)) return false;
  for (std::size_t i = 0; i < frame.spans.size(); ++i) {
    if (std::find(ignore.begin(), ignore.end(), i) != ignore.end()) continue;
    if (frame.spans[i].overlaps(candidate)) return false;
  }
  return true;
}

void fix_labels(Frame& f, const Frame& gold, const ScoreOptions& options) {
  for (auto& s : f.spans) {
    if (contains_match(gold.spans, s, options)) continue;
    for (const auto& g : gold.spans)
      if (g.same_extent(s)) s.label = g.label;
  }
}

void move_core(Frame& f, const Frame& gold) {
  for (int n = 0; n <= 4; ++n) {
    const RoleLabel label = RoleLabel::core(n);
    auto count = [&](const std::vector<Span>& spans, std::size_t& where) {
      int c = 0;
      for (std::size_t i = 0; i < spans.size(); ++i)
        if (spans[i].label == label) {
          ++c;
          where = i;
        }
      return c;
    };
    std::size_t pi = 0, gi = 0;
    if (count(f.spans, pi) != 1 || count(gold.spans, gi) != 1) continue;
    const Span& target = gold.spans[gi];
    if (f.spans[pi].same_extent(target)) continue;
    if (fits(f, target, {pi})) f.spans[pi] = target;
  }
  f.sort_spans();
}

void merge_spans(Frame& f, const Frame& gold) {
  for (std::size_t i = 0; i + 1 < f.spans.size(); ++i) {
    const Span& a = f.spans[i];
    const Span& b = f.spans[i + 1];
    const int gap = b.start - a.end - 1;
    if (gap < 0 || gap > 1) continue;
    auto g = std::find_if(gold.spans.begin(), gold.spans.end(),
                          [&](const Span& gs) { return gs.start == a.start && gs.end == b.end; });
    if (g == gold.spans.end() || !fits(f, *g, {i, i + 1})) continue;
    f.spans[i] = *g;
    f.spans.erase(f.spans.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  }
}

void split_spans(Frame& f, const Frame& gold, const ScoreOptions& options) {
  std::vector<Span> out;
  for (const auto& p : f.spans) {
    if (!contains_match(gold.spans, p, options)) {
      auto first = std::find_if(gold.spans.begin(), gold.spans.end(),
                                [&](const Span& g) { return g.start == p.start && g.end < p.end; });
      auto second = std::find_if(gold.spans.begin(), gold.spans.end(),
                                 [&](const Span& g) { return g.end == p.end && g.start > p.start; });
      if (first != gold.spans.end() && second != gold.spans.end() && first->end < second->start &&
          second->start - first->end - 1 <= 1) {
        out.push_back(*first);
        out.push_back(*second);
        continue;
      }
    }
    out.push_back(p);
  }
  f.spans = std::move(out);
  f.sort_spans();
}

void fix_boundaries(Frame& f, const Frame& gold, const ScoreOptions& options) {
  for (std::size_t i = 0; i < f.spans.size(); ++i) {
    const Span p = f.spans[i];
    if (contains_match(gold.spans, p, options)) continue;
    const Span* best = nullptr;
    int best_overlap = 0;
    for (const auto& g : gold.spans) {
      if (!g.overlaps(p) || !labels_equal(g.label, p.label, options.am_coarse)) continue;
      int overlap = std::min(g.end, p.end) - std::max(g.start, p.start) + 1;
      if (overlap > best_overlap || (overlap == best_overlap && best && g.start < best->start)) {
        best = &g;
        best_overlap = overlap;
      }
    }
    if (best && fits(f, *best, {i})) f.spans[i] = *best;
  }
  f.sort_spans();
}

void drop_spurious(Frame& f, const Frame& gold, const ScoreOptions& options) {
  // Spans with no gold overlap, and spans still overlapping gold without
  // matching it after the repair stages.
  std::erase_if(f.spans, [&](const Span& s) { return !contains_match(gold.spans, s, options); });
}

void add_missing(Frame& f, const Frame& gold) {
  for (const auto& g : gold.spans) {
    bool free = std::none_of(f.spans.begin(), f.spans.end(), [&](const Span& s) { return s.overlaps(g); });
    if (free && !g.covers(f.predicate_index)) f.spans.push_back(g);
  }
  f.sort_spans();
}

}  // namespace

Frame apply_oracle(const Frame& pred, const Frame& gold, OracleKind kind, const ScoreOptions& options) {
  Frame f = pred;
  f.sort_spans();
  switch (kind) {
    case OracleKind::Fix: fix_labels(f, gold, options); break;
    case OracleKind::Move: move_core(f, gold); break;
    case OracleKind::Merge: merge_spans(f, gold); break;
    case OracleKind::Split: split_spans(f, gold, options); break;
    case OracleKind::Boundary: fix_boundaries(f, gold, options); break;
    case OracleKind::Drop: drop_spurious(f, gold, options); break;
    case OracleKind::Add: add_missing(f, gold); break;
  }
  return f;
}

OracleAnalysis oracle_sequence(const Corpus& pred, const Corpus& gold, const ScoreOptions& options,
                               std::vector<Corpus>* snapshots) {
  auto by_id = align_corpora(pred, gold);

  // Working copy in gold order; every gold predicate gets a (possibly empty)
  // predicted frame so Add has somewhere to insert.
  Corpus state;
  for (const auto& g : gold.sentences) {
    AnnotatedSentence s = *by_id.at(g.id);
    for (const auto& gf : g.frames)
      if (!s.find_frame(gf.predicate_index)) s.frames.push_back(Frame{gf.predicate_index, {}});
    std::sort(s.frames.begin(), s.frames.end(),
              [](const Frame& a, const Frame& b) { return a.predicate_index < b.predicate_index; });
    state.sentences.push_back(std::move(s));
  }

  OracleAnalysis analysis;
  analysis.original = score(state, gold, options).total;
  double previous = analysis.original.f1();
  for (OracleKind kind : kOracleOrder) {
    for (std::size_t i = 0; i < state.sentences.size(); ++i) {
      const AnnotatedSentence& g = gold.sentences[i];
      for (auto& f : state.sentences[i].frames) {
        const Frame* gf = g.find_frame(f.predicate_index);
        f = apply_oracle(f, gf ? *gf : Frame{f.predicate_index, {}}, kind, options);
      }
    }
    OracleStage stage{kind, score(state, gold, options).total};
    stage.f1 = stage.counts.f1();
    stage.relative_improvement = previous > 0 ? 100.0 * (stage.f1 - previous) / previous : 0.0;
    previous = stage.f1;
    analysis.stages.push_back(stage);
    if (snapshots) snapshots->push_back(state);
  }
  return analysis;
}

}  // namespace l2srl
