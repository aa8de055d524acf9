#include "l2srl/agreement_filter.hpp"

#include <cstdlib>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "l2srl/util.hpp"

namespace l2srl {

TupleSet extract_tuples(const AnnotatedSentence& sentence) {
  TupleSet out;
  for (const auto& f : sentence.frames)
    for (const auto& s : f.spans)
      for (int a = s.start; a <= s.end; ++a) out.insert(RoleTuple{f.predicate_index, a, s.label});
  return out;
}

namespace {

using LinkMap = std::multimap<int, int>;

// Tuples of `from` matched through `links` (from-side 0-based index -> other
// side 0-based index) by some tuple of `to`.
TupleSet match_side(const TupleSet& from, const TupleSet& to, const LinkMap& links, const AgreementOptions& options) {
  std::map<std::pair<int, int>, std::vector<const RoleLabel*>> roles_at;
  for (const auto& t : to) roles_at[{t.predicate, t.argument}].push_back(&t.role);

  TupleSet matched;
  for (const auto& t : from) {
    bool found = false;
    auto [pb, pe] = links.equal_range(t.predicate - 1);
    for (auto p = pb; p != pe && !found; ++p) {
      auto [ab, ae] = links.equal_range(t.argument - 1);
      for (auto a = ab; a != ae && !found; ++a) {
        auto it = roles_at.find({p->second + 1, a->second + 1});
        if (it == roles_at.end()) continue;
        for (const RoleLabel* r : it->second) {
          if (labels_equal(*r, t.role, options.am_coarse)) {
            found = true;
            break;
          }
        }
      }
    }
    if (found) matched.insert(t);
  }
  return matched;
}

}  // namespace

SharedTuples shared_tuples(const Alignment& alignment, const TupleSet& l2_tuples, const TupleSet& l1_tuples,
                           const AgreementOptions& options) {
  LinkMap forward, backward;
  for (const auto& [i, j] : alignment.links) {
    forward.emplace(i, j);
    backward.emplace(j, i);
  }
  return SharedTuples{match_side(l2_tuples, l1_tuples, forward, options),
                      match_side(l1_tuples, l2_tuples, backward, options)};
}

PairRecall recall_pair(const SentencePair& pair, const AgreementOptions& options) {
  TupleSet l2 = extract_tuples(pair.l2);
  TupleSet l1 = extract_tuples(pair.l1);
  SharedTuples shared = shared_tuples(pair.alignment, l2, l1, options);

  PairRecall r;
  r.pair_id = pair.alignment.pair_id.empty() ? pair.l2.pair_id : pair.alignment.pair_id;
  r.total_l2 = l2.size();
  r.total_l1 = l1.size();
  r.shared_l2 = shared.matched_l2.size();
  r.shared_l1 = shared.matched_l1.size();
  r.eligible = r.total_l2 > 0 && r.total_l1 > 0;
  if (r.eligible) {
    r.l2_recall = static_cast<double>(r.shared_l2) / static_cast<double>(r.total_l2);
    r.l1_recall = static_cast<double>(r.shared_l1) / static_cast<double>(r.total_l1);
  }
  return r;
}

SelectionResult select(std::span<const PairRecall> recalls, const SelectionConfig& config) {
  if (!(config.p >= 0.0 && config.p <= 1.0)) throw std::invalid_argument("selection threshold must lie in [0, 1]");
  SelectionResult out;
  out.pool_size = recalls.size();
  for (std::size_t i = 0; i < recalls.size(); ++i) {
    const PairRecall& r = recalls[i];
    if (r.eligible && r.l2_recall > config.p && r.l1_recall > config.p) out.selected.push_back(i);
  }
  return out;
}

void write_selection_report(std::span<const PairRecall> recalls, const SelectionResult& selection, std::ostream& out) {
  std::vector<bool> chosen(recalls.size(), false);
  for (std::size_t i : selection.selected) chosen[i] = true;
  out << "pair_id\ttotal_l2\ttotal_l1\tshared_l2\tshared_l1\tl2_recall\tl1_recall\tselected\n";
  for (std::size_t i = 0; i < recalls.size(); ++i) {
    const PairRecall& r = recalls[i];
    out << r.pair_id << '\t' << r.total_l2 << '\t' << r.total_l1 << '\t' << r.shared_l2 << '\t' << r.shared_l1 << '\t'
        << format_fixed(r.l2_recall, 4) << '\t' << format_fixed(r.l1_recall, 4) << '\t' << (chosen[i] ? 1 : 0) << '\n';
  }
}

Alignment heuristic_align(const AnnotatedSentence& l2, const AnnotatedSentence& l1) {
  const std::size_t n = l2.tokens.size(), m = l1.tokens.size();
  auto same = [&](std::size_t i, std::size_t j) { return l2.tokens[i].form == l1.tokens[j].form; };

  // suffix LCS lengths
  std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      lcs[i][j] = same(i, j) ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);

  Alignment out;
  out.pair_id = l2.pair_id;
  std::vector<bool> used2(n, false), used1(m, false);
  for (std::size_t i = 0, j = 0; i < n && j < m;) {
    if (same(i, j) && lcs[i][j] == lcs[i + 1][j + 1] + 1) {
      out.links.emplace(static_cast<int>(i), static_cast<int>(j));
      used2[i] = used1[j] = true;
      ++i;
      ++j;
    } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (used2[i]) continue;
    std::size_t best = m;
    for (std::size_t j = 0; j < m; ++j) {
      if (used1[j] || !same(i, j)) continue;
      auto dist = [&](std::size_t k) { return std::abs(static_cast<long>(k) - static_cast<long>(i)); };
      if (best == m || dist(j) < dist(best)) best = j;
    }
    if (best != m) {
      out.links.emplace(static_cast<int>(i), static_cast<int>(best));
      used2[i] = used1[best] = true;
    }
  }
  return out;
}

AlignmentTable heuristic_align_corpora(const Corpus& l2, const Corpus& l1) {
  AlignmentTable table;
  std::unordered_map<std::string, const AnnotatedSentence*> l1_by_pair;
  for (const auto& t : l1.sentences)
    if (!t.pair_id.empty()) l1_by_pair.emplace(t.pair_id, &t);
  for (const auto& s : l2.sentences) {
    auto it = l1_by_pair.find(s.pair_id);
    if (s.pair_id.empty() || it == l1_by_pair.end() || table.find(s.pair_id)) continue;
    table.add(heuristic_align(s, *it->second));
  }
  return table;
}

}  // namespace l2srl
