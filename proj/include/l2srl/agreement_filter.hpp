#ifndef L2SRL_AGREEMENT_FILTER_HPP_
#define L2SRL_AGREEMENT_FILTER_HPP_

#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "l2srl/corpus_io.hpp"

namespace l2srl {

// <predicate word, argument word, role>, 1-based token indices.
struct RoleTuple {
  int predicate = 0;
  int argument = 0;
  RoleLabel role;

  auto operator<=>(const RoleTuple&) const = default;
  bool operator==(const RoleTuple&) const = default;
};

using TupleSet = std::set<RoleTuple>;

struct AgreementOptions {
  bool am_coarse = true;
};

// One tuple per token of every span of every frame.
TupleSet extract_tuples(const AnnotatedSentence& sentence);

struct SharedTuples {
  TupleSet matched_l2;
  TupleSet matched_l1;
};

// An L2 tuple <p, a, r> is matched when some L1 tuple <p', a', r'> has r' = r,
// p-1 linked to p'-1 and a-1 linked to a'-1; L1 tuples symmetrically.
SharedTuples shared_tuples(const Alignment& alignment, const TupleSet& l2_tuples, const TupleSet& l1_tuples,
                           const AgreementOptions& options = {});

struct PairRecall {
  std::string pair_id;
  std::size_t total_l2 = 0;
  std::size_t total_l1 = 0;
  std::size_t shared_l2 = 0;
  std::size_t shared_l1 = 0;
  double l2_recall = 0;
  double l1_recall = 0;
  bool eligible = false;  // both sides have at least one tuple
};

PairRecall recall_pair(const SentencePair& pair, const AgreementOptions& options = {});

struct SelectionConfig {
  double p = 0.9;  // strict: recall must exceed p
};

struct SelectionResult {
  std::vector<std::size_t> selected;  // indices into the input, ascending
  std::size_t pool_size = 0;
  double ratio() const { return pool_size ? static_cast<double>(selected.size()) / static_cast<double>(pool_size) : 0.0; }
};

// Throws std::invalid_argument when p is outside [0, 1].
SelectionResult select(std::span<const PairRecall> recalls, const SelectionConfig& config = {});

// Header plus one row per pair: pair_id, totals, shared counts, recalls (4
// decimals), selected flag.
void write_selection_report(std::span<const PairRecall> recalls, const SelectionResult& selection, std::ostream& out);

// LCS over identical forms, then greedy nearest-position matching of the
// remaining identical forms. Tokens with different forms are never linked.
Alignment heuristic_align(const AnnotatedSentence& l2, const AnnotatedSentence& l1);
// heuristic_align over every pair_id shared by the two corpora, in L2 order.
AlignmentTable heuristic_align_corpora(const Corpus& l2, const Corpus& l1);

}  // namespace l2srl

#endif  // L2SRL_AGREEMENT_FILTER_HPP_
