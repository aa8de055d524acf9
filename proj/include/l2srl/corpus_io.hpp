#ifndef L2SRL_CORPUS_IO_HPP_
#define L2SRL_CORPUS_IO_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "l2srl/core_model.hpp"

namespace l2srl {

struct Corpus {
  std::vector<AnnotatedSentence> sentences;

  const AnnotatedSentence* find(const std::string& id) const;
  bool operator==(const Corpus&) const = default;
};

struct ReadOptions {
  DecodeMode mode = DecodeMode::Strict;
};

// Column format:
//   # id = <string>
//   # lang = <ENG|JPN|RUS|ARA|OTHER>     (optional)
//   # side = <L2|L1>                     (optional)
//   # pair = <string>                    (optional)
//   <index> TAB <form> TAB <Y|_> TAB <frame column>...
//   <blank line>
// Throws ParseError carrying the offending line number.
Corpus read_corpus(std::istream& in, const ReadOptions& options = {});
Corpus read_corpus_file(const std::string& path, const ReadOptions& options = {});
void write_corpus(const Corpus& corpus, std::ostream& out);
void write_corpus_file(const Corpus& corpus, const std::string& path);

// Alignments keyed by pair id, kept in file order.
class AlignmentTable {
 public:
  void add(Alignment alignment);  // throws std::invalid_argument on a duplicate pair id
  const Alignment* find(const std::string& pair_id) const;
  const std::vector<Alignment>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<Alignment> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// "pair_id TAB i-j i-j ..." per line, 0-based.
AlignmentTable read_alignments(std::istream& in);
AlignmentTable read_alignments_file(const std::string& path);
void write_alignments(const AlignmentTable& table, std::ostream& out);

struct SentencePair {
  AnnotatedSentence l2;
  AnnotatedSentence l1;
  Alignment alignment;
};

struct PairingIssue {
  enum class Kind { MissingPairId, NoL1Counterpart, NoL2Counterpart, NoAlignment, DuplicatePairId, WrongSide, AlignmentOutOfRange };
  Kind kind;
  std::string id;  // sentence id or pair id
  std::string message;
};

struct PairingResult {
  std::vector<SentencePair> pairs;  // L2 corpus order
  std::vector<PairingIssue> issues;

  bool complete() const { return issues.empty(); }
  // Throws PairingError listing every issue.
  void require_complete() const;
};

PairingResult pair_corpora(const Corpus& l2, const Corpus& l1, const AlignmentTable& alignments);

struct SplitSpec {
  int dev_pairs_per_lang = 50;
};

struct DatasetSplit {
  std::vector<SentencePair> dev;
  std::vector<AnnotatedSentence> test_l2;
  std::vector<AnnotatedSentence> test_l1;
};

// Per language (L2 side metadata, OTHER when absent) a seeded shuffle picks
// the dev pairs; everything else goes to the test splits. Output keeps input
// order. Throws InsufficientData naming the language.
DatasetSplit split_dataset(const std::vector<SentencePair>& pairs, const SplitSpec& spec, std::uint64_t seed);

// "sentence_id TAB split_name" per line.
void write_split_file(const DatasetSplit& split, std::ostream& out);
std::vector<std::pair<std::string, std::string>> read_split_file(std::istream& in);

}  // namespace l2srl

#endif  // L2SRL_CORPUS_IO_HPP_
