#ifndef L2SRL_SRL_TAGGER_HPP_
#define L2SRL_SRL_TAGGER_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "l2srl/corpus_io.hpp"

namespace l2srl {

// Ordered tag inventory: O, rel, then S/B/I/E for each role.
class LabelSet {
 public:
  LabelSet();  // O and rel only
  explicit LabelSet(std::vector<PositionTag> tags);  // throws std::invalid_argument unless closed
  static LabelSet for_roles(std::span<const RoleLabel> roles);
  static LabelSet from_corpus(const Corpus& corpus);

  std::size_t size() const { return tags_.size(); }
  const PositionTag& operator[](std::size_t i) const { return tags_[i]; }
  const std::vector<PositionTag>& tags() const { return tags_; }
  // -1 when absent.
  int find(const PositionTag& tag) const;
  int rel_index() const { return rel_; }

  bool operator==(const LabelSet& o) const { return tags_ == o.tags_; }

 private:
  std::vector<PositionTag> tags_;
  std::unordered_map<std::string, int> index_;
  int rel_ = 1;
};

// Lexical and positional features of one token relative to one predicate;
// sorted and unique. Positions are 1-based.
std::vector<std::string> extract_features(const AnnotatedSentence& sentence, int predicate_index, int position);

// Emission weights per (feature, label) and transition weights per label
// bigram of a first-order linear-chain model.
class TaggerModel {
 public:
  TaggerModel() = default;
  explicit TaggerModel(LabelSet labels);

  const LabelSet& labels() const { return labels_; }
  std::size_t feature_count() const { return features_.size(); }

  double emission(std::string_view feature, std::size_t label) const;
  double transition(std::size_t prev, std::size_t label) const { return transitions_[prev * labels_.size() + label]; }
  void set_emission(std::string_view feature, std::size_t label, double weight);
  void set_transition(std::size_t prev, std::size_t label, double weight) { transitions_[prev * labels_.size() + label] = weight; }

  // Feature id, or -1 when unknown.
  int feature_id(std::string_view feature) const;
  int intern(std::string_view feature);
  const std::vector<std::string>& features() const { return features_; }
  std::vector<double>& emission_weights() { return emissions_; }
  const std::vector<double>& emission_weights() const { return emissions_; }
  std::vector<double>& transition_weights() { return transitions_; }
  const std::vector<double>& transition_weights() const { return transitions_; }

 private:
  LabelSet labels_;
  std::vector<std::string> features_;
  std::unordered_map<std::string, int> feature_ids_;
  std::vector<double> emissions_;  // feature-major, labels_.size() per feature
  std::vector<double> transitions_ = std::vector<double>(4, 0.0);
};

// Best grammar-valid tag sequence for one predicate: rel forced at the
// predicate and forbidden elsewhere, runs never cross it. Ties go to the
// earlier label in label-set order.
std::vector<PositionTag> viterbi_decode(const TaggerModel& model, const AnnotatedSentence& sentence, int predicate_index);

// Model score of an arbitrary tag sequence (labels must be in the model).
double sequence_score(const TaggerModel& model, const AnnotatedSentence& sentence, int predicate_index,
                      std::span<const PositionTag> tags);

struct TrainConfig {
  int epochs = 10;
  std::uint64_t seed = 1;
  bool averaging = true;
};

// Averaged structured perceptron, one sequence per frame, seeded per-epoch
// shuffle. Throws EmptyCorpus when there is no frame to learn from and
// std::invalid_argument when epochs < 1.
TaggerModel train(const Corpus& corpus, const TrainConfig& config = {});

// Copy of `sentence` whose frames are the model's predictions for the given
// predicates. Throws InvalidPredicateIndex on out-of-range or repeated indices.
AnnotatedSentence tag(const TaggerModel& model, const AnnotatedSentence& sentence, std::span<const int> predicate_indices);
// Tags every sentence at its annotated predicate positions.
Corpus tag_corpus(const TaggerModel& model, const Corpus& corpus);

inline constexpr std::string_view kModelHeader = "SRLMODEL v1";

void save_model(const TaggerModel& model, std::ostream& out);
// Throws ParseError on malformed input, VersionMismatch on an unknown header version.
TaggerModel load_model(std::istream& in);

}  // namespace l2srl

#endif  // L2SRL_SRL_TAGGER_HPP_
