#ifndef L2SRL_SRL_EVAL_HPP_
#define L2SRL_SRL_EVAL_HPP_

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "l2srl/corpus_io.hpp"

namespace l2srl {

struct ScoreOptions {
  // Collapse AM-<subtype> to AM before comparing labels.
  bool am_coarse = false;
};

// Label string a span is scored under.
std::string scoring_label(const RoleLabel& label, const ScoreOptions& options);

// Micro counts. Percentages follow the usual conventions: P = 0 when nothing
// was predicted, R = 0 when there is no gold, F = 0 when P + R = 0.
struct Counts {
  long matched = 0;
  long predicted = 0;
  long gold = 0;

  double precision() const { return predicted ? 100.0 * static_cast<double>(matched) / static_cast<double>(predicted) : 0.0; }
  double recall() const { return gold ? 100.0 * static_cast<double>(matched) / static_cast<double>(gold) : 0.0; }
  double f1() const {
    double p = precision(), r = recall();
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }

  Counts& operator+=(const Counts& o) {
    matched += o.matched;
    predicted += o.predicted;
    gold += o.gold;
    return *this;
  }
  bool operator==(const Counts&) const = default;
};

struct RoleBreakdown {
  Counts total;
  Counts core;     // A0..A4
  Counts adjunct;  // AM*
  std::map<std::string, Counts> per_role;

  void add_span(const RoleLabel& label, const std::string& key, const Counts& delta);
  RoleBreakdown& operator+=(const RoleBreakdown& o);
};

struct ScoreReport : RoleBreakdown {
  struct Group {
    std::string key;
    RoleBreakdown scores;
  };
  struct Delta {
    std::string key;  // language, or "ALL" when grouping by side only
    double l2_f = 0;
    double l1_f = 0;
    double delta() const { return l2_f - l1_f; }
  };

  std::vector<Group> groups;
  std::vector<Delta> deltas;
};

// Scores spans of one frame pair. Either frame may be null (predicate present
// on one side only).
RoleBreakdown score_frame(const Frame* pred, const Frame* gold, const ScoreOptions& options = {});

// Throws MismatchedCorpora when sentence ids or token counts differ.
ScoreReport score(const Corpus& pred, const Corpus& gold, const ScoreOptions& options = {});

enum class GroupBy { Lang, Side, LangSide };

// Per-group micro scores plus ΔF = F(L2) − F(L1) per language (LangSide) or
// overall (Side). Metadata is taken from the gold corpus; throws
// MissingMetadata when a needed field is absent.
ScoreReport score_grouped(const Corpus& pred, const Corpus& gold, GroupBy group_by, const ScoreOptions& options = {});

// Agreement of annotator a against annotator b, grouped by language and side.
ScoreReport iaa(const Corpus& annotator_a, const Corpus& annotator_b, const ScoreOptions& options = {});

class ConfusionMatrix {
 public:
  static constexpr std::string_view kNone = "O";

  void add(const std::string& gold, const std::string& pred, long n = 1) { counts_[{gold, pred}] += n; }
  long at(const std::string& gold, const std::string& pred) const;
  long total() const;
  // Labels sorted lexicographically with O last.
  std::vector<std::string> labels() const;
  const std::map<std::pair<std::string, std::string>, long>& counts() const { return counts_; }

  ConfusionMatrix& operator+=(const ConfusionMatrix& o);

 private:
  std::map<std::pair<std::string, std::string>, long> counts_;
};

// Counts (gold, pred) only for boundary-exact span pairs, (O, pred) for
// predicted spans overlapping no gold span, and (gold, O) for gold spans
// overlapping no predicted span.
ConfusionMatrix confusion_matrix_frame(const Frame* pred, const Frame* gold, const ScoreOptions& options = {});
ConfusionMatrix confusion_matrix(const Corpus& pred, const Corpus& gold, const ScoreOptions& options = {});

enum class OracleKind { Fix, Move, Merge, Split, Boundary, Drop, Add };

inline constexpr std::array<OracleKind, 7> kOracleOrder = {OracleKind::Fix,   OracleKind::Move,     OracleKind::Merge,
                                                           OracleKind::Split, OracleKind::Boundary, OracleKind::Drop,
                                                           OracleKind::Add};

std::string_view to_string(OracleKind kind);

// Applies one oracle transformation to pred using gold. Edits that would make
// spans overlap are skipped. Inapplicable transformations are no-ops.
Frame apply_oracle(const Frame& pred, const Frame& gold, OracleKind kind, const ScoreOptions& options = {});

struct OracleStage {
  OracleKind kind;
  Counts counts;
  double f1 = 0;
  // 100 * (F - F_prev) / F_prev, 0 when F_prev = 0.
  double relative_improvement = 0;
};

struct OracleAnalysis {
  Counts original;
  std::vector<OracleStage> stages;
};

// Applies the seven transformations in canonical order, scoring after each.
// When `snapshots` is given it receives the predicted corpus after each stage.
OracleAnalysis oracle_sequence(const Corpus& pred, const Corpus& gold, const ScoreOptions& options = {},
                               std::vector<Corpus>* snapshots = nullptr);

}  // namespace l2srl

#endif  // L2SRL_SRL_EVAL_HPP_
