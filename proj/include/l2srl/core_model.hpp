#ifndef L2SRL_CORE_MODEL_HPP_
#define L2SRL_CORE_MODEL_HPP_

#include <compare>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "l2srl/errors.hpp"

namespace l2srl {

// Role label of the CPB inventory: the predicate marker, a numbered core
// argument A0..A4, or an adjunct AM with an optional functional subtype.
class RoleLabel {
 public:
  enum class Kind { Rel, Core, Adjunct };

  RoleLabel() = default;

  static RoleLabel rel() { return RoleLabel(Kind::Rel, 0, {}); }
  static RoleLabel core(int n);
  static RoleLabel adjunct(std::string subtype = {});

  // Accepts "rel", "A0".."A4", "AM", "AM-<subtype>". Throws std::invalid_argument.
  static RoleLabel parse(std::string_view text);

  Kind kind() const { return kind_; }
  int core_index() const { return core_; }
  const std::string& subtype() const { return subtype_; }
  bool is_rel() const { return kind_ == Kind::Rel; }
  bool is_core() const { return kind_ == Kind::Core; }
  bool is_adjunct() const { return kind_ == Kind::Adjunct; }

  // Adjunct subtypes collapsed to bare AM.
  RoleLabel coarse() const;

  std::string str() const;

  auto operator<=>(const RoleLabel&) const = default;
  bool operator==(const RoleLabel&) const = default;

 private:
  RoleLabel(Kind kind, int core, std::string subtype)
      : kind_(kind), core_(core), subtype_(std::move(subtype)) {}

  Kind kind_ = Kind::Core;
  int core_ = 0;
  std::string subtype_;
};

// Label equality shared by the scorer and the agreement filter.
bool labels_equal(const RoleLabel& a, const RoleLabel& b, bool am_coarse);

struct Token {
  int index = 0;  // 1-based
  std::string form;

  bool operator==(const Token&) const = default;
};

// Inclusive 1-based token range carrying a role.
struct Span {
  int start = 0;
  int end = 0;
  RoleLabel label;

  int length() const { return end - start + 1; }
  bool covers(int i) const { return start <= i && i <= end; }
  bool overlaps(const Span& other) const { return start <= other.end && other.start <= end; }
  bool same_extent(const Span& other) const { return start == other.start && end == other.end; }

  auto operator<=>(const Span&) const = default;
  bool operator==(const Span&) const = default;
};

struct Frame {
  int predicate_index = 0;
  std::vector<Span> spans;  // sorted by start

  void sort_spans();
  bool operator==(const Frame&) const = default;
};

enum class Lang { ENG, JPN, RUS, ARA, OTHER };
enum class Side { L2, L1 };

std::string_view to_string(Lang lang);
std::string_view to_string(Side side);
std::optional<Lang> parse_lang(std::string_view text);
std::optional<Side> parse_side(std::string_view text);

struct AnnotatedSentence {
  std::string id;
  std::optional<Lang> lang;
  std::optional<Side> side;
  std::string pair_id;  // empty when absent
  std::vector<Token> tokens;
  std::vector<Frame> frames;  // strictly increasing predicate_index

  int length() const { return static_cast<int>(tokens.size()); }
  const Frame* find_frame(int predicate_index) const;
  bool operator==(const AnnotatedSentence&) const = default;
};

// 0-based (l2 index, l1 index) links.
struct Alignment {
  std::string pair_id;
  std::set<std::pair<int, int>> links;

  bool operator==(const Alignment&) const = default;
};

class PositionTag {
 public:
  enum class Kind { Outside, Rel, S, B, I, E };

  PositionTag() = default;
  PositionTag(Kind kind, RoleLabel label);

  static PositionTag outside() { return {}; }
  static PositionTag predicate() { return PositionTag(Kind::Rel, RoleLabel::rel()); }

  // "O", "rel", or "<S|B|I|E>-<label>". Throws std::invalid_argument.
  static PositionTag parse(std::string_view text);

  Kind kind() const { return kind_; }
  const RoleLabel& label() const { return label_; }
  bool is_outside() const { return kind_ == Kind::Outside; }
  bool is_rel() const { return kind_ == Kind::Rel; }
  // B or I: the next tag must continue the run.
  bool opens_run() const { return kind_ == Kind::B || kind_ == Kind::I; }

  std::string str() const;

  auto operator<=>(const PositionTag&) const = default;
  bool operator==(const PositionTag&) const = default;

 private:
  Kind kind_ = Kind::Outside;
  RoleLabel label_;
};

// Whether `next` may follow `prev` under the S/B/I/E grammar. A null `prev`
// means sentence start.
bool transition_allowed(const PositionTag* prev, const PositionTag& next);
bool may_end_sequence(const PositionTag& last);

enum class DecodeMode { Strict, Lenient };

// Decodes one frame column. Strict mode throws IllFormedTagSequence on any
// grammar violation. Lenient mode repairs orphan I/E (as B/S starts),
// unterminated runs (closed at the last contiguous same-label token) and
// extra REL positions (only the first counts); a missing REL still throws.
Frame spans_from_tags(std::span<const PositionTag> tags, DecodeMode mode = DecodeMode::Strict);

// Throws InvalidFrame if spans overlap, leave [1, length], or cover the predicate.
std::vector<PositionTag> tags_from_spans(const Frame& frame, int length);

struct Violation {
  enum class Rule {
    BadTokenIndex,
    EmptyForm,
    PredicateOutOfBounds,
    DuplicatePredicate,
    UnorderedPredicates,
    OutOfBounds,
    EmptySpan,
    Overlap,
    CoversPredicate,
    RelAsArgument,
  };

  Rule rule;
  int frame = -1;  // index into frames, -1 for sentence-level
  int span = -1;
  std::string message;
};

std::string_view to_string(Violation::Rule rule);

std::vector<Violation> validate_sentence(const AnnotatedSentence& sentence);

}  // namespace l2srl

#endif  // L2SRL_CORE_MODEL_HPP_
