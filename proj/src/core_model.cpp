#include "l2srl/core_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace l2srl {

RoleLabel RoleLabel::core(int n) {
  if (n < 0 || n > 4) throw std::invalid_argument("core role index out of range: " + std::to_string(n));
  return RoleLabel(Kind::Core, n, {});
}

RoleLabel RoleLabel::adjunct(std::string subtype) { return RoleLabel(Kind::Adjunct, 0, std::move(subtype)); }

RoleLabel RoleLabel::parse(std::string_view text) {
  if (text == "rel") return rel();
  if (text.size() == 2 && text[0] == 'A' && text[1] >= '0' && text[1] <= '4') return core(text[1] - '0');
  if (text == "AM") return adjunct();
  if (text.size() > 3 && text.substr(0, 3) == "AM-") {
    std::string_view sub = text.substr(3);
    for (char c : sub) {
      if (c == '\t' || c == ' ' || c == '\n' || c == '\r')
        throw std::invalid_argument("whitespace in role label");
    }
    return adjunct(std::string(sub));
  }
  throw std::invalid_argument("unknown role label '" + std::string(text) + "'");
}

RoleLabel RoleLabel::coarse() const { return is_adjunct() ? adjunct() : *this; }

std::string RoleLabel::str() const {
  switch (kind_) {
    case Kind::Rel:
      return "rel";
    case Kind::Core:
      return "A" + std::to_string(core_);
    case Kind::Adjunct:
      return subtype_.empty() ? "AM" : "AM-" + subtype_;
  }
  return {};
}

bool labels_equal(const RoleLabel& a, const RoleLabel& b, bool am_coarse) {
  if (am_coarse) return a.coarse() == b.coarse();
  return a == b;
}

void Frame::sort_spans() { std::sort(spans.begin(), spans.end()); }

std::string_view to_string(Lang lang) {
  switch (lang) {
    case Lang::ENG: return "ENG";
    case Lang::JPN: return "JPN";
    case Lang::RUS: return "RUS";
    case Lang::ARA: return "ARA";
    case Lang::OTHER: return "OTHER";
  }
  return "OTHER";
}

std::string_view to_string(Side side) { return side == Side::L2 ? "L2" : "L1"; }

std::optional<Lang> parse_lang(std::string_view text) {
  for (Lang l : {Lang::ENG, Lang::JPN, Lang::RUS, Lang::ARA, Lang::OTHER})
    if (to_string(l) == text) return l;
  return std::nullopt;
}

std::optional<Side> parse_side(std::string_view text) {
  if (text == "L2") return Side::L2;
  if (text == "L1") return Side::L1;
  return std::nullopt;
}

const Frame* AnnotatedSentence::find_frame(int predicate_index) const {
  for (const auto& f : frames)
    if (f.predicate_index == predicate_index) return &f;
  return nullptr;
}

PositionTag::PositionTag(Kind kind, RoleLabel label) : kind_(kind), label_(std::move(label)) {
  if (kind_ == Kind::Outside) label_ = RoleLabel();
  if (kind_ == Kind::Rel) label_ = RoleLabel::rel();
  if (kind_ != Kind::Rel && kind_ != Kind::Outside && label_.is_rel())
    throw std::invalid_argument("rel cannot be a span label");
}

PositionTag PositionTag::parse(std::string_view text) {
  if (text == "O") return outside();
  if (text == "rel") return predicate();
  if (text.size() < 3 || text[1] != '-') throw std::invalid_argument("bad tag '" + std::string(text) + "'");
  Kind kind;
  switch (text[0]) {
    case 'S': kind = Kind::S; break;
    case 'B': kind = Kind::B; break;
    case 'I': kind = Kind::I; break;
    case 'E': kind = Kind::E; break;
    default: throw std::invalid_argument("bad tag position in '" + std::string(text) + "'");
  }
  RoleLabel label = RoleLabel::parse(text.substr(2));
  if (label.is_rel()) throw std::invalid_argument("rel cannot carry a position: '" + std::string(text) + "'");
  return PositionTag(kind, std::move(label));
}

std::string PositionTag::str() const {
  switch (kind_) {
    case Kind::Outside: return "O";
    case Kind::Rel: return "rel";
    case Kind::S: return "S-" + label_.str();
    case Kind::B: return "B-" + label_.str();
    case Kind::I: return "I-" + label_.str();
    case Kind::E: return "E-" + label_.str();
  }
  return {};
}

bool transition_allowed(const PositionTag* prev, const PositionTag& next) {
  using K = PositionTag::Kind;
  if (prev == nullptr || !prev->opens_run()) return next.kind() != K::I && next.kind() != K::E;
  return (next.kind() == K::I || next.kind() == K::E) && next.label() == prev->label();
}

bool may_end_sequence(const PositionTag& last) { return !last.opens_run(); }

namespace {

std::string position_str(std::size_t i) { return "position " + std::to_string(i + 1); }

}  // namespace

Frame spans_from_tags(std::span<const PositionTag> tags, DecodeMode mode) {
  using K = PositionTag::Kind;
  const bool strict = mode == DecodeMode::Strict;
  Frame frame;
  bool has_pred = false;

  // Open run: start position (0-based) and label.
  std::optional<std::pair<std::size_t, RoleLabel>> open;
  auto close_at = [&](std::size_t last) {
    frame.spans.push_back(Span{static_cast<int>(open->first) + 1, static_cast<int>(last) + 1, open->second});
    open.reset();
  };

  for (std::size_t i = 0; i < tags.size(); ++i) {
    const PositionTag& t = tags[i];
    if (open) {
      if ((t.kind() == K::I || t.kind() == K::E) && t.label() == open->second) {
        if (t.kind() == K::E) close_at(i);
        continue;
      }
      if (strict)
        throw IllFormedTagSequence("unterminated run at " + position_str(open->first) + ", found " + t.str() +
                                   " at " + position_str(i));
      close_at(i - 1);
    }
    switch (t.kind()) {
      case K::Outside:
        break;
      case K::Rel:
        if (has_pred) {
          if (strict) throw IllFormedTagSequence("second rel at " + position_str(i));
          break;
        }
        has_pred = true;
        frame.predicate_index = static_cast<int>(i) + 1;
        break;
      case K::S:
        frame.spans.push_back(Span{static_cast<int>(i) + 1, static_cast<int>(i) + 1, t.label()});
        break;
      case K::B:
        open.emplace(i, t.label());
        break;
      case K::I:
        if (strict) throw IllFormedTagSequence("I without B at " + position_str(i));
        open.emplace(i, t.label());
        break;
      case K::E:
        if (strict) throw IllFormedTagSequence("E without B at " + position_str(i));
        frame.spans.push_back(Span{static_cast<int>(i) + 1, static_cast<int>(i) + 1, t.label()});
        break;
    }
  }
  if (open) {
    if (strict) throw IllFormedTagSequence("unterminated run at " + position_str(open->first));
    close_at(tags.size() - 1);
  }
  if (!has_pred) throw IllFormedTagSequence("no rel in tag sequence");
  frame.sort_spans();
  return frame;
}

std::vector<PositionTag> tags_from_spans(const Frame& frame, int length) {
  if (frame.predicate_index < 1 || frame.predicate_index > length)
    throw InvalidFrame("predicate index " + std::to_string(frame.predicate_index) + " outside sentence of length " +
                       std::to_string(length));
  using K = PositionTag::Kind;
  std::vector<PositionTag> tags(static_cast<std::size_t>(length));
  std::vector<bool> used(static_cast<std::size_t>(length) + 1, false);
  used[static_cast<std::size_t>(frame.predicate_index)] = true;
  tags[static_cast<std::size_t>(frame.predicate_index - 1)] = PositionTag::predicate();
  for (const auto& s : frame.spans) {
    if (s.label.is_rel()) throw InvalidFrame("rel used as an argument label");
    if (s.start < 1 || s.end > length || s.start > s.end)
      throw InvalidFrame("span (" + std::to_string(s.start) + "," + std::to_string(s.end) + ") out of bounds");
    for (int i = s.start; i <= s.end; ++i) {
      if (used[static_cast<std::size_t>(i)])
        throw InvalidFrame("span (" + std::to_string(s.start) + "," + std::to_string(s.end) +
                           ") overlaps another span or the predicate");
      used[static_cast<std::size_t>(i)] = true;
    }
    if (s.start == s.end) {
      tags[static_cast<std::size_t>(s.start - 1)] = PositionTag(K::S, s.label);
      continue;
    }
    tags[static_cast<std::size_t>(s.start - 1)] = PositionTag(K::B, s.label);
    for (int i = s.start + 1; i < s.end; ++i) tags[static_cast<std::size_t>(i - 1)] = PositionTag(K::I, s.label);
    tags[static_cast<std::size_t>(s.end - 1)] = PositionTag(K::E, s.label);
  }
  return tags;
}

std::string_view to_string(Violation::Rule rule) {
  using R = Violation::Rule;
  switch (rule) {
    case R::BadTokenIndex: return "BadTokenIndex";
    case R::EmptyForm: return "EmptyForm";
    case R::PredicateOutOfBounds: return "PredicateOutOfBounds";
    case R::DuplicatePredicate: return "DuplicatePredicate";
    case R::UnorderedPredicates: return "UnorderedPredicates";
    case R::OutOfBounds: return "OutOfBounds";
    case R::EmptySpan: return "EmptySpan";
    case R::Overlap: return "Overlap";
    case R::CoversPredicate: return "CoversPredicate";
    case R::RelAsArgument: return "RelAsArgument";
  }
  return "?";
}

std::vector<Violation> validate_sentence(const AnnotatedSentence& s) {
  using R = Violation::Rule;
  std::vector<Violation> out;
  const int n = s.length();
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[static_cast<std::size_t>(i)];
    if (t.index != i + 1)
      out.push_back({R::BadTokenIndex, -1, -1, "token " + std::to_string(i + 1) + " has index " + std::to_string(t.index)});
    if (t.form.empty()) out.push_back({R::EmptyForm, -1, -1, "token " + std::to_string(i + 1) + " has an empty form"});
  }
  for (std::size_t fi = 0; fi < s.frames.size(); ++fi) {
    const Frame& f = s.frames[fi];
    const int frame = static_cast<int>(fi);
    const std::string where = "frame " + std::to_string(fi) + " (predicate " + std::to_string(f.predicate_index) + ")";
    if (f.predicate_index < 1 || f.predicate_index > n)
      out.push_back({R::PredicateOutOfBounds, frame, -1, where + ": predicate outside sentence"});
    if (fi > 0) {
      int prev = s.frames[fi - 1].predicate_index;
      if (prev == f.predicate_index)
        out.push_back({R::DuplicatePredicate, frame, -1, where + ": predicate repeated"});
      else if (prev > f.predicate_index)
        out.push_back({R::UnorderedPredicates, frame, -1, where + ": frames not ordered by predicate"});
    }
    for (std::size_t si = 0; si < f.spans.size(); ++si) {
      const Span& sp = f.spans[si];
      const int span = static_cast<int>(si);
      const std::string swhere =
          where + " span (" + std::to_string(sp.start) + "," + std::to_string(sp.end) + "," + sp.label.str() + ")";
      if (sp.label.is_rel()) out.push_back({R::RelAsArgument, frame, span, swhere + ": rel used as argument"});
      if (sp.start > sp.end) {
        out.push_back({R::EmptySpan, frame, span, swhere + ": start after end"});
        continue;
      }
      if (sp.start < 1 || sp.end > n) out.push_back({R::OutOfBounds, frame, span, swhere + ": outside sentence"});
      if (sp.covers(f.predicate_index)) out.push_back({R::CoversPredicate, frame, span, swhere + ": covers predicate"});
      for (std::size_t sj = 0; sj < si; ++sj) {
        if (f.spans[sj].start <= f.spans[sj].end && f.spans[sj].overlaps(sp))
          out.push_back({R::Overlap, frame, span, swhere + ": overlaps span " + std::to_string(sj)});
      }
    }
  }
  return out;
}

}  // namespace l2srl
