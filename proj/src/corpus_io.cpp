#include "l2srl/corpus_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "l2srl/util.hpp"

namespace l2srl {

const AnnotatedSentence* Corpus::find(const std::string& id) const {
  for (const auto& s : sentences)
    if (s.id == id) return &s;
  return nullptr;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

void check_line_endings_and_encoding(const std::vector<std::string_view>& lines) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find('\r') != std::string_view::npos) throw ParseError(i + 1, "carriage return found (LF line endings required)");
    if (!is_valid_utf8(lines[i])) throw ParseError(i + 1, "invalid UTF-8");
  }
}

struct PendingBlock {
  std::size_t header_line = 0;
  std::size_t first_token_line = 0;
  std::map<std::string, std::string> headers;
  std::vector<Token> tokens;
  std::vector<bool> is_pred;
  std::vector<std::vector<PositionTag>> columns;  // per frame
  bool has_columns_count = false;

  bool empty() const { return headers.empty() && tokens.empty(); }
};

AnnotatedSentence finish_block(PendingBlock& block, const ReadOptions& options) {
  const std::size_t line = block.header_line ? block.header_line : block.first_token_line;
  AnnotatedSentence s;
  auto id = block.headers.find("id");
  if (id == block.headers.end()) throw ParseError(line, "sentence block without '# id = ...' header");
  s.id = id->second;
  if (auto it = block.headers.find("lang"); it != block.headers.end()) {
    s.lang = parse_lang(it->second);
    if (!s.lang) throw ParseError(line, "unknown language '" + it->second + "'");
  }
  if (auto it = block.headers.find("side"); it != block.headers.end()) {
    s.side = parse_side(it->second);
    if (!s.side) throw ParseError(line, "unknown side '" + it->second + "'");
  }
  if (auto it = block.headers.find("pair"); it != block.headers.end()) s.pair_id = it->second;
  if (block.tokens.empty()) throw ParseError(line, "sentence '" + s.id + "' has no tokens");
  s.tokens = std::move(block.tokens);

  std::vector<int> marked;
  for (std::size_t i = 0; i < block.is_pred.size(); ++i)
    if (block.is_pred[i]) marked.push_back(static_cast<int>(i) + 1);

  const bool strict = options.mode == DecodeMode::Strict;
  for (std::size_t k = 0; k < block.columns.size(); ++k) {
    Frame f;
    try {
      f = spans_from_tags(block.columns[k], options.mode);
    } catch (const IllFormedTagSequence& e) {
      throw ParseError(block.first_token_line,
                       "sentence '" + s.id + "' frame column " + std::to_string(k + 1) + ": " + e.what());
    }
    s.frames.push_back(std::move(f));
  }
  if (strict) {
    if (marked.size() != s.frames.size())
      throw ParseError(block.first_token_line, "sentence '" + s.id + "': " + std::to_string(marked.size()) +
                                                   " predicate marks but " + std::to_string(s.frames.size()) +
                                                   " frame columns");
    for (std::size_t k = 0; k < marked.size(); ++k) {
      if (s.frames[k].predicate_index != marked[k])
        throw ParseError(block.first_token_line, "sentence '" + s.id + "' frame column " + std::to_string(k + 1) +
                                                     ": rel at token " + std::to_string(s.frames[k].predicate_index) +
                                                     " does not match predicate mark order");
    }
    auto violations = validate_sentence(s);
    if (!violations.empty()) throw ParseError(block.first_token_line, "sentence '" + s.id + "': " + violations.front().message);
  } else {
    std::stable_sort(s.frames.begin(), s.frames.end(),
                     [](const Frame& a, const Frame& b) { return a.predicate_index < b.predicate_index; });
  }
  return s;
}

}  // namespace

Corpus read_corpus(std::istream& in, const ReadOptions& options) {
  std::string text(std::istreambuf_iterator<char>(in), {});
  auto lines = split_lines(text);
  check_line_endings_and_encoding(lines);

  Corpus corpus;
  std::unordered_set<std::string> ids;
  PendingBlock block;
  bool previous_blank = true;  // disallows leading blank lines

  auto flush = [&]() {
    AnnotatedSentence s = finish_block(block, options);
    if (!ids.insert(s.id).second)
      throw ParseError(block.header_line ? block.header_line : block.first_token_line, "duplicate sentence id '" + s.id + "'");
    corpus.sentences.push_back(std::move(s));
    block = PendingBlock{};
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    std::string_view line = lines[i];
    if (line.empty()) {
      if (previous_blank) throw ParseError(lineno, "unexpected blank line (blocks are separated by exactly one)");
      flush();
      previous_blank = true;
      continue;
    }
    previous_blank = false;
    if (line[0] == '#') {
      if (!block.tokens.empty()) throw ParseError(lineno, "header comment after token lines");
      if (line.substr(0, 2) != "# ") throw ParseError(lineno, "malformed header (expected '# key = value')");
      std::size_t eq = line.find(" = ", 2);
      if (eq == std::string_view::npos) throw ParseError(lineno, "malformed header (expected '# key = value')");
      std::string key(line.substr(2, eq - 2));
      std::string value(line.substr(eq + 3));
      if (key != "id" && key != "lang" && key != "side" && key != "pair") throw ParseError(lineno, "unknown header key '" + key + "'");
      if (value.empty()) throw ParseError(lineno, "empty value for header '" + key + "'");
      if (!block.headers.emplace(key, value).second) throw ParseError(lineno, "repeated header '" + key + "'");
      if (!block.header_line) block.header_line = lineno;
      continue;
    }

    auto cols = split(line, '\t');
    if (cols.size() < 3) throw ParseError(lineno, "expected at least 3 TAB-separated columns, found " + std::to_string(cols.size()));
    if (!block.has_columns_count) {
      block.columns.resize(cols.size() - 3);
      block.has_columns_count = true;
      block.first_token_line = lineno;
    } else if (cols.size() != block.columns.size() + 3) {
      throw ParseError(lineno, "expected " + std::to_string(block.columns.size() + 3) + " columns, found " +
                                   std::to_string(cols.size()));
    }
    auto index = parse_int(cols[0]);
    if (!index) throw ParseError(lineno, "non-integer token index '" + std::string(cols[0]) + "'");
    if (*index != static_cast<int>(block.tokens.size()) + 1)
      throw ParseError(lineno, "token index " + std::to_string(*index) + " out of sequence");
    if (cols[1].empty() || cols[1].find(' ') != std::string_view::npos) throw ParseError(lineno, "empty or whitespace-containing form");
    if (cols[2] != "Y" && cols[2] != "_") throw ParseError(lineno, "predicate column must be 'Y' or '_'");
    block.tokens.push_back(Token{*index, std::string(cols[1])});
    block.is_pred.push_back(cols[2] == "Y");
    for (std::size_t k = 0; k + 3 < cols.size(); ++k) {
      try {
        block.columns[k].push_back(PositionTag::parse(cols[k + 3]));
      } catch (const std::invalid_argument& e) {
        throw ParseError(lineno, "undecodable tag column " + std::to_string(k + 1) + ": " + e.what());
      }
    }
  }
  if (!block.empty()) flush();
  return corpus;
}

Corpus read_corpus_file(const std::string& path, const ReadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_corpus(in, options);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& s : corpus.sentences) {
    out << "# id = " << s.id << '\n';
    if (s.lang) out << "# lang = " << to_string(*s.lang) << '\n';
    if (s.side) out << "# side = " << to_string(*s.side) << '\n';
    if (!s.pair_id.empty()) out << "# pair = " << s.pair_id << '\n';
    std::vector<std::vector<PositionTag>> columns;
    columns.reserve(s.frames.size());
    std::vector<bool> is_pred(s.tokens.size(), false);
    for (const auto& f : s.frames) {
      columns.push_back(tags_from_spans(f, s.length()));
      is_pred[static_cast<std::size_t>(f.predicate_index - 1)] = true;
    }
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      out << (i + 1) << '\t' << s.tokens[i].form << '\t' << (is_pred[i] ? 'Y' : '_');
      for (const auto& col : columns) out << '\t' << col[i].str();
      out << '\n';
    }
    out << '\n';
  }
}

void write_corpus_file(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_corpus(corpus, out);
}

void AlignmentTable::add(Alignment alignment) {
  if (index_.count(alignment.pair_id)) throw std::invalid_argument("duplicate alignment for pair '" + alignment.pair_id + "'");
  index_.emplace(alignment.pair_id, entries_.size());
  entries_.push_back(std::move(alignment));
}

const Alignment* AlignmentTable::find(const std::string& pair_id) const {
  auto it = index_.find(pair_id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

AlignmentTable read_alignments(std::istream& in) {
  std::string text(std::istreambuf_iterator<char>(in), {});
  auto lines = split_lines(text);
  check_line_endings_and_encoding(lines);
  AlignmentTable table;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    std::string_view line = lines[i];
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) throw ParseError(lineno, "expected 'pair_id<TAB>links'");
    Alignment a;
    a.pair_id = std::string(line.substr(0, tab));
    std::string_view rest = line.substr(tab + 1);
    if (!rest.empty()) {
      for (std::string_view link : split(rest, ' ')) {
        std::size_t dash = link.find('-');
        std::optional<int> l2, l1;
        if (dash != std::string_view::npos) {
          l2 = parse_int(link.substr(0, dash));
          l1 = parse_int(link.substr(dash + 1));
        }
        if (!l2 || !l1 || *l2 < 0 || *l1 < 0) throw ParseError(lineno, "malformed link '" + std::string(link) + "'");
        a.links.emplace(*l2, *l1);
      }
    }
    if (table.find(a.pair_id)) throw ParseError(lineno, "duplicate pair id '" + a.pair_id + "'");
    table.add(std::move(a));
  }
  return table;
}

AlignmentTable read_alignments_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_alignments(in);
}

void write_alignments(const AlignmentTable& table, std::ostream& out) {
  for (const auto& a : table.entries()) {
    out << a.pair_id << '\t';
    bool first = true;
    for (const auto& [i, j] : a.links) {
      if (!first) out << ' ';
      out << i << '-' << j;
      first = false;
    }
    out << '\n';
  }
}

void PairingResult::require_complete() const {
  if (issues.empty()) return;
  std::string msg = std::to_string(issues.size()) + " pairing issue(s):";
  for (const auto& issue : issues) msg += "\n  " + issue.message;
  throw PairingError(msg);
}

PairingResult pair_corpora(const Corpus& l2, const Corpus& l1, const AlignmentTable& alignments) {
  using K = PairingIssue::Kind;
  PairingResult result;
  std::unordered_map<std::string, const AnnotatedSentence*> l1_by_pair;
  for (const auto& s : l1.sentences) {
    if (s.pair_id.empty()) {
      result.issues.push_back({K::MissingPairId, s.id, "L1 sentence '" + s.id + "' has no pair id"});
      continue;
    }
    if (s.side && *s.side != Side::L1) {
      result.issues.push_back({K::WrongSide, s.id, "sentence '" + s.id + "' in the L1 corpus is marked L2"});
      continue;
    }
    if (!l1_by_pair.emplace(s.pair_id, &s).second)
      result.issues.push_back({K::DuplicatePairId, s.pair_id, "pair id '" + s.pair_id + "' repeated in the L1 corpus"});
  }

  std::unordered_set<std::string> seen_l2;
  for (const auto& s : l2.sentences) {
    if (s.pair_id.empty()) {
      result.issues.push_back({K::MissingPairId, s.id, "L2 sentence '" + s.id + "' has no pair id"});
      continue;
    }
    if (s.side && *s.side != Side::L2) {
      result.issues.push_back({K::WrongSide, s.id, "sentence '" + s.id + "' in the L2 corpus is marked L1"});
      continue;
    }
    if (!seen_l2.insert(s.pair_id).second) {
      result.issues.push_back({K::DuplicatePairId, s.pair_id, "pair id '" + s.pair_id + "' repeated in the L2 corpus"});
      continue;
    }
    auto partner = l1_by_pair.find(s.pair_id);
    if (partner == l1_by_pair.end()) {
      result.issues.push_back({K::NoL1Counterpart, s.id, "L2 sentence '" + s.id + "' (pair '" + s.pair_id + "') has no L1 counterpart"});
      continue;
    }
    const Alignment* a = alignments.find(s.pair_id);
    if (!a) {
      result.issues.push_back({K::NoAlignment, s.pair_id, "pair '" + s.pair_id + "' has no alignment"});
      continue;
    }
    const AnnotatedSentence& t = *partner->second;
    bool in_range = std::all_of(a->links.begin(), a->links.end(), [&](const auto& link) {
      return link.first < s.length() && link.second < t.length();
    });
    if (!in_range) {
      result.issues.push_back({K::AlignmentOutOfRange, s.pair_id, "alignment for pair '" + s.pair_id + "' has an out-of-range index"});
      continue;
    }
    result.pairs.push_back(SentencePair{s, t, *a});
  }
  for (const auto& [pair_id, s] : l1_by_pair) {
    if (!seen_l2.count(pair_id))
      result.issues.push_back({K::NoL2Counterpart, s->id, "L1 sentence '" + s->id + "' (pair '" + pair_id + "') has no L2 counterpart"});
  }
  // unordered_map iteration above; keep issue listing deterministic
  std::stable_sort(result.issues.begin(), result.issues.end(),
                   [](const PairingIssue& a, const PairingIssue& b) {
                     if (a.kind != b.kind) return a.kind < b.kind;
                     return a.id < b.id;
                   });
  return result;
}

DatasetSplit split_dataset(const std::vector<SentencePair>& pairs, const SplitSpec& spec, std::uint64_t seed) {
  if (spec.dev_pairs_per_lang < 0) throw InsufficientData("dev_pairs_per_lang must be non-negative");
  std::map<Lang, std::vector<std::size_t>> by_lang;
  for (std::size_t i = 0; i < pairs.size(); ++i) by_lang[pairs[i].l2.lang.value_or(Lang::OTHER)].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<bool> in_dev(pairs.size(), false);
  const auto wanted = static_cast<std::size_t>(spec.dev_pairs_per_lang);
  for (auto& [lang, indices] : by_lang) {
    if (indices.size() < wanted)
      throw InsufficientData(std::string(to_string(lang)) + ": " + std::to_string(indices.size()) + " pairs available, " +
                             std::to_string(wanted) + " requested for dev");
    shuffle_in_place(indices, rng);
    for (std::size_t k = 0; k < wanted; ++k) in_dev[indices[k]] = true;
  }

  DatasetSplit split;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (in_dev[i]) {
      split.dev.push_back(pairs[i]);
    } else {
      split.test_l2.push_back(pairs[i].l2);
      split.test_l1.push_back(pairs[i].l1);
    }
  }
  return split;
}

void write_split_file(const DatasetSplit& split, std::ostream& out) {
  for (const auto& p : split.dev) {
    out << p.l2.id << "\tdev\n";
    out << p.l1.id << "\tdev\n";
  }
  for (const auto& s : split.test_l2) out << s.id << "\ttest_l2\n";
  for (const auto& s : split.test_l1) out << s.id << "\ttest_l1\n";
}

std::vector<std::pair<std::string, std::string>> read_split_file(std::istream& in) {
  std::string text(std::istreambuf_iterator<char>(in), {});
  auto lines = split_lines(text);
  check_line_endings_and_encoding(lines);
  std::vector<std::pair<std::string, std::string>> rows;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto cols = split(lines[i], '\t');
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) throw ParseError(i + 1, "expected 'sentence_id<TAB>split'");
    rows.emplace_back(std::string(cols[0]), std::string(cols[1]));
  }
  return rows;
}

}  // namespace l2srl
