#include "l2srl/srl_tagger.hpp"

#include <algorithm>
#include <istream>
#include <iterator>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include "l2srl/util.hpp"

namespace l2srl {

LabelSet::LabelSet() : LabelSet(std::vector<PositionTag>{PositionTag::outside(), PositionTag::predicate()}) {}

LabelSet::LabelSet(std::vector<PositionTag> tags) : tags_(std::move(tags)) {
  using K = PositionTag::Kind;
  std::set<RoleLabel> roles;
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    if (!index_.emplace(tags_[i].str(), static_cast<int>(i)).second)
      throw std::invalid_argument("repeated label " + tags_[i].str());
    if (!tags_[i].is_outside() && !tags_[i].is_rel()) roles.insert(tags_[i].label());
  }
  if (find(PositionTag::outside()) < 0 || find(PositionTag::predicate()) < 0)
    throw std::invalid_argument("label set must contain O and rel");
  for (const auto& r : roles)
    for (K k : {K::S, K::B, K::I, K::E})
      if (find(PositionTag(k, r)) < 0) throw std::invalid_argument("label set not closed: missing " + PositionTag(k, r).str());
  rel_ = find(PositionTag::predicate());
}

LabelSet LabelSet::for_roles(std::span<const RoleLabel> roles) {
  using K = PositionTag::Kind;
  std::set<RoleLabel> sorted(roles.begin(), roles.end());
  std::vector<PositionTag> tags{PositionTag::outside(), PositionTag::predicate()};
  for (const auto& r : sorted)
    for (K k : {K::S, K::B, K::I, K::E}) tags.emplace_back(k, r);
  return LabelSet(std::move(tags));
}

LabelSet LabelSet::from_corpus(const Corpus& corpus) {
  std::vector<RoleLabel> roles;
  for (const auto& s : corpus.sentences)
    for (const auto& f : s.frames)
      for (const auto& sp : f.spans) roles.push_back(sp.label);
  return for_roles(roles);
}

int LabelSet::find(const PositionTag& tag) const {
  auto it = index_.find(tag.str());
  return it == index_.end() ? -1 : it->second;
}

namespace {

std::string distance_bucket(int d) {
  if (d == 0) return "0";
  const char* sign = d > 0 ? "+" : "-";
  int a = std::abs(d);
  if (a <= 2) return sign + std::to_string(a);
  if (a <= 5) return std::string(sign) + "3..5";
  return std::string(sign) + ">5";
}

}  // namespace

std::vector<std::string> extract_features(const AnnotatedSentence& s, int predicate_index, int position) {
  auto word = [&](int i) -> std::string {
    if (i < 1) return "<s>";
    if (i > s.length()) return "</s>";
    return s.tokens[static_cast<std::size_t>(i - 1)].form;
  };
  const std::string w = word(position), prev = word(position - 1), next = word(position + 1);
  const std::string p = word(predicate_index);
  const std::string dist = distance_bucket(position - predicate_index);

  std::vector<std::string> f{
      "w=" + w,
      "w-1=" + prev,
      "w+1=" + next,
      "w-1|w=" + prev + "|" + w,
      "w|w+1=" + w + "|" + next,
      "p=" + p,
      "p-1=" + word(predicate_index - 1),
      "p+1=" + word(predicate_index + 1),
      "dist=" + dist,
      "w|p=" + w + "|" + p,
      "d|p=" + dist + "|" + p,
  };
  if (position == predicate_index)
    f.emplace_back("is_pred");
  else
    f.emplace_back(position < predicate_index ? "side=L" : "side=R");
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  return f;
}

TaggerModel::TaggerModel(LabelSet labels)
    : labels_(std::move(labels)), transitions_(labels_.size() * labels_.size(), 0.0) {}

int TaggerModel::feature_id(std::string_view feature) const {
  auto it = feature_ids_.find(std::string(feature));
  return it == feature_ids_.end() ? -1 : it->second;
}

int TaggerModel::intern(std::string_view feature) {
  auto [it, inserted] = feature_ids_.emplace(std::string(feature), static_cast<int>(features_.size()));
  if (inserted) {
    features_.emplace_back(feature);
    emissions_.resize(emissions_.size() + labels_.size(), 0.0);
  }
  return it->second;
}

double TaggerModel::emission(std::string_view feature, std::size_t label) const {
  int id = feature_id(feature);
  return id < 0 ? 0.0 : emissions_[static_cast<std::size_t>(id) * labels_.size() + label];
}

void TaggerModel::set_emission(std::string_view feature, std::size_t label, double weight) {
  int id = intern(feature);
  emissions_[static_cast<std::size_t>(id) * labels_.size() + label] = weight;
}

namespace {

using FeatureIds = std::vector<std::vector<int>>;  // per position

// Constraint tables shared by decoding and scoring.
struct Grammar {
  std::size_t labels;
  std::vector<char> start, end, follow;  // follow[prev * L + cur]

  explicit Grammar(const LabelSet& ls) : labels(ls.size()), start(labels), end(labels), follow(labels * labels) {
    for (std::size_t a = 0; a < labels; ++a) {
      start[a] = transition_allowed(nullptr, ls[a]);
      end[a] = may_end_sequence(ls[a]);
      for (std::size_t b = 0; b < labels; ++b) follow[a * labels + b] = transition_allowed(&ls[a], ls[b]);
    }
  }
};

FeatureIds lookup_features(const TaggerModel& model, const AnnotatedSentence& s, int predicate_index) {
  FeatureIds ids(static_cast<std::size_t>(s.length()));
  for (int i = 1; i <= s.length(); ++i)
    for (const auto& f : extract_features(s, predicate_index, i)) {
      int id = model.feature_id(f);
      if (id >= 0) ids[static_cast<std::size_t>(i - 1)].push_back(id);
    }
  return ids;
}

std::vector<double> emission_scores(const FeatureIds& ids, const std::vector<double>& weights, std::size_t L) {
  std::vector<double> emit(ids.size() * L, 0.0);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (int f : ids[i])
      for (std::size_t l = 0; l < L; ++l) emit[i * L + l] += weights[static_cast<std::size_t>(f) * L + l];
  return emit;
}

std::vector<std::size_t> viterbi(const LabelSet& ls, const Grammar& g, const std::vector<double>& emit,
                                 const std::vector<double>& trans, std::size_t n, std::size_t pred0) {
  const std::size_t L = ls.size();
  const auto rel = static_cast<std::size_t>(ls.rel_index());
  constexpr double kNeg = -std::numeric_limits<double>::infinity();
  std::vector<double> score(n * L, kNeg);
  std::vector<std::size_t> back(n * L, 0);
  auto allowed_at = [&](std::size_t i, std::size_t l) { return (i == pred0) == (l == rel); };

  for (std::size_t l = 0; l < L; ++l)
    if (allowed_at(0, l) && g.start[l]) score[l] = emit[l];
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t l = 0; l < L; ++l) {
      if (!allowed_at(i, l)) continue;
      double best = kNeg;
      std::size_t arg = 0;
      for (std::size_t p = 0; p < L; ++p) {
        double prev = score[(i - 1) * L + p];
        if (prev == kNeg || !g.follow[p * L + l]) continue;
        double s = prev + trans[p * L + l];
        if (s > best) {
          best = s;
          arg = p;
        }
      }
      if (best == kNeg) continue;
      score[i * L + l] = best + emit[i * L + l];
      back[i * L + l] = arg;
    }
  }
  double best = kNeg;
  std::size_t last = 0;
  for (std::size_t l = 0; l < L; ++l) {
    double s = score[(n - 1) * L + l];
    if (s != kNeg && g.end[l] && s > best) {
      best = s;
      last = l;
    }
  }
  std::vector<std::size_t> path(n);
  path[n - 1] = last;
  for (std::size_t i = n - 1; i > 0; --i) path[i - 1] = back[i * L + path[i]];
  return path;
}

void check_predicate(const AnnotatedSentence& s, int predicate_index) {
  if (predicate_index < 1 || predicate_index > s.length())
    throw InvalidPredicateIndex("predicate index " + std::to_string(predicate_index) + " outside sentence '" + s.id +
                                "' of length " + std::to_string(s.length()));
}

}  // namespace

std::vector<PositionTag> viterbi_decode(const TaggerModel& model, const AnnotatedSentence& s, int predicate_index) {
  check_predicate(s, predicate_index);
  const LabelSet& ls = model.labels();
  Grammar g(ls);
  auto emit = emission_scores(lookup_features(model, s, predicate_index), model.emission_weights(), ls.size());
  auto path = viterbi(ls, g, emit, model.transition_weights(), static_cast<std::size_t>(s.length()),
                      static_cast<std::size_t>(predicate_index - 1));
  std::vector<PositionTag> tags;
  tags.reserve(path.size());
  for (std::size_t l : path) tags.push_back(ls[l]);
  return tags;
}

double sequence_score(const TaggerModel& model, const AnnotatedSentence& s, int predicate_index,
                      std::span<const PositionTag> tags) {
  const LabelSet& ls = model.labels();
  double total = 0;
  int prev = -1;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    int l = ls.find(tags[i]);
    if (l < 0) throw std::invalid_argument("tag " + tags[i].str() + " not in model label set");
    for (const auto& f : extract_features(s, predicate_index, static_cast<int>(i) + 1))
      total += model.emission(f, static_cast<std::size_t>(l));
    if (prev >= 0) total += model.transition(static_cast<std::size_t>(prev), static_cast<std::size_t>(l));
    prev = l;
  }
  return total;
}

TaggerModel train(const Corpus& corpus, const TrainConfig& config) {
  if (config.epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  TaggerModel model(LabelSet::from_corpus(corpus));
  const LabelSet& ls = model.labels();
  const std::size_t L = ls.size();

  struct Sequence {
    FeatureIds features;
    std::vector<std::size_t> gold;
    std::size_t pred0;
  };
  std::vector<Sequence> sequences;
  for (const auto& s : corpus.sentences) {
    for (const auto& f : s.frames) {
      Sequence seq;
      seq.pred0 = static_cast<std::size_t>(f.predicate_index - 1);
      for (const auto& t : tags_from_spans(f, s.length())) seq.gold.push_back(static_cast<std::size_t>(ls.find(t)));
      for (int i = 1; i <= s.length(); ++i) {
        std::vector<int> ids;
        for (const auto& feat : extract_features(s, f.predicate_index, i)) ids.push_back(model.intern(feat));
        seq.features.push_back(std::move(ids));
      }
      sequences.push_back(std::move(seq));
    }
  }
  if (sequences.empty()) throw EmptyCorpus("training corpus contains no frames");

  Grammar g(ls);
  std::vector<double>& w = model.emission_weights();
  std::vector<double>& tw = model.transition_weights();
  // Lazy averaging: u accumulates step * update so the average is w - u / step.
  std::vector<double> u(w.size(), 0.0), tu(tw.size(), 0.0);
  double step = 1.0;
  auto bump = [&](std::vector<double>& weights, std::vector<double>& acc, std::size_t k, double delta) {
    weights[k] += delta;
    acc[k] += step * delta;
  };

  std::vector<std::size_t> order(sequences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_in_place(order, rng);
    for (std::size_t idx : order) {
      const Sequence& seq = sequences[idx];
      auto emit = emission_scores(seq.features, w, L);
      auto guess = viterbi(ls, g, emit, tw, seq.gold.size(), seq.pred0);
      if (guess != seq.gold) {
        for (std::size_t i = 0; i < guess.size(); ++i) {
          if (guess[i] != seq.gold[i]) {
            for (int f : seq.features[i]) {
              bump(w, u, static_cast<std::size_t>(f) * L + seq.gold[i], 1.0);
              bump(w, u, static_cast<std::size_t>(f) * L + guess[i], -1.0);
            }
          }
          if (i > 0 && (guess[i] != seq.gold[i] || guess[i - 1] != seq.gold[i - 1])) {
            bump(tw, tu, seq.gold[i - 1] * L + seq.gold[i], 1.0);
            bump(tw, tu, guess[i - 1] * L + guess[i], -1.0);
          }
        }
      }
      step += 1.0;
    }
  }
  if (config.averaging) {
    for (std::size_t k = 0; k < w.size(); ++k) w[k] -= u[k] / step;
    for (std::size_t k = 0; k < tw.size(); ++k) tw[k] -= tu[k] / step;
  }
  return model;
}

AnnotatedSentence tag(const TaggerModel& model, const AnnotatedSentence& sentence, std::span<const int> predicate_indices) {
  std::vector<int> preds(predicate_indices.begin(), predicate_indices.end());
  std::sort(preds.begin(), preds.end());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    check_predicate(sentence, preds[i]);
    if (i > 0 && preds[i] == preds[i - 1])
      throw InvalidPredicateIndex("predicate index " + std::to_string(preds[i]) + " repeated");
  }
  AnnotatedSentence out = sentence;
  out.frames.clear();
  for (int p : preds) {
    auto tags = viterbi_decode(model, sentence, p);
    out.frames.push_back(spans_from_tags(tags, DecodeMode::Strict));
  }
  return out;
}

Corpus tag_corpus(const TaggerModel& model, const Corpus& corpus) {
  Corpus out;
  out.sentences.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) {
    std::vector<int> preds;
    for (const auto& f : s.frames) preds.push_back(f.predicate_index);
    out.sentences.push_back(tag(model, s, preds));
  }
  return out;
}

void save_model(const TaggerModel& model, std::ostream& out) {
  const LabelSet& ls = model.labels();
  const std::size_t L = ls.size();
  out << kModelHeader << '\n';
  for (std::size_t l = 0; l < L; ++l) out << (l ? "\t" : "") << ls[l].str();
  out << '\n';

  std::vector<std::size_t> order(model.feature_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& names = model.features();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
  const auto& w = model.emission_weights();
  for (std::size_t f : order)
    for (std::size_t l = 0; l < L; ++l) {
      double v = w[f * L + l];
      if (v != 0.0) out << "E\t" << names[f] << '\t' << ls[l].str() << '\t' << format_shortest(v) << '\n';
    }
  for (std::size_t a = 0; a < L; ++a)
    for (std::size_t b = 0; b < L; ++b) {
      double v = model.transition(a, b);
      if (v != 0.0) out << "T\t" << ls[a].str() << '\t' << ls[b].str() << '\t' << format_shortest(v) << '\n';
    }
}

TaggerModel load_model(std::istream& in) {
  std::string text(std::istreambuf_iterator<char>(in), {});
  if (text.empty()) throw ParseError(1, "empty model file");
  if (text.back() != '\n') throw ParseError(0, "model file truncated (no final newline)");
  text.pop_back();
  auto lines = split(text, '\n');

  std::string_view header = lines[0];
  if (header != kModelHeader) {
    if (header.substr(0, 9) == "SRLMODEL ") throw VersionMismatch("unsupported model version '" + std::string(header.substr(9)) + "'");
    throw ParseError(1, "missing 'SRLMODEL v1' header");
  }
  if (lines.size() < 2) throw ParseError(2, "missing label set line");

  std::vector<PositionTag> tags;
  for (auto t : split(lines[1], '\t')) {
    try {
      tags.push_back(PositionTag::parse(t));
    } catch (const std::invalid_argument& e) {
      throw ParseError(2, e.what());
    }
  }
  TaggerModel model;
  try {
    model = TaggerModel(LabelSet(std::move(tags)));
  } catch (const std::invalid_argument& e) {
    throw ParseError(2, e.what());
  }
  const LabelSet& ls = model.labels();

  auto label_at = [&](std::string_view text, std::size_t lineno) {
    int l = -1;
    try {
      l = ls.find(PositionTag::parse(text));
    } catch (const std::invalid_argument&) {
    }
    if (l < 0) throw ParseError(lineno, "unknown label '" + std::string(text) + "'");
    return static_cast<std::size_t>(l);
  };

  std::set<std::pair<std::string, std::size_t>> seen_e;
  std::set<std::pair<std::size_t, std::size_t>> seen_t;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    auto cols = split(lines[i], '\t');
    if (cols.size() != 4 || (cols[0] != "E" && cols[0] != "T")) throw ParseError(lineno, "expected 'E|T<TAB>a<TAB>b<TAB>weight'");
    auto weight = parse_double(cols[3]);
    if (!weight) throw ParseError(lineno, "bad weight '" + std::string(cols[3]) + "'");
    if (cols[0] == "E") {
      if (cols[1].empty()) throw ParseError(lineno, "empty feature name");
      std::size_t l = label_at(cols[2], lineno);
      if (!seen_e.emplace(std::string(cols[1]), l).second) throw ParseError(lineno, "repeated emission entry");
      model.set_emission(cols[1], l, *weight);
    } else {
      std::size_t a = label_at(cols[1], lineno), b = label_at(cols[2], lineno);
      if (!seen_t.emplace(a, b).second) throw ParseError(lineno, "repeated transition entry");
      model.set_transition(a, b, *weight);
    }
  }
  return model;
}

}  // namespace l2srl
