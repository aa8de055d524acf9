#include "l2srl/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "l2srl/report.hpp"
#include "l2srl/util.hpp"

namespace fs = std::filesystem;

namespace l2srl {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + value + "'");
}

ExtendWith parse_extend_with(const std::string& value) {
  if (value == "l1") return ExtendWith::L1;
  if (value == "l2") return ExtendWith::L2;
  if (value == "both") return ExtendWith::Both;
  throw ConfigError("extend_with must be l1, l2 or both, got '" + value + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string model_bytes(const TaggerModel& model) {
  std::ostringstream out;
  save_model(model, out);
  return out.str();
}

std::string corpus_bytes(const Corpus& corpus) {
  std::ostringstream out;
  write_corpus(corpus, out);
  return out.str();
}

AlignmentTable build_alignments(const std::string& spec, const Corpus& l2, const Corpus& l1) {
  return spec == "heuristic" ? heuristic_align_corpora(l2, l1) : read_alignments_file(spec);
}

}  // namespace

PipelineConfig read_pipeline_config(std::istream& in, const std::string& base_dir) {
  PipelineConfig c;
  std::set<std::string> seen;
  auto resolve = [&](const std::string& v) {
    if (v.empty() || v == "heuristic") return v;
    fs::path p(v);
    return (p.is_absolute() || base_dir.empty() ? p : fs::path(base_dir) / p).string();
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": repeated key '" + key + "'");

    if (key == "train") c.train_path = resolve(value);
    else if (key == "pool_l2") c.pool_l2_path = resolve(value);
    else if (key == "pool_l1") c.pool_l1_path = resolve(value);
    else if (key == "alignments") c.alignments = resolve(value);
    else if (key == "dev") c.dev_path = resolve(value);
    else if (key == "test_l2") c.test_l2_path = resolve(value);
    else if (key == "test_l1") c.test_l1_path = resolve(value);
    else if (key == "report_dir") c.report_dir = resolve(value);
    else if (key == "p") {
      auto p = parse_double(value);
      if (!p || *p < 0 || *p > 1) throw ConfigError("p must be a number in [0, 1], got '" + value + "'");
      c.p = *p;
    } else if (key == "epochs") {
      auto n = parse_int(value);
      if (!n || *n < 1) throw ConfigError("epochs must be a positive integer, got '" + value + "'");
      c.tagger.epochs = *n;
    } else if (key == "seed") {
      auto n = parse_int(value);
      if (!n || *n < 0) throw ConfigError("seed must be a non-negative integer, got '" + value + "'");
      c.tagger.seed = static_cast<std::uint64_t>(*n);
    } else if (key == "averaging") c.tagger.averaging = parse_bool(key, value);
    else if (key == "am_coarse") c.am_coarse = parse_bool(key, value);
    else if (key == "extend_with") c.extend_with = parse_extend_with(value);
    else if (key == "pool_annotations") {
      if (value == "imported") c.pool_annotated = true;
      else if (value == "tag") c.pool_annotated = false;
      else throw ConfigError("pool_annotations must be 'tag' or 'imported', got '" + value + "'");
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }

  for (auto [name, value] : {std::pair{"train", &c.train_path}, {"pool_l2", &c.pool_l2_path}, {"pool_l1", &c.pool_l1_path},
                             {"test_l2", &c.test_l2_path}, {"test_l1", &c.test_l1_path}, {"report_dir", &c.report_dir}})
    if (value->empty()) throw ConfigError(std::string("missing required key '") + name + "'");
  return c;
}

PipelineConfig read_pipeline_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return read_pipeline_config(in, fs::path(path).parent_path().string());
}

RetrainReport run_retrain(const PipelineConfig& config) {
  for (const std::string* p : {&config.train_path, &config.pool_l2_path, &config.pool_l1_path, &config.test_l2_path,
                               &config.test_l1_path, &config.dev_path, &config.alignments}) {
    if (p->empty() || *p == "heuristic") continue;
    if (!fs::exists(*p)) throw ConfigError("path does not exist: " + *p);
  }
  const fs::path root(config.report_dir);
  fs::create_directories(root);
  const ScoreOptions score_options{config.am_coarse};
  RetrainReport report;

  // 1. baseline
  Corpus base = read_corpus_file(config.train_path);
  report.base_sentences = base.sentences.size();
  TaggerModel baseline = train(base, config.tagger);
  const std::string baseline_bytes = model_bytes(baseline);
  write_text(root / "01_baseline" / "model.txt", baseline_bytes);

  // 2. pool annotations
  ReadOptions pool_read;
  pool_read.mode = config.pool_annotated ? DecodeMode::Lenient : DecodeMode::Strict;
  Corpus pool_l2 = read_corpus_file(config.pool_l2_path, pool_read);
  Corpus pool_l1 = read_corpus_file(config.pool_l1_path, pool_read);
  if (!config.pool_annotated) {
    pool_l2 = tag_corpus(baseline, pool_l2);
    pool_l1 = tag_corpus(baseline, pool_l1);
  }
  write_text(root / "02_pool" / "pool_l2.conll", corpus_bytes(pool_l2));
  write_text(root / "02_pool" / "pool_l1.conll", corpus_bytes(pool_l1));

  // 3. selection
  const AlignmentTable alignments = build_alignments(config.alignments, pool_l2, pool_l1);
  PairingResult paired = pair_corpora(pool_l2, pool_l1, alignments);
  paired.require_complete();
  std::vector<PairRecall> recalls;
  recalls.reserve(paired.pairs.size());
  for (const auto& pair : paired.pairs) recalls.push_back(recall_pair(pair, AgreementOptions{config.am_coarse}));
  SelectionResult selection = select(recalls, SelectionConfig{config.p});
  report.pool_size = selection.pool_size;
  report.selected = selection.selected.size();
  {
    std::ostringstream tsv;
    write_selection_report(recalls, selection, tsv);
    write_text(root / "03_selection" / "selection.tsv", tsv.str());
  }

  // 4. extension
  Corpus extended = base;
  for (std::size_t i : selection.selected) {
    const SentencePair& pair = paired.pairs[i];
    if (config.extend_with != ExtendWith::L1) extended.sentences.push_back(pair.l2);
    if (config.extend_with != ExtendWith::L2) extended.sentences.push_back(pair.l1);
  }
  report.extension_sentences = extended.sentences.size() - base.sentences.size();
  {
    std::set<std::string> ids;
    for (const auto& s : extended.sentences)
      if (!ids.insert(s.id).second) throw ConfigError("sentence id '" + s.id + "' occurs in both training and pool data");
  }
  write_text(root / "04_extended" / "train.conll", corpus_bytes(extended));

  // 5. retrain
  TaggerModel retrained = train(extended, config.tagger);
  const std::string retrained_bytes = model_bytes(retrained);
  write_text(root / "05_retrained" / "model.txt", retrained_bytes);
  report.models_identical = baseline_bytes == retrained_bytes;

  // 6. evaluation
  std::vector<std::pair<std::string, std::string>> splits;
  if (!config.dev_path.empty()) splits.emplace_back("dev", config.dev_path);
  splits.emplace_back("test_l2", config.test_l2_path);
  splits.emplace_back("test_l1", config.test_l1_path);
  for (const auto& [name, path] : splits) {
    Corpus gold = read_corpus_file(path);
    Corpus before = tag_corpus(baseline, gold);
    Corpus after = tag_corpus(retrained, gold);
    write_text(root / "06_eval" / (name + ".baseline.conll"), corpus_bytes(before));
    write_text(root / "06_eval" / (name + ".retrained.conll"), corpus_bytes(after));
    report.splits.push_back({name, score(before, gold, score_options), score(after, gold, score_options)});
  }

  // 7. report
  write_text(root / "report.txt", render_text(report));
  write_text(root / "report.tsv", render_tsv(report));
  write_text(root / "report.json", render_json(report));
  return report;
}

std::string render_text(const RetrainReport& r) {
  std::ostringstream out;
  out << "pool pairs: " << r.pool_size << "\nselected: " << r.selected << " ("
      << pct(r.pool_size ? 100.0 * static_cast<double>(r.selected) / static_cast<double>(r.pool_size) : 0.0)
      << "%)\ntraining sentences: " << r.base_sentences << " + " << r.extension_sentences << '\n';
  out << "split      baseline F  retrained F  delta\n";
  for (const auto& s : r.splits) {
    double b = s.baseline.total.f1(), a = s.retrained.total.f1();
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-10s %10s %12s %6s\n", s.split.c_str(), pct(b).c_str(), pct(a).c_str(), pct(a - b).c_str());
    out << buf;
  }
  return out.str();
}

std::string render_tsv(const RetrainReport& r) {
  std::ostringstream out;
  out << "metric\tgroup\tvalue\n";
  out << "pool\tALL\t" << r.pool_size << "\nselected\tALL\t" << r.selected << "\nextension\tALL\t" << r.extension_sentences << '\n';
  for (const auto& s : r.splits) {
    auto put = [&](const std::string& metric, const Counts& before, const Counts& after) {
      out << metric << "-F-baseline\t" << s.split << '\t' << pct(before.f1()) << '\n';
      out << metric << "-F-retrained\t" << s.split << '\t' << pct(after.f1()) << '\n';
      out << metric << "-dF\t" << s.split << '\t' << pct(after.f1() - before.f1()) << '\n';
    };
    put("ALL", s.baseline.total, s.retrained.total);
    std::set<std::string> roles;
    for (const auto& [k, _] : s.baseline.per_role) roles.insert(k);
    for (const auto& [k, _] : s.retrained.per_role) roles.insert(k);
    for (const auto& k : roles) {
      auto get = [&](const ScoreReport& rep) {
        auto it = rep.per_role.find(k);
        return it == rep.per_role.end() ? Counts{} : it->second;
      };
      put(k, get(s.baseline), get(s.retrained));
    }
  }
  return out.str();
}

std::string render_json(const RetrainReport& r) {
  nlohmann::ordered_json j;
  j["pool_size"] = r.pool_size;
  j["selected"] = r.selected;
  j["base_sentences"] = r.base_sentences;
  j["extension_sentences"] = r.extension_sentences;
  j["models_identical"] = r.models_identical;
  nlohmann::ordered_json splits = nlohmann::ordered_json::array();
  for (const auto& s : r.splits) {
    splits.push_back({{"split", s.split},
                      {"baseline", to_json(s.baseline)},
                      {"retrained", to_json(s.retrained)},
                      {"delta_f", std::stod(pct(s.retrained.total.f1() - s.baseline.total.f1()))}});
  }
  j["splits"] = splits;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// command line

namespace {

struct GlobalFlags {
  bool am_coarse = false;
  std::uint64_t seed = 1;
  std::string out_dir;
  std::string format = "text";
};

struct Emitted {
  std::string text, tsv, json;
};

void emit(const Emitted& e, const GlobalFlags& g, std::ostream& out) {
  if (g.format == "tsv") out << e.tsv;
  else if (g.format == "json") out << e.json;
  else out << e.text;
  if (!g.out_dir.empty()) {
    write_text(fs::path(g.out_dir) / "report.txt", e.text);
    write_text(fs::path(g.out_dir) / "report.tsv", e.tsv);
    write_text(fs::path(g.out_dir) / "report.json", e.json);
  }
}

Emitted emitted(const ScoreReport& r) { return {render_text(r), render_tsv(r), to_json(r).dump(2) + "\n"}; }

GroupBy parse_group_by(const std::string& s) {
  if (s == "lang") return GroupBy::Lang;
  if (s == "side") return GroupBy::Side;
  if (s == "lang,side" || s == "side,lang" || s == "lang×side" || s == "langxside") return GroupBy::LangSide;
  throw ConfigError("--group-by must be lang, side or lang,side");
}

int exit_code_for(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitParse;
  } catch (const MismatchedCorpora& e) {
    err << "corpus mismatch: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const MissingMetadata& e) {
    err << "missing metadata: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const PairingError& e) {
    err << "pairing error: " << e.what() << '\n';
    return kExitPairing;
  } catch (const VersionMismatch& e) {
    err << "model version mismatch: " << e.what() << '\n';
    return kExitModelVersion;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantic role labeling toolkit for learner/native parallel corpora", "l2srl"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_flag("--am-coarse", g.am_coarse, "Collapse AM-<subtype> adjunct labels to AM when scoring");
  auto* seed_opt = app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out_dir, "Output directory for report and data files");
  app.add_option("--format", g.format, "Report format on stdout")->check(CLI::IsMember({"text", "tsv", "json"}));

  std::function<void()> action;
  bool lenient = false;

  // score
  std::string pred_path, gold_path, group_by;
  bool with_confusion = false;
  auto* score_cmd = app.add_subcommand("score", "Span-level P/R/F of predictions against gold");
  score_cmd->add_option("pred", pred_path)->required();
  score_cmd->add_option("gold", gold_path)->required();
  score_cmd->add_option("--group-by", group_by, "lang, side or lang,side");
  score_cmd->add_flag("--confusion", with_confusion, "Also emit the label confusion matrix");
  score_cmd->add_flag("--lenient", lenient, "Repair ill-formed predicted tag columns instead of rejecting them");
  score_cmd->callback([&] {
    action = [&] {
      ReadOptions pred_read;
      if (lenient) pred_read.mode = DecodeMode::Lenient;
      Corpus pred = read_corpus_file(pred_path, pred_read);
      Corpus gold = read_corpus_file(gold_path);
      ScoreOptions opts{g.am_coarse};
      ScoreReport r = group_by.empty() ? score(pred, gold, opts) : score_grouped(pred, gold, parse_group_by(group_by), opts);
      emit(emitted(r), g, out);
      if (with_confusion) {
        std::string tsv = render_tsv(confusion_matrix(pred, gold, opts));
        if (g.out_dir.empty()) out << "\n" << tsv;
        else write_text(fs::path(g.out_dir) / "confusion.tsv", tsv);
      }
    };
  });

  // iaa
  std::string a_path, b_path;
  auto* iaa_cmd = app.add_subcommand("iaa", "Inter-annotator agreement per language and side");
  iaa_cmd->add_option("annotator_a", a_path)->required();
  iaa_cmd->add_option("annotator_b", b_path)->required();
  iaa_cmd->callback([&] {
    action = [&] {
      Corpus a = read_corpus_file(a_path);
      Corpus b = read_corpus_file(b_path);
      ScoreReport r = iaa(a, b, ScoreOptions{g.am_coarse});
      emit(emitted(r), g, out);
    };
  });

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Sequential oracle transformation analysis");
  oracle_cmd->add_option("pred", pred_path)->required();
  oracle_cmd->add_option("gold", gold_path)->required();
  oracle_cmd->add_flag("--lenient", lenient, "Repair ill-formed predicted tag columns");
  oracle_cmd->callback([&] {
    action = [&] {
      ReadOptions pred_read;
      if (lenient) pred_read.mode = DecodeMode::Lenient;
      Corpus pred = read_corpus_file(pred_path, pred_read);
      Corpus gold = read_corpus_file(gold_path);
      OracleAnalysis a = oracle_sequence(pred, gold, ScoreOptions{g.am_coarse});
      emit({render_text(a), render_tsv(a), to_json(a).dump(2) + "\n"}, g, out);
    };
  });

  // tuples
  std::string corpus_path;
  auto* tuples_cmd = app.add_subcommand("tuples", "List <predicate, argument, role> word tuples");
  tuples_cmd->add_option("corpus", corpus_path)->required();
  tuples_cmd->callback([&] {
    action = [&] {
      Corpus c = read_corpus_file(corpus_path);
      std::ostringstream tsv;
      tsv << "sentence_id\tpredicate\targument\trole\tpredicate_form\targument_form\n";
      for (const auto& s : c.sentences)
        for (const auto& t : extract_tuples(s))
          tsv << s.id << '\t' << t.predicate << '\t' << t.argument << '\t' << t.role.str() << '\t'
              << s.tokens[static_cast<std::size_t>(t.predicate - 1)].form << '\t'
              << s.tokens[static_cast<std::size_t>(t.argument - 1)].form << '\n';
      out << tsv.str();
      if (!g.out_dir.empty()) write_text(fs::path(g.out_dir) / "tuples.tsv", tsv.str());
    };
  });

  // align
  std::string l2_path, l1_path;
  auto* align_cmd = app.add_subcommand("align", "Heuristic word alignment of paired corpora (Pharaoh format)");
  align_cmd->add_option("l2", l2_path)->required();
  align_cmd->add_option("l1", l1_path)->required();
  align_cmd->callback([&] {
    action = [&] {
      Corpus l2 = read_corpus_file(l2_path), l1 = read_corpus_file(l1_path);
      std::ostringstream text;
      write_alignments(build_alignments("heuristic", l2, l1), text);
      out << text.str();
      if (!g.out_dir.empty()) write_text(fs::path(g.out_dir) / "alignments.txt", text.str());
    };
  });

  // select
  std::string align_spec = "heuristic";
  double p = 0.9;
  bool am_fine = false;
  auto* select_cmd = app.add_subcommand("select", "Agreement-based selection of consistent L2-L1 pairs");
  select_cmd->add_option("l2", l2_path)->required();
  select_cmd->add_option("l1", l1_path)->required();
  select_cmd->add_option("--align", align_spec, "Alignment file, or 'heuristic'");
  select_cmd->add_option("-p,--threshold", p, "Both recalls must exceed this")->check(CLI::Range(0.0, 1.0));
  select_cmd->add_flag("--am-fine", am_fine, "Match adjunct subtypes exactly instead of as bare AM");
  select_cmd->add_flag("--lenient", lenient, "Repair ill-formed tag columns");
  select_cmd->callback([&] {
    action = [&] {
      ReadOptions read;
      if (lenient) read.mode = DecodeMode::Lenient;
      Corpus l2 = read_corpus_file(l2_path, read), l1 = read_corpus_file(l1_path, read);
      PairingResult paired = pair_corpora(l2, l1, build_alignments(align_spec, l2, l1));
      paired.require_complete();
      std::vector<PairRecall> recalls;
      for (const auto& pair : paired.pairs) recalls.push_back(recall_pair(pair, AgreementOptions{!am_fine}));
      SelectionResult sel = select(recalls, SelectionConfig{p});
      std::ostringstream tsv;
      write_selection_report(recalls, sel, tsv);
      Corpus chosen_l2, chosen_l1;
      for (std::size_t i : sel.selected) {
        chosen_l2.sentences.push_back(paired.pairs[i].l2);
        chosen_l1.sentences.push_back(paired.pairs[i].l1);
      }
      const fs::path dir = g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir);
      write_text(dir / "selection.tsv", tsv.str());
      write_text(dir / "selected_l2.conll", corpus_bytes(chosen_l2));
      write_text(dir / "selected_l1.conll", corpus_bytes(chosen_l1));
      out << "pool\t" << sel.pool_size << "\nselected\t" << sel.selected.size() << "\nratio\t" << format_fixed(sel.ratio(), 4)
          << '\n';
    };
  });

  // split
  int dev_per_lang = 50;
  auto* split_cmd = app.add_subcommand("split", "Dev/test split of paired corpora");
  split_cmd->add_option("l2", l2_path)->required();
  split_cmd->add_option("l1", l1_path)->required();
  split_cmd->add_option("--align", align_spec, "Alignment file, or 'heuristic'");
  split_cmd->add_option("--dev", dev_per_lang, "Dev pairs per language")->check(CLI::NonNegativeNumber);
  split_cmd->callback([&] {
    action = [&] {
      Corpus l2 = read_corpus_file(l2_path), l1 = read_corpus_file(l1_path);
      PairingResult paired = pair_corpora(l2, l1, build_alignments(align_spec, l2, l1));
      paired.require_complete();
      DatasetSplit split = split_dataset(paired.pairs, SplitSpec{dev_per_lang}, g.seed);
      Corpus dev, test_l2{split.test_l2}, test_l1{split.test_l1};
      for (const auto& pair : split.dev) {
        dev.sentences.push_back(pair.l2);
        dev.sentences.push_back(pair.l1);
      }
      std::ostringstream splits;
      write_split_file(split, splits);
      const fs::path dir = g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir);
      write_text(dir / "splits.tsv", splits.str());
      write_text(dir / "dev.conll", corpus_bytes(dev));
      write_text(dir / "test_l2.conll", corpus_bytes(test_l2));
      write_text(dir / "test_l1.conll", corpus_bytes(test_l1));
      out << "dev_pairs\t" << split.dev.size() << "\ntest_l2\t" << split.test_l2.size() << "\ntest_l1\t"
          << split.test_l1.size() << '\n';
    };
  });

  // train
  std::string model_path;
  int epochs = 10;
  bool no_averaging = false;
  auto* train_cmd = app.add_subcommand("train", "Train the linear-chain SRL tagger");
  train_cmd->add_option("corpus", corpus_path)->required();
  train_cmd->add_option("-m,--model", model_path, "Model file to write")->required();
  train_cmd->add_option("--epochs", epochs)->check(CLI::PositiveNumber);
  train_cmd->add_flag("--no-averaging", no_averaging);
  train_cmd->callback([&] {
    action = [&] {
      Corpus c = read_corpus_file(corpus_path);
      TaggerModel m = train(c, TrainConfig{epochs, g.seed, !no_averaging});
      write_text(model_path, model_bytes(m));
    };
  });

  // tag
  std::string output_path;
  auto* tag_cmd = app.add_subcommand("tag", "Label the marked predicates of a corpus with a trained model");
  tag_cmd->add_option("model", model_path)->required();
  tag_cmd->add_option("corpus", corpus_path)->required();
  tag_cmd->add_option("-o,--output", output_path, "Corpus file to write (default: stdout)");
  tag_cmd->callback([&] {
    action = [&] {
      std::ifstream in(model_path, std::ios::binary);
      if (!in) throw std::runtime_error("cannot open " + model_path);
      TaggerModel m = load_model(in);
      ReadOptions read;
      read.mode = DecodeMode::Lenient;
      Corpus tagged = tag_corpus(m, read_corpus_file(corpus_path, read));
      std::string bytes = corpus_bytes(tagged);
      if (output_path.empty()) out << bytes;
      else write_text(output_path, bytes);
    };
  });

  // retrain
  std::string config_path;
  bool pool_annotations = false;
  auto* retrain_cmd = app.add_subcommand("retrain", "Selection-and-retraining loop driven by a key=value config");
  retrain_cmd->add_option("config", config_path)->required();
  retrain_cmd->add_flag("--pool-annotations", pool_annotations, "Pool files already carry system annotations");
  std::string extend_with;
  retrain_cmd->add_option("--extend-with", extend_with, "Side(s) of selected pairs added to training: l1, l2 or both")
      ->check(CLI::IsMember({"l1", "l2", "both"}));
  retrain_cmd->callback([&] {
    action = [&] {
      PipelineConfig c = read_pipeline_config_file(config_path);
      if (pool_annotations) c.pool_annotated = true;
      if (!extend_with.empty()) c.extend_with = parse_extend_with(extend_with);
      if (seed_opt->count() > 0) c.tagger.seed = g.seed;
      if (!g.out_dir.empty()) c.report_dir = g.out_dir;
      RetrainReport r = run_retrain(c);
      if (g.format == "tsv") out << render_tsv(r);
      else if (g.format == "json") out << render_json(r);
      else out << render_text(r);
    };
  });

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> argv_storage;
  argv_storage.emplace_back("l2srl");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitFailure;
  }
  return exit_code_for(err, action);
}

}  // namespace l2srl
