#ifndef L2SRL_PIPELINE_HPP_
#define L2SRL_PIPELINE_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "l2srl/agreement_filter.hpp"
#include "l2srl/srl_eval.hpp"
#include "l2srl/srl_tagger.hpp"

namespace l2srl {

// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitParse = 2,
  kExitMismatch = 3,
  kExitPairing = 4,
  kExitModelVersion = 5,
};

enum class ExtendWith { L1, L2, Both };

struct PipelineConfig {
  std::string train_path;
  std::string pool_l2_path;
  std::string pool_l1_path;
  std::string alignments = "heuristic";  // path or "heuristic"
  std::string dev_path;                  // optional
  std::string test_l2_path;
  std::string test_l1_path;
  double p = 0.9;
  TrainConfig tagger;
  std::string report_dir;
  bool am_coarse = true;
  ExtendWith extend_with = ExtendWith::L1;
  // Pool files already carry system annotations; otherwise the baseline
  // tagger labels them at their marked predicates.
  bool pool_annotated = false;
};

// Flat "key = value" lines; '#' starts a comment line. Relative paths are
// resolved against base_dir. Unknown keys and bad values throw ConfigError.
PipelineConfig read_pipeline_config(std::istream& in, const std::string& base_dir = {});
PipelineConfig read_pipeline_config_file(const std::string& path);

struct SplitResult {
  std::string split;
  ScoreReport baseline;
  ScoreReport retrained;
};

struct RetrainReport {
  std::vector<SplitResult> splits;
  std::size_t pool_size = 0;
  std::size_t selected = 0;
  std::size_t base_sentences = 0;
  std::size_t extension_sentences = 0;
  bool models_identical = false;
};

// Baseline training, pool tagging, agreement selection, training-set
// extension, retraining and evaluation. Stage artifacts land in numbered
// subdirectories of config.report_dir as they are produced.
RetrainReport run_retrain(const PipelineConfig& config);

std::string render_text(const RetrainReport& report);
std::string render_tsv(const RetrainReport& report);
std::string render_json(const RetrainReport& report);

// Command-line entry point; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace l2srl

#endif  // L2SRL_PIPELINE_HPP_
