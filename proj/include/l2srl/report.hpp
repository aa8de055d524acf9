#ifndef L2SRL_REPORT_HPP_
#define L2SRL_REPORT_HPP_

#include <string>

#include "json.hpp"
#include "l2srl/srl_eval.hpp"

namespace l2srl {

// Two-decimal percentage, half away from zero.
std::string pct(double value);

std::string render_text(const ScoreReport& report);
// metric<TAB>group<TAB>value rows, with a header line.
std::string render_tsv(const ScoreReport& report);
nlohmann::ordered_json to_json(const ScoreReport& report);

// Square matrix, rows gold and columns predicted, labels sorted with O last.
std::string render_tsv(const ConfusionMatrix& matrix);

std::string render_text(const OracleAnalysis& analysis);
std::string render_tsv(const OracleAnalysis& analysis);
nlohmann::ordered_json to_json(const OracleAnalysis& analysis);

}  // namespace l2srl

#endif  // L2SRL_REPORT_HPP_
