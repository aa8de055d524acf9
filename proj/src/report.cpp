#include "l2srl/report.hpp"

#include <cstdio>
#include <sstream>

#include "l2srl/util.hpp"

namespace l2srl {

using nlohmann::ordered_json;

std::string pct(double value) { return format_fixed(value, 2); }

namespace {

double rounded(double value) { return std::stod(pct(value)); }

std::string row(const std::string& name, const Counts& c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s %7s %7s %7s %8ld %9ld %6ld\n", name.c_str(), pct(c.precision()).c_str(),
                pct(c.recall()).c_str(), pct(c.f1()).c_str(), c.matched, c.predicted, c.gold);
  return buf;
}

void text_block(std::ostringstream& out, const std::string& title, const RoleBreakdown& b) {
  out << "[" << title << "]\n";
  out << row("overall", b.total);
  out << row("arguments", b.core);
  out << row("adjuncts", b.adjunct);
  for (const auto& [label, c] : b.per_role) out << row("  " + label, c);
}

void tsv_block(std::ostringstream& out, const std::string& group, const RoleBreakdown& b) {
  auto put = [&](const std::string& prefix, const Counts& c) {
    out << prefix << "P\t" << group << '\t' << pct(c.precision()) << '\n';
    out << prefix << "R\t" << group << '\t' << pct(c.recall()) << '\n';
    out << prefix << "F\t" << group << '\t' << pct(c.f1()) << '\n';
  };
  put("", b.total);
  out << "matched\t" << group << '\t' << b.total.matched << '\n';
  out << "predicted\t" << group << '\t' << b.total.predicted << '\n';
  out << "gold\t" << group << '\t' << b.total.gold << '\n';
  put("Arg-", b.core);
  put("Adj-", b.adjunct);
  for (const auto& [label, c] : b.per_role) put(label + "-", c);
}

ordered_json counts_json(const Counts& c) {
  return ordered_json{{"matched", c.matched},
                      {"predicted", c.predicted},
                      {"gold", c.gold},
                      {"precision", rounded(c.precision())},
                      {"recall", rounded(c.recall())},
                      {"f1", rounded(c.f1())}};
}

ordered_json breakdown_json(const RoleBreakdown& b) {
  ordered_json j = counts_json(b.total);
  j["arguments"] = counts_json(b.core);
  j["adjuncts"] = counts_json(b.adjunct);
  ordered_json roles = ordered_json::object();
  for (const auto& [label, c] : b.per_role) roles[label] = counts_json(c);
  j["per_role"] = roles;
  return j;
}

}  // namespace

std::string render_text(const ScoreReport& report) {
  std::ostringstream out;
  char header[256];
  std::snprintf(header, sizeof header, "%-12s %7s %7s %7s %8s %9s %6s\n", "", "P", "R", "F", "matched", "predicted", "gold");
  out << header;
  text_block(out, "ALL", report);
  for (const auto& g : report.groups) text_block(out, g.key, g.scores);
  if (!report.deltas.empty()) {
    out << "[delta F = F(L2) - F(L1)]\n";
    for (const auto& d : report.deltas)
      out << d.key << "\tL1 " << pct(d.l1_f) << "\tL2 " << pct(d.l2_f) << "\tdF " << pct(d.delta()) << '\n';
  }
  return out.str();
}

std::string render_tsv(const ScoreReport& report) {
  std::ostringstream out;
  out << "metric\tgroup\tvalue\n";
  tsv_block(out, "ALL", report);
  for (const auto& g : report.groups) tsv_block(out, g.key, g.scores);
  for (const auto& d : report.deltas) out << "dF\t" << d.key << '\t' << pct(d.delta()) << '\n';
  return out.str();
}

ordered_json to_json(const ScoreReport& report) {
  ordered_json j = breakdown_json(report);
  if (!report.groups.empty()) {
    ordered_json groups = ordered_json::array();
    for (const auto& g : report.groups) {
      ordered_json gj{{"key", g.key}};
      gj.update(breakdown_json(g.scores));
      groups.push_back(gj);
    }
    j["groups"] = groups;
  }
  if (!report.deltas.empty()) {
    ordered_json deltas = ordered_json::array();
    for (const auto& d : report.deltas)
      deltas.push_back({{"key", d.key}, {"l1_f", rounded(d.l1_f)}, {"l2_f", rounded(d.l2_f)}, {"delta_f", rounded(d.delta())}});
    j["delta_f"] = deltas;
  }
  return j;
}

std::string render_tsv(const ConfusionMatrix& matrix) {
  auto labels = matrix.labels();
  std::ostringstream out;
  out << "gold\\pred";
  for (const auto& l : labels) out << '\t' << l;
  out << '\n';
  for (const auto& g : labels) {
    out << g;
    for (const auto& p : labels) out << '\t' << matrix.at(g, p);
    out << '\n';
  }
  return out.str();
}

std::string render_text(const OracleAnalysis& analysis) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-10s %7s %9s\n", "stage", "F", "rel.impr");
  out << buf;
  std::snprintf(buf, sizeof buf, "%-10s %7s %9s\n", "Orig.", pct(analysis.original.f1()).c_str(), "-");
  out << buf;
  for (const auto& s : analysis.stages) {
    std::snprintf(buf, sizeof buf, "%-10s %7s %9s\n", std::string(to_string(s.kind)).c_str(), pct(s.f1).c_str(),
                  pct(s.relative_improvement).c_str());
    out << buf;
  }
  return out.str();
}

std::string render_tsv(const OracleAnalysis& analysis) {
  std::ostringstream out;
  out << "stage\tF\trelative_improvement\n";
  for (const auto& s : analysis.stages)
    out << to_string(s.kind) << '\t' << pct(s.f1) << '\t' << pct(s.relative_improvement) << '\n';
  return out.str();
}

ordered_json to_json(const OracleAnalysis& analysis) {
  ordered_json stages = ordered_json::array();
  for (const auto& s : analysis.stages) {
    ordered_json sj{{"stage", std::string(to_string(s.kind))}};
    sj.update(counts_json(s.counts));
    sj["relative_improvement"] = rounded(s.relative_improvement);
    stages.push_back(sj);
  }
  return ordered_json{{"original", counts_json(analysis.original)}, {"stages", stages}};
}

}  // namespace l2srl
