#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "melcot/core/error.hpp"
#include "melcot/core/line_set.hpp"
#include "melcot/eval/metrics.hpp"

namespace melcot::eval {

using json = nlohmann::json;

enum class IouAggregation { macro, micro };

struct EvalRow {
  std::string sample_id;
  std::string method;
  std::string dataset;
  // "ok", or the failure that prevented an answer (generation_failed,
  // parse_failed).
  std::string status = "ok";
  std::optional<LineSet> label;
  LineSet predict;
  bool hit = false;
  bool judge_failed = false;
};

struct ReportOptions {
  IouAggregation iou_agg = IouAggregation::macro;
  // Failed samples score IoU 0 and a miss; otherwise they leave the
  // denominators and are only tallied.
  bool failures_as_miss = true;
};

struct Cell {
  std::size_t rows = 0;
  std::size_t excluded = 0;
  std::size_t iou_n = 0;
  double iou_sum = 0;  // macro: sum of per-sample IoU
  std::size_t inter_sum = 0, union_sum = 0;
  std::size_t hit_n = 0, hits = 0;
  std::size_t judge_failures = 0;
  std::map<std::string, std::size_t> drops;
  std::optional<HumanMetrics> human;

  std::optional<double> iou_percent(IouAggregation agg) const {
    if (iou_n == 0) return std::nullopt;
    if (agg == IouAggregation::macro) return 100.0 * iou_sum / static_cast<double>(iou_n);
    return union_sum == 0 ? 0.0
                          : 100.0 * static_cast<double>(inter_sum) / static_cast<double>(union_sum);
  }
  std::optional<double> hit_percent() const {
    if (hit_n == 0) return std::nullopt;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(hit_n);
  }
};

struct Agreement {
  std::string what;
  std::size_t n = 0;
  double kappa = 0;
};

struct EvalReport {
  ReportOptions options;
  std::vector<std::string> methods;   // first-seen order
  std::vector<std::string> datasets;  // first-seen order
  std::map<std::pair<std::string, std::string>, Cell> cells;
  std::vector<Agreement> agreement;

  const Cell* cell(const std::string& method, const std::string& dataset) const {
    auto it = cells.find({method, dataset});
    return it == cells.end() ? nullptr : &it->second;
  }
  bool dataset_has_iou(const std::string& dataset) const {
    for (const auto& m : methods)
      if (auto c = cell(m, dataset); c && c->iou_n > 0) return true;
    return false;
  }
};

inline EvalReport aggregate_report(const std::vector<EvalRow>& rows, const ReportOptions& opt = {},
                                   const std::vector<HumanAnnotation>& annotations = {}) {
  EvalReport rep;
  rep.options = opt;
  auto remember = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  for (const auto& r : rows) {
    remember(rep.methods, r.method);
    remember(rep.datasets, r.dataset);
    Cell& c = rep.cells[{r.method, r.dataset}];
    ++c.rows;
    bool failed = r.status != "ok";
    if (failed) ++c.drops[r.status];
    if (failed && !opt.failures_as_miss) {
      ++c.excluded;
      continue;
    }
    if (r.label && !r.label->empty()) {
      ++c.iou_n;
      if (!failed) {
        auto q = iou(*r.label, r.predict);
        c.iou_sum += q.value();
        auto inter = intersection_size(*r.label, r.predict);
        c.inter_sum += inter;
        c.union_sum += r.label->size() + r.predict.size() - inter;
      } else {
        c.union_sum += r.label->size();
      }
    }
    ++c.hit_n;
    if (!failed && r.hit) ++c.hits;
    if (r.judge_failed) ++c.judge_failures;
  }

  // Human metrics per (method, dataset); rows without a method or dataset
  // apply to the only method or dataset when there is just one.
  std::map<std::pair<std::string, std::string>, std::vector<HumanAnnotation>> human;
  for (const auto& a : annotations) {
    std::string m = a.method.empty() && rep.methods.size() == 1 ? rep.methods[0] : a.method;
    std::string d = a.dataset.empty() && rep.datasets.size() == 1 ? rep.datasets[0] : a.dataset;
    human[{m, d}].push_back(a);
  }
  for (auto& [key, list] : human) {
    remember(rep.methods, key.first);
    remember(rep.datasets, key.second);
    rep.cells[key].human = human_metrics(list);
  }

  if (!annotations.empty()) {
    for (const auto& pk : rater_agreement(annotations))
      rep.agreement.push_back({"raters " + pk.rater_a + " vs " + pk.rater_b, pk.overlap, pk.kappa});
    // Judge against each human rating of the same (method, sample).
    std::map<std::pair<std::string, std::string>, bool> judged;
    for (const auto& r : rows)
      if (r.status == "ok" && !r.judge_failed) judged[{r.method, r.sample_id}] = r.hit;
    std::vector<int> jl, hl;
    for (const auto& a : annotations) {
      std::string m = a.method.empty() && rep.methods.size() == 1 ? rep.methods[0] : a.method;
      auto it = judged.find({m, a.sample_id});
      if (it == judged.end()) continue;
      jl.push_back(it->second);
      hl.push_back(a.human_hit);
    }
    if (jl.size() >= 2) {
      try {
        rep.agreement.push_back({"judge vs human", jl.size(), cohens_kappa(jl, hl)});
      } catch (const Error&) {
      }
    }
  }
  return rep;
}

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// Two decimals, dropping a trailing zero in the second place (25.4, 35.02).
inline std::string format_rate(double v) {
  auto s = fixed(v, 2);
  if (s.size() > 3 && s.back() == '0') s.pop_back();
  return s;
}

inline std::string render_markdown(const EvalReport& rep) {
  auto dash = std::string("-");
  std::string head = "| Method |";
  std::string rule = "|---|";
  for (const auto& d : rep.datasets) {
    std::vector<std::string> cols;
    if (rep.dataset_has_iou(d)) cols.push_back("IoU");
    for (const char* m : {"Hit Rate", "Human Hit", "Human Valuable"}) cols.push_back(m);
    for (const auto& c : cols) {
      head += " " + d + " " + c + " |";
      rule += "---:|";
    }
  }
  std::string out = head + "\n" + rule + "\n";
  for (const auto& m : rep.methods) {
    out += "| " + m + " |";
    for (const auto& d : rep.datasets) {
      const Cell* c = rep.cell(m, d);
      auto show = [&](std::optional<double> v, auto fmt) {
        out += " " + (v ? fmt(*v) : dash) + " |";
      };
      auto two = [](double v) { return fixed(v, 2); };
      if (rep.dataset_has_iou(d)) show(c ? c->iou_percent(rep.options.iou_agg) : std::nullopt, two);
      show(c ? c->hit_percent() : std::nullopt, format_rate);
      show(c && c->human ? std::optional<double>(c->human->human_hit) : std::nullopt, two);
      show(c && c->human ? std::optional<double>(c->human->human_valuable) : std::nullopt, two);
    }
    out += "\n";
  }
  out += "\nIoU aggregation: ";
  out += rep.options.iou_agg == IouAggregation::macro ? "macro" : "micro";
  out += "; failed samples ";
  out += rep.options.failures_as_miss ? "count as IoU 0 and a miss" : "are excluded";
  out += ".\n";
  bool any_drops = false;
  for (const auto& [k, c] : rep.cells) any_drops = any_drops || !c.drops.empty() || c.judge_failures;
  if (any_drops) {
    out += "\n| Method | Dataset | Rows | Failures | Judge failures |\n|---|---|---:|---|---:|\n";
    for (const auto& [k, c] : rep.cells) {
      std::string f;
      for (const auto& [reason, n] : c.drops) f += (f.empty() ? "" : ", ") + reason + "=" + std::to_string(n);
      out += "| " + k.first + " | " + k.second + " | " + std::to_string(c.rows) + " | " +
             (f.empty() ? dash : f) + " | " + std::to_string(c.judge_failures) + " |\n";
    }
  }
  if (!rep.agreement.empty()) {
    out += "\n| Agreement | N | Cohen's kappa |\n|---|---:|---:|\n";
    for (const auto& a : rep.agreement)
      out += "| " + a.what + " | " + std::to_string(a.n) + " | " + fixed(a.kappa, 4) + " |\n";
  }
  return out;
}

inline std::vector<json> report_rows(const EvalReport& rep) {
  std::vector<json> out;
  for (const auto& m : rep.methods) {
    for (const auto& d : rep.datasets) {
      const Cell* c = rep.cell(m, d);
      if (!c) continue;
      json j{{"method", m},
             {"dataset", d},
             {"rows", c->rows},
             {"excluded", c->excluded},
             {"iou_n", c->iou_n},
             {"hit_n", c->hit_n},
             {"hits", c->hits},
             {"judge_failures", c->judge_failures},
             {"drops", c->drops}};
      auto i = c->iou_percent(rep.options.iou_agg);
      j["iou_mean"] = i ? json(*i) : json(nullptr);
      auto h = c->hit_percent();
      j["hit_rate"] = h ? json(*h) : json(nullptr);
      j["human_hit"] = c->human ? json(c->human->human_hit) : json(nullptr);
      j["human_valuable"] = c->human ? json(c->human->human_valuable) : json(nullptr);
      j["human_n"] = c->human ? c->human->rows : 0;
      out.push_back(std::move(j));
    }
  }
  for (const auto& a : rep.agreement)
    out.push_back({{"agreement", a.what}, {"n", a.n}, {"kappa", a.kappa}});
  return out;
}

// Relative change of x against base in percent, cut (not rounded) to two
// decimals.
inline double ratio_percent(double base, double x) {
  if (base == 0) throw Error(Errc::invalid_argument, "ratio against zero");
  double r = (x - base) / base * 100.0;
  double t = std::trunc(r * 100.0 + (r < 0 ? -1e-7 : 1e-7)) / 100.0;
  return t == 0 ? 0.0 : t;
}

inline std::string format_ratio(double base, double x) {
  return fixed(ratio_percent(base, x), 2) + "%";
}

struct AblationRow {
  std::string name;  // "Full", "- Summary", ...
  double iou = 0;
  double hit_rate = 0;
};

// Rows after the first are compared with the first.
inline std::string render_ablation(const std::vector<AblationRow>& rows) {
  if (rows.empty()) throw Error(Errc::invalid_argument, "no ablation rows");
  std::string out = "| Steps | IoU | Ratio | Hit Rate | Ratio |\n|---|---:|---:|---:|---:|\n";
  const auto& full = rows.front();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    out += "| " + r.name + " | " + fixed(r.iou, 2) + " | " +
           (k == 0 ? "-" : format_ratio(full.iou, r.iou)) + " | " + format_rate(r.hit_rate) +
           " | " + (k == 0 ? "-" : format_ratio(full.hit_rate, r.hit_rate)) + " |\n";
  }
  return out;
}

inline std::vector<json> ablation_rows_json(const std::vector<AblationRow>& rows) {
  std::vector<json> out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    json j{{"steps", r.name}, {"iou", r.iou}, {"hit_rate", r.hit_rate}};
    if (k > 0) {
      j["iou_ratio"] = ratio_percent(rows[0].iou, r.iou);
      j["hit_ratio"] = ratio_percent(rows[0].hit_rate, r.hit_rate);
    }
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace melcot::eval
