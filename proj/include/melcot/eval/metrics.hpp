#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "melcot/core/error.hpp"
#include "melcot/core/io.hpp"
#include "melcot/core/line_set.hpp"
#include "melcot/core/text.hpp"

namespace melcot::eval {

// Exact non-negative fraction in lowest terms.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw Error(Errc::invalid_argument, "zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    auto g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  bool operator==(const Rational& o) const noexcept { return num_ == o.num_ && den_ == o.den_; }
  bool operator<(const Rational& o) const noexcept {
    return static_cast<__int128>(num_) * o.den_ < static_cast<__int128>(o.num_) * den_;
  }
  bool operator<=(const Rational& o) const noexcept { return !(o < *this); }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline std::size_t intersection_size(const LineSet& a, const LineSet& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

inline Rational iou(const LineSet& label, const LineSet& predict) {
  if (label.empty()) throw Error(Errc::empty_label, "empty label set");
  auto inter = intersection_size(label, predict);
  auto uni = label.size() + predict.size() - inter;
  return Rational(static_cast<std::int64_t>(inter), static_cast<std::int64_t>(uni));
}

struct HitVerdict {
  std::string sample_id;
  bool hit = false;
  std::string judge_raw;
  // Judge reply never parsed, or the judge was unreachable.
  bool judge_failed = false;
};

inline double hit_rate(const std::vector<HitVerdict>& verdicts) {
  if (verdicts.empty()) throw Error(Errc::invalid_argument, "hit rate over zero samples");
  std::size_t hits = 0;
  for (const auto& v : verdicts) hits += v.hit ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(verdicts.size());
}

// Chance-corrected agreement of two raters over the same items. Labels may
// be any integers; expected agreement is the product of the marginals.
inline double cohens_kappa(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw Error(Errc::invalid_argument, "rater vectors differ in length");
  if (a.empty()) throw Error(Errc::invalid_argument, "kappa over zero items");
  const double n = static_cast<double>(a.size());
  std::map<int, double> ma, mb;
  double agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma[a[i]] += 1;
    mb[b[i]] += 1;
    if (a[i] == b[i]) agree += 1;
  }
  double po = agree / n;
  double pe = 0;
  for (const auto& [label, ca] : ma) {
    auto it = mb.find(label);
    if (it != mb.end()) pe += (ca / n) * (it->second / n);
  }
  if (pe >= 1.0) {
    if (a == b) return 1.0;
    throw Error(Errc::invalid_argument, "kappa undefined: expected agreement is 1");
  }
  return (po - pe) / (1.0 - pe);
}

inline double cohens_kappa(const std::vector<bool>& a, const std::vector<bool>& b) {
  std::vector<int> ia(a.begin(), a.end()), ib(b.begin(), b.end());
  return cohens_kappa(ia, ib);
}

struct HumanAnnotation {
  std::string sample_id;
  std::string rater_id;
  bool human_hit = false;
  bool human_valuable = false;
  std::string method;
  std::string dataset;
};

struct HumanMetrics {
  double human_hit = 0;
  double human_valuable = 0;
  std::size_t rows = 0;
};

inline HumanMetrics human_metrics(const std::vector<HumanAnnotation>& rows) {
  if (rows.empty()) throw Error(Errc::invalid_argument, "no annotations");
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::size_t hit = 0, valuable = 0;
  for (const auto& r : rows) {
    if (!seen.insert({r.method, r.rater_id, r.sample_id}).second)
      throw Error(Errc::import_error, "duplicate annotation by " + r.rater_id + " for " +
                                          r.sample_id);
    hit += r.human_hit ? 1 : 0;
    valuable += r.human_valuable ? 1 : 0;
  }
  double n = static_cast<double>(rows.size());
  return {100.0 * static_cast<double>(hit) / n, 100.0 * static_cast<double>(valuable) / n,
          rows.size()};
}

namespace detail {

// RFC 4180 records: quoted fields may hold separators, doubled quotes and
// line breaks.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view s) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quoted) {
      if (c == '"' && i + 1 < s.size() && s[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw Error(Errc::import_error, "unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline bool parse_flag(std::string_view v, std::size_t row) {
  auto t = text::to_lower(text::trim(v));
  if (t == "1" || t == "true" || t == "yes" || t == "y") return true;
  if (t == "0" || t == "false" || t == "no" || t == "n") return false;
  throw Error(Errc::import_error, "row " + std::to_string(row) + ": bad flag '" + std::string(v) + "'");
}

}  // namespace detail

// Delimited table with a header naming at least sample_id, rater_id,
// human_hit and human_valuable; method and dataset columns are optional.
inline std::vector<HumanAnnotation> parse_annotations(std::string_view csv) {
  auto rows = detail::parse_csv(csv);
  if (rows.empty()) throw Error(Errc::import_error, "annotation table is empty");
  std::map<std::string, std::size_t> col;
  for (std::size_t k = 0; k < rows[0].size(); ++k)
    col[text::to_lower(text::trim(rows[0][k]))] = k;
  for (const char* need : {"sample_id", "rater_id", "human_hit", "human_valuable"})
    if (!col.count(need)) throw Error(Errc::import_error, std::string("missing column ") + need);
  auto get = [&](const std::vector<std::string>& r, const std::string& name, std::size_t rowno) {
    auto it = col.find(name);
    if (it == col.end()) return std::string();
    if (it->second >= r.size())
      throw Error(Errc::import_error, "row " + std::to_string(rowno) + ": too few fields");
    return std::string(text::trim(r[it->second]));
  };
  std::vector<HumanAnnotation> out;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    HumanAnnotation a;
    a.sample_id = get(r, "sample_id", i + 1);
    a.rater_id = get(r, "rater_id", i + 1);
    a.human_hit = detail::parse_flag(get(r, "human_hit", i + 1), i + 1);
    a.human_valuable = detail::parse_flag(get(r, "human_valuable", i + 1), i + 1);
    a.method = get(r, "method", i + 1);
    a.dataset = get(r, "dataset", i + 1);
    if (a.sample_id.empty() || a.rater_id.empty())
      throw Error(Errc::import_error, "row " + std::to_string(i + 1) + ": empty id");
    if (!seen.insert({a.method, a.rater_id, a.sample_id}).second)
      throw Error(Errc::import_error, "row " + std::to_string(i + 1) + ": duplicate (rater " +
                                          a.rater_id + ", sample " + a.sample_id + ")");
    out.push_back(std::move(a));
  }
  return out;
}

inline std::vector<HumanAnnotation> load_annotations(const std::filesystem::path& path) {
  return parse_annotations(io::read_file(path));
}

struct PairKappa {
  std::string rater_a;
  std::string rater_b;
  std::size_t overlap = 0;
  double kappa = 0;
};

// Kappa on human_hit for every rater pair that shares at least two samples.
inline std::vector<PairKappa> rater_agreement(const std::vector<HumanAnnotation>& rows) {
  std::map<std::string, std::map<std::pair<std::string, std::string>, bool>> by_rater;
  for (const auto& r : rows) by_rater[r.rater_id][{r.method, r.sample_id}] = r.human_hit;
  std::vector<PairKappa> out;
  for (auto a = by_rater.begin(); a != by_rater.end(); ++a) {
    for (auto b = std::next(a); b != by_rater.end(); ++b) {
      std::vector<int> la, lb;
      for (const auto& [key, v] : a->second) {
        auto it = b->second.find(key);
        if (it == b->second.end()) continue;
        la.push_back(v);
        lb.push_back(it->second);
      }
      if (la.size() < 2) continue;
      double k = 0;
      try {
        k = cohens_kappa(la, lb);
      } catch (const Error&) {
        continue;
      }
      out.push_back({a->first, b->first, la.size(), k});
    }
  }
  return out;
}

}  // namespace melcot::eval
