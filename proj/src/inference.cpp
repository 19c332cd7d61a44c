#include "sej/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "sej/csv.hpp"
#include "sej/error.hpp"
#include "sej/special.hpp"

namespace sej {

nlohmann::json PairedDiffResult::to_json() const {
  return {{"comparison", label}, {"n", n},           {"mean_diff", mean_diff}, {"ci_low", ci_low},
          {"ci_high", ci_high},  {"level", level},   {"unmatched", unmatched}};
}

PairedDiffResult credible_interval(std::span<const double> diffs, double level, std::string label) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("credible level must lie in (0,1)");
  const auto n = diffs.size();
  if (n < 2) throw DegenerateError("credible interval needs at least two differences");
  const auto [lo, hi] = std::minmax_element(diffs.begin(), diffs.end());
  if (*lo == *hi) throw DegenerateError("credible interval undefined for zero-variance differences");
  const double mean = std::accumulate(diffs.begin(), diffs.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double d : diffs) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw DegenerateError("credible interval undefined for zero-variance differences");

  const double t = special::student_t_quantile(0.5 * (1.0 + level), static_cast<double>(n - 1));
  const double half = t * sd / std::sqrt(static_cast<double>(n));
  PairedDiffResult r;
  r.label = std::move(label);
  r.n = static_cast<int>(n);
  r.mean_diff = mean;
  r.ci_low = mean - half;
  r.ci_high = mean + half;
  r.level = level;
  return r;
}

namespace {

using Key = std::pair<std::string, std::string>;

std::map<Key, const ScoreRecord*> index_kind(const std::vector<ScoreRecord>& records, ForecastKind kind) {
  std::map<Key, const ScoreRecord*> out;
  for (const auto& r : records) {
    if (r.kind == kind) out[{r.participant_id, r.question_id}] = &r;
  }
  return out;
}

double value_of(const ScoreRecord& r, ScoreSource source) {
  return source == ScoreSource::McMean ? r.mc_mean() : r.point_score;
}

}  // namespace

PairedDiffResult compare_kinds(const std::vector<ScoreRecord>& records, ForecastKind kind_a,
                               ForecastKind kind_b, double level, ScoreSource source) {
  const auto a = index_kind(records, kind_a);
  const auto b = index_kind(records, kind_b);
  std::vector<double> diffs;
  int unmatched = 0;
  for (const auto& [key, ra] : a) {
    auto it = b.find(key);
    if (it == b.end()) {
      ++unmatched;
      continue;
    }
    diffs.push_back(value_of(*ra, source) - value_of(*it->second, source));
  }
  for (const auto& [key, rb] : b) {
    if (!a.count(key)) ++unmatched;
  }
  auto result = credible_interval(diffs, level,
                                  std::string(kind_name(kind_a)) + " - " + std::string(kind_name(kind_b)));
  result.unmatched = unmatched;
  return result;
}

std::optional<PairedDiffResult> reflection_effect(const std::vector<ScoreRecord>& records,
                                                  double level, ScoreSource source) {
  const auto a = index_kind(records, ForecastKind::DirectA);
  const auto d = index_kind(records, ForecastKind::DirectD);
  std::vector<double> diffs;
  int unmatched = 0;
  for (const auto& [key, ra] : a) {
    auto it = d.find(key);
    if (it == d.end()) {
      ++unmatched;
      continue;
    }
    if (ra->point_forecast == it->second->point_forecast) continue;
    diffs.push_back(value_of(*ra, source) - value_of(*it->second, source));
  }
  if (diffs.empty()) return std::nullopt;
  auto result = credible_interval(diffs, level, "direct-pA - direct-pD (revised sets)");
  result.unmatched = unmatched;
  return result;
}

std::string intervals_csv(const std::vector<PairedDiffResult>& results) {
  std::string out = "comparison,n,mean,lo,hi\n";
  for (const auto& r : results) {
    out += csv_field(r.label) + "," + std::to_string(r.n) + "," + fixed6(r.mean_diff) + "," +
           fixed6(r.ci_low) + "," + fixed6(r.ci_high) + "\n";
  }
  return out;
}

}  // namespace sej
