#include "sej/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <set>
#include <thread>

#include "sej/csv.hpp"
#include "sej/error.hpp"
#include "sej/rng.hpp"

namespace sej {

std::string_view kind_name(ForecastKind kind) {
  switch (kind) {
    case ForecastKind::DirectA: return "direct-pA";
    case ForecastKind::DirectD: return "direct-pD";
    case ForecastKind::EUM: return "EUM";
    case ForecastKind::ARA: return "ARA";
    case ForecastKind::ARU: return "ARU";
    case ForecastKind::MNL: return "MNL";
  }
  return "?";
}

std::optional<ForecastKind> parse_kind(std::string_view text) {
  for (ForecastKind k : kAllKinds) {
    if (text == kind_name(k)) return k;
  }
  return std::nullopt;
}

ForecastKind kind_for(RuleTag tag) {
  switch (tag) {
    case RuleTag::EUM: return ForecastKind::EUM;
    case RuleTag::ARA: return ForecastKind::ARA;
    case RuleTag::ARU: return ForecastKind::ARU;
    case RuleTag::MNL: return ForecastKind::MNL;
  }
  return ForecastKind::EUM;
}

double brier(double forecast, int outcome) {
  if (outcome != 0 && outcome != 1) throw ValidationError("outcome must be 0 or 1");
  const double d = forecast - outcome;
  return d * d;
}

double ScoreRecord::mc_mean() const {
  if (scores.empty()) return point_score;
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

double ScoreRecord::mc_sd() const {
  if (scores.size() < 2) return 0.0;
  const double m = mc_mean();
  double ss = 0.0;
  for (double s : scores) ss += (s - m) * (s - m);
  return std::sqrt(ss / static_cast<double>(scores.size() - 1));
}

RecompositionRule resolve_rule(RuleTag tag, const KnowledgeLevel& knowledge,
                               const ScoringConfig& config) {
  if (tag != RuleTag::ARA) return RecompositionRule::make(tag, std::nullopt);
  const double sigma2 = config.sigma2_override ? *config.sigma2_override
                                               : sigma2_for(knowledge, config.sigma_map);
  return RecompositionRule::ara(sigma2, config.ara_scale);
}

std::uint64_t record_seed(std::uint64_t base, std::string_view participant,
                          std::string_view question, ForecastKind kind) {
  std::string label(participant);
  label += '\x1f';
  label += question;
  label += '\x1f';
  label += kind_name(kind);
  return derive_seed(base, label);
}

std::vector<ScoreRecord> score_set(const JudgmentSet& js, std::optional<int> outcome,
                                   const ScoringConfig& config, BetaFitCache& cache) {
  if (!outcome) {
    throw ValidationError("no outcome recorded for question " + js.question_id);
  }
  if (config.n_mc < 1) throw ValidationError("n_mc must be positive");
  js.require_complete();
  const int o = *outcome;

  auto base_record = [&](ForecastKind kind, double point_forecast) {
    ScoreRecord r;
    r.participant_id = js.participant_id;
    r.question_id = js.question_id;
    r.kind = kind;
    r.knowledge = js.knowledge->level();
    r.point_forecast = point_forecast;
    r.point_score = brier(point_forecast, o);
    r.seed = record_seed(config.seed, js.participant_id, js.question_id, kind);
    r.scores.reserve(static_cast<std::size_t>(config.n_mc));
    return r;
  };

  std::vector<ScoreRecord> out;
  for (auto [kind, response] : {std::pair{ForecastKind::DirectA, *js.pA},
                                std::pair{ForecastKind::DirectD, *js.pD}}) {
    auto r = base_record(kind, midpoint(response).value());
    const auto model = cache.get(response, config.fit);
    for (double f : sample_values(model, config.n_mc, r.seed)) r.scores.push_back(brier(f, o));
    out.push_back(std::move(r));
  }

  const auto model_b = cache.get(*js.pB, config.fit);
  const auto model_c = cache.get(*js.pC, config.fit);
  const double pB = midpoint(*js.pB).value();
  const double pC = midpoint(*js.pC).value();
  for (RuleTag tag : config.rules) {
    const auto rule = resolve_rule(tag, *js.knowledge, config);
    auto r = base_record(kind_for(tag), rule.apply(pB, pC));
    for (double f : recompose_mc(model_b, model_c, rule, config.n_mc, r.seed)) {
      r.scores.push_back(brier(f, o));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ScoreRecord> score_all(const std::vector<JudgmentSet>& sets,
                                   const std::map<std::string, int>& outcomes,
                                   const ScoringConfig& config, BetaFitCache& cache,
                                   unsigned threads) {
  std::vector<const JudgmentSet*> resolved;
  for (const auto& js : sets) {
    if (outcomes.count(js.question_id)) resolved.push_back(&js);
  }
  std::vector<std::vector<ScoreRecord>> per_set(resolved.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, resolved.size())));

  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](unsigned w) {
    try {
      for (std::size_t i = w; i < resolved.size(); i += threads) {
        const auto& js = *resolved[i];
        per_set[i] = score_set(js, outcomes.at(js.question_id), config, cache);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<ScoreRecord> out;
  for (auto& v : per_set) {
    for (auto& r : v) out.push_back(std::move(r));
  }
  return out;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw ValidationError("empirical CDF needs at least one value");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

std::vector<EmpiricalCdf::Step> EmpiricalCdf::steps() const {
  std::vector<Step> out;
  const double n = static_cast<double>(sorted_.size());
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
    out.push_back({sorted_[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

std::vector<EmpiricalCdf::Step> EmpiricalCdf::on_grid(double step) const {
  if (!(step > 0.0 && step <= 1.0)) throw ValidationError("CDF grid step must lie in (0, 1]");
  std::vector<Step> out;
  const auto count = static_cast<int>(std::llround(1.0 / step));
  for (int i = 0; i <= count; ++i) {
    const double x = i == count ? 1.0 : i * step;
    out.push_back({x, (*this)(x)});
  }
  return out;
}

GroupedCdfs cdf_by_group(const std::vector<ScoreRecord>& records, CdfGroupBy group_by,
                         const KnowledgeTiers& tiers,
                         const std::vector<std::string>& expected_questions) {
  std::map<std::string, std::map<ForecastKind, std::vector<double>>> pooled;
  for (const auto& r : records) {
    const std::string group = group_by == CdfGroupBy::KnowledgeTier ? tiers.tier(r.knowledge) : r.question_id;
    auto& bucket = pooled[group][r.kind];
    if (r.scores.empty()) bucket.push_back(r.point_score);
    else bucket.insert(bucket.end(), r.scores.begin(), r.scores.end());
  }
  GroupedCdfs out;
  for (auto& [group, kinds] : pooled) {
    auto& target = out.groups[group];
    for (auto& [kind, values] : kinds) target.emplace(kind, EmpiricalCdf(std::move(values)));
  }
  const auto& expected = group_by == CdfGroupBy::KnowledgeTier ? tiers.order : expected_questions;
  for (const auto& g : expected) {
    if (!out.groups.count(g)) out.notices.push_back("group '" + g + "' has no score records; omitted");
  }
  return out;
}

std::string scores_csv(const std::vector<ScoreRecord>& records) {
  std::string out = "participant_id,question_id,kind,point_score,mc_mean,mc_sd\n";
  for (const auto& r : records) {
    out += csv_field(r.participant_id) + "," + csv_field(r.question_id) + "," +
           std::string(kind_name(r.kind)) + "," + fixed6(r.point_score) + "," + fixed6(r.mc_mean()) +
           "," + fixed6(r.mc_sd()) + "\n";
  }
  return out;
}

std::string cdf_csv(const std::map<ForecastKind, EmpiricalCdf>& cdfs, double grid_step) {
  std::string out = "kind,x,F\n";
  for (const auto& [kind, cdf] : cdfs) {
    for (const auto& s : cdf.on_grid(grid_step)) {
      out += std::string(kind_name(kind)) + "," + fixed6(s.x) + "," + fixed6(s.F) + "\n";
    }
  }
  return out;
}

}  // namespace sej
