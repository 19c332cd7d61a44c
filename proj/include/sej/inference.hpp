#pragma once

// Paired-difference credible intervals. With a normal likelihood and the
// Jeffreys prior p(mu, tau^2) ∝ 1/tau^2, the marginal posterior of the mean
// difference is Student-t with n-1 degrees of freedom, centred at the sample
// mean with scale s/sqrt(n).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sej/scoring.hpp"

namespace sej {

struct PairedDiffResult {
  std::string label;
  int n = 0;
  double mean_diff = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  int unmatched = 0;  // pairs dropped because one side was missing

  nlohmann::json to_json() const;
};

// Throws DegenerateError for n < 2 or zero sample variance, ValidationError
// for a level outside (0, 1).
PairedDiffResult credible_interval(std::span<const double> diffs, double level = 0.95,
                                   std::string label = {});

enum class ScoreSource { McMean, Point };

// Differences score(kind_a) - score(kind_b) paired on (participant, question).
PairedDiffResult compare_kinds(const std::vector<ScoreRecord>& records, ForecastKind kind_a,
                               ForecastKind kind_b, double level = 0.95,
                               ScoreSource source = ScoreSource::McMean);

// direct-pA minus direct-pD over the sets whose pA and pD differ. Absent when
// no such set exists.
std::optional<PairedDiffResult> reflection_effect(const std::vector<ScoreRecord>& records,
                                                  double level = 0.95,
                                                  ScoreSource source = ScoreSource::McMean);

std::string intervals_csv(const std::vector<PairedDiffResult>& results);

}  // namespace sej
