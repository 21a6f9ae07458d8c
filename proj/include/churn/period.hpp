#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "churn/fft.hpp"
#include "churn/model.hpp"

namespace churn {

// +-1 square signal sampled every T across one online window. samples[j]
// holds X(j+1) at time window.start + (j+1)*T; X(0) = +1 is implicit.
struct AlternationSignal {
  std::vector<signed char> samples;
  Duration sampling_period = kMinute;

  std::size_t size() const { return samples.size(); }
};

struct Spectrum {
  std::vector<Complex> coefficients;  // coefficients[k-1] = Y(k), k = 1..N
  Duration sampling_period = kMinute;

  // Bin k (1-based) maps to (k-1)/(N*T) cycles per minute.
  double bin_frequency_cpm(std::size_t k) const {
    return static_cast<double>(k - 1) /
           (static_cast<double>(coefficients.size()) *
            static_cast<double>(sampling_period) / 60.0);
  }
};

struct DominantFrequency {
  std::size_t bin = 0;  // 1-based k*
  double cycles_per_minute = 0.0;
};

enum class SkipReason { none, too_few_intervals, too_short };

struct PeriodEstimate {
  double frequency_cpm = 0.0;
  double period_minutes = 0.0;  // P = 1/(2F)
  double xi = 0.0;
  int interval_count = 0;
  std::size_t sample_count = 0;
  Duration window_length = 0;
};

struct WindowEstimateOutcome {
  std::optional<PeriodEstimate> estimate;
  SkipReason skip = SkipReason::none;
};

AlternationSignal build_signal(const OnlineWindow &window, Duration sampling_period);

Spectrum dft(const AlternationSignal &signal);

// Argmax of |Y(k)| over the one-sided spectrum k = 2 .. floor(N/2)+1 (DC
// excluded); ties break toward the lower frequency.
DominantFrequency dominant_frequency(const Spectrum &spectrum);

// Biased linear autocorrelation, lags 0..N-1: R(n) = sum X(m)X(m-n) / N with
// out-of-range terms contributing zero. R(0) == 1 for +-1 signals.
std::vector<double> autocorrelation(const AlternationSignal &signal);

// |R(i)| at the smallest positive lag that is a strict local maximum; 0 when
// no interior strict local maximum exists.
double confidence(const std::vector<double> &rxx);

WindowEstimateOutcome estimate_window(const OnlineWindow &window,
                                      const AnalysisConfig &cfg);

struct AgentPeriod {
  std::string agent_id;
  AsNumber as_number = kUnknownAs;
  double mean_xi = 0.0;            // over all estimated windows
  double weighted_period_minutes = 0.0;  // xi-weighted over windows
  std::size_t window_count = 0;
};

struct AsPeriodSummary {
  AsNumber as_number = kUnknownAs;
  double weighted_mean_period_minutes = 0.0;
  double period_stddev_minutes = 0.0;
  double mean_xi = 0.0;
  std::size_t agent_count = 0;
  std::vector<AgentPeriod> agents;
};

struct TaggedEstimate {
  std::string agent_id;
  PeriodEstimate estimate;
};

// Per agent: mean xi and xi-weighted mean period over its windows. Per AS
// (membership = agent -> AS): mean period over member agents weighted by
// their mean xi; agents with mean xi below the threshold are excluded, and
// ASes with no qualifying agents are omitted. Sorted by as_number.
std::vector<AgentPeriod> agent_periods(
    const std::vector<TaggedEstimate> &estimates,
    const std::map<std::string, AsNumber> &membership);

std::vector<AsPeriodSummary> as_period_summary(
    const std::vector<AgentPeriod> &agents, double xi_threshold);

}  // namespace churn
