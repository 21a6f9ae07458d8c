#include "churn/period.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace churn {

AlternationSignal build_signal(const OnlineWindow &window,
                               Duration sampling_period) {
  const Duration duration = window.length();
  if (duration < 2 * sampling_period)
    throw std::invalid_argument("build_signal: window shorter than 2T");

  const std::size_t n_samples =
      static_cast<std::size_t>(duration / sampling_period);
  AlternationSignal sig;
  sig.sampling_period = sampling_period;
  sig.samples.resize(n_samples);

  // Intervals abut after gap splitting; a boundary instant belongs to the
  // earlier interval.
  auto it = window.intervals.begin();
  auto ip_at = [&](Timestamp t) {
    while (it != window.intervals.end() && it->end < t) ++it;
    return it == window.intervals.end() ? window.intervals.back().ip : it->ip;
  };

  signed char value = 1;  // X(0)
  Ipv4 prev_ip = ip_at(window.start);
  for (std::size_t n = 1; n <= n_samples; ++n) {
    Ipv4 cur_ip = ip_at(window.start + static_cast<Duration>(n) * sampling_period);
    if (cur_ip != prev_ip) value = -value;
    sig.samples[n - 1] = value;
    prev_ip = cur_ip;
  }
  return sig;
}

Spectrum dft(const AlternationSignal &signal) {
  std::vector<Complex> x(signal.samples.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = Complex(static_cast<double>(signal.samples[i]), 0.0);
  return Spectrum{dft_forward(x), signal.sampling_period};
}

DominantFrequency dominant_frequency(const Spectrum &spectrum) {
  const std::size_t n = spectrum.coefficients.size();
  if (n < 2)
    throw std::invalid_argument("dominant_frequency: spectrum too short");
  const std::size_t hi = n / 2 + 1;  // one-sided, DC excluded
  std::size_t best = 2;
  double best_mag = std::abs(spectrum.coefficients[1]);
  for (std::size_t k = 3; k <= hi; ++k) {
    double mag = std::abs(spectrum.coefficients[k - 1]);
    if (mag > best_mag) {  // ties keep the lower frequency
      best_mag = mag;
      best = k;
    }
  }
  return DominantFrequency{best, spectrum.bin_frequency_cpm(best)};
}

std::vector<double> autocorrelation(const AlternationSignal &signal) {
  const std::size_t n = signal.samples.size();
  std::size_t m = 1;
  while (m < 2 * n) m <<= 1;

  std::vector<Complex> buf(m, Complex{});
  for (std::size_t i = 0; i < n; ++i)
    buf[i] = Complex(static_cast<double>(signal.samples[i]), 0.0);
  fft_pow2(buf, -1);
  for (auto &c : buf) c = Complex(std::norm(c), 0.0);
  fft_pow2(buf, +1);

  const double scale = 1.0 / (static_cast<double>(m) * static_cast<double>(n));
  std::vector<double> rxx(n);
  for (std::size_t lag = 0; lag < n; ++lag) rxx[lag] = buf[lag].real() * scale;
  rxx[0] = 1.0;  // exact for +-1 samples
  return rxx;
}

double confidence(const std::vector<double> &rxx) {
  for (std::size_t i = 1; i + 1 < rxx.size(); ++i) {
    if (rxx[i] > rxx[i - 1] && rxx[i] > rxx[i + 1]) return std::abs(rxx[i]);
  }
  return 0.0;
}

WindowEstimateOutcome estimate_window(const OnlineWindow &window,
                                      const AnalysisConfig &cfg) {
  if (static_cast<int>(window.intervals.size()) < cfg.min_intervals_per_window)
    return {std::nullopt, SkipReason::too_few_intervals};
  if (window.length() < 2 * cfg.sampling_period)
    return {std::nullopt, SkipReason::too_short};

  auto signal = build_signal(window, cfg.sampling_period);
  auto spectrum = dft(signal);
  auto dom = dominant_frequency(spectrum);
  auto rxx = autocorrelation(signal);

  PeriodEstimate est;
  est.frequency_cpm = dom.cycles_per_minute;
  est.period_minutes = 1.0 / (2.0 * dom.cycles_per_minute);
  est.xi = confidence(rxx);
  est.interval_count = static_cast<int>(window.intervals.size());
  est.sample_count = signal.size();
  est.window_length = window.length();
  return {est, SkipReason::none};
}

std::vector<AgentPeriod> agent_periods(
    const std::vector<TaggedEstimate> &estimates,
    const std::map<std::string, AsNumber> &membership) {
  std::map<std::string, std::vector<const PeriodEstimate *>> by_agent;
  for (const auto &e : estimates) by_agent[e.agent_id].push_back(&e.estimate);

  std::vector<AgentPeriod> out;
  for (const auto &[agent, ests] : by_agent) {
    AgentPeriod ap;
    ap.agent_id = agent;
    auto mit = membership.find(agent);
    ap.as_number = mit == membership.end() ? kUnknownAs : mit->second;
    ap.window_count = ests.size();
    double xi_sum = 0.0, wp_sum = 0.0, p_sum = 0.0;
    for (const auto *e : ests) {
      xi_sum += e->xi;
      wp_sum += e->xi * e->period_minutes;
      p_sum += e->period_minutes;
    }
    ap.mean_xi = xi_sum / static_cast<double>(ests.size());
    // zero total weight (all windows aperiodic) falls back to a plain mean
    ap.weighted_period_minutes =
        xi_sum > 0.0 ? wp_sum / xi_sum : p_sum / static_cast<double>(ests.size());
    out.push_back(std::move(ap));
  }
  return out;
}

std::vector<AsPeriodSummary> as_period_summary(
    const std::vector<AgentPeriod> &agents, double xi_threshold) {
  std::map<AsNumber, AsPeriodSummary> by_as;
  for (const auto &a : agents) {
    if (a.mean_xi < xi_threshold) continue;
    if (a.as_number == kUnknownAs) continue;
    auto &s = by_as[a.as_number];
    s.as_number = a.as_number;
    s.agents.push_back(a);
  }
  std::vector<AsPeriodSummary> out;
  for (auto &[as, s] : by_as) {
    s.agent_count = s.agents.size();
    double w_sum = 0.0, wp_sum = 0.0, xi_sum = 0.0;
    for (const auto &a : s.agents) {
      w_sum += a.mean_xi;
      wp_sum += a.mean_xi * a.weighted_period_minutes;
      xi_sum += a.mean_xi;
    }
    double mean;
    if (w_sum > 0.0) {
      mean = wp_sum / w_sum;
    } else {
      mean = 0.0;
      for (const auto &a : s.agents) mean += a.weighted_period_minutes;
      mean /= static_cast<double>(s.agents.size());
    }
    s.weighted_mean_period_minutes = mean;
    s.mean_xi = xi_sum / static_cast<double>(s.agents.size());
    double var = 0.0;
    for (const auto &a : s.agents) {
      double d = a.weighted_period_minutes - mean;
      var += d * d;
    }
    s.period_stddev_minutes =
        std::sqrt(var / static_cast<double>(s.agents.size()));
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(),
            [](const AsPeriodSummary &a, const AsPeriodSummary &b) {
              return a.as_number < b.as_number;
            });
  return out;
}

}  // namespace churn
