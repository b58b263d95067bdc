#pragma once

// Sparse channel generation, BPSK training signals, single trials and the
// seeded Monte-Carlo runner.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparselms/analysis.hpp"
#include "sparselms/basis.hpp"
#include "sparselms/filters.hpp"
#include "sparselms/random.hpp"

namespace sparselms {

enum class TapLaw { GaussianUnit, PlusMinusOne };

struct ChannelSpec {
  std::size_t n = 16;
  std::size_t sparsity = 1;
  TapLaw tap_law = TapLaw::PlusMinusOne;
  /// Sparsity domain; null means the time domain.
  std::shared_ptr<const OrthonormalBasis> domain;
  /// Rescale the drawn channel to unit energy.
  bool normalize = false;
};

struct Channel {
  Vector taps;                       // time-domain CIR
  std::vector<std::size_t> support;  // sorted nonzero positions in the sparsity domain
};

Channel gen_channel(const ChannelSpec& spec, Rng& rng);
std::vector<double> gen_bpsk(std::size_t len, Rng& rng);

/// Noise variance for a target SNR with unit-power input:
/// sigma2 = ||w||^2 * 10^(-snr_db / 10).
double sigma_from_snr(double snr_db, const Vector& channel);

struct NoiseSpec {
  enum class Mode { FixedVariance, SnrDb };
  Mode mode = Mode::FixedVariance;
  double value = 0.0;

  static NoiseSpec fixed(double variance) { return {Mode::FixedVariance, variance}; }
  static NoiseSpec snr_db(double db) { return {Mode::SnrDb, db}; }

  double variance_for(const Vector& channel) const;
};

enum class Metric { Mse, Emse, SqErr, Alpha, Beta };
inline constexpr std::size_t kMetricCount = 5;

std::string_view metric_name(Metric m) noexcept;
std::optional<Metric> parse_metric(std::string_view name) noexcept;

struct FilterConfig {
  std::string label;
  FilterParams params;
  /// Sparsity basis for the penalty; null means time domain.
  std::shared_ptr<const OrthonormalBasis> basis;
  /// Oracle filters take their support from the channel of each run.
  bool oracle_true_support = true;
};

struct TrialOptions {
  std::size_t iterations = 1000;
  std::vector<Metric> metrics{Metric::Mse, Metric::Emse, Metric::SqErr};
  /// Iterations k (1-based, counted in updates) at which to keep (w_k, w_{k-1}).
  std::vector<std::size_t> snapshot_at;
  /// eps used by the alpha/beta metrics for filters that are not RL1.
  double analysis_eps = 0.05;
  /// ||w_k||_2 above this aborts the trial.
  double divergence_threshold = 1e6;
};

/// Per-iteration series for one filter; entry k-1 is measured on w_k.
struct FilterTrace {
  std::array<std::vector<double>, kMetricCount> series;
  std::vector<StateSnapshot> snapshots;
  WeightState final_state;

  const std::vector<double>& operator[](Metric m) const {
    return series[static_cast<std::size_t>(m)];
  }
};

struct TrialRecord {
  Channel channel;
  double noise_variance = 0.0;
  std::vector<FilterTrace> filters;
};

/// Simulates d_k = w^T x_k + n_k with BPSK input and a zero-initialized
/// delay line, running every filter on the same realization.
TrialRecord run_trial(const Channel& channel, std::span<const FilterConfig> filters,
                      const TrialOptions& options, double noise_variance, Rng& rng);

/// Single-filter convenience overload.
TrialRecord run_trial(const Channel& channel, const FilterConfig& filter,
                      const TrialOptions& options, double noise_variance, Rng& rng);

struct Experiment {
  ChannelSpec channel;
  NoiseSpec noise = NoiseSpec::fixed(0.01);
  std::vector<FilterConfig> filters;
  TrialOptions trial;
  std::size_t runs = 1;
  std::uint64_t seed = 1;
  /// 0 selects std::thread::hardware_concurrency().
  std::size_t threads = 1;
  /// Trailing fraction of iterations averaged for steady-state values.
  double steady_fraction = 0.2;
};

struct SeriesStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // sample standard deviation across runs
  bool operator==(const SeriesStats&) const = default;
};

struct SteadyStats {
  double mean = 0.0;
  double stddev = 0.0;  // across runs, of each run's window average
  std::size_t window_begin = 0;  // first iteration (1-based) in the window
  std::size_t window_length = 0;
  bool operator==(const SteadyStats&) const = default;
};

struct FilterResult {
  std::string label;
  std::array<SeriesStats, kMetricCount> series;
  std::array<SteadyStats, kMetricCount> steady;
  /// snapshots[j][r]: run r at TrialOptions::snapshot_at[j].
  std::vector<std::vector<StateSnapshot>> snapshots;

  const SeriesStats& operator[](Metric m) const { return series[static_cast<std::size_t>(m)]; }
  const SteadyStats& steady_state(Metric m) const { return steady[static_cast<std::size_t>(m)]; }
};

struct MonteCarloResult {
  std::vector<FilterResult> filters;
  std::vector<Metric> metrics;
  std::size_t runs = 0;
  std::size_t completed_runs = 0;
  std::size_t diverged_runs = 0;
  std::uint64_t seed = 0;
  double mean_noise_variance = 0.0;
  std::vector<std::string> divergence_messages;  // first few only

  const FilterResult& filter(std::string_view label) const;
};

/// Trailing-window bounds for a series of `iterations` entries.
std::pair<std::size_t, std::size_t> steady_window(std::size_t iterations, double fraction);

MonteCarloResult run_monte_carlo(const Experiment& experiment);

}  // namespace sparselms
