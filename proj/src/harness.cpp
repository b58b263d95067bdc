#include "sparselms/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <set>
#include <thread>

#include "sparselms/errors.hpp"

namespace sparselms {

namespace {

constexpr std::pair<Metric, std::string_view> kMetricNames[] = {
    {Metric::Mse, "mse"}, {Metric::Emse, "emse"}, {Metric::SqErr, "sqerr"},
    {Metric::Alpha, "alpha"}, {Metric::Beta, "beta"},
};

constexpr std::size_t kMaxDivergenceMessages = 8;

std::size_t index_of(Metric m) { return static_cast<std::size_t>(m); }

// Streaming mean / variance, fed strictly in run-index order.
struct Welford {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  double stddev() const {
    return count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1)) : 0.0;
  }
};

struct SeriesAccumulator {
  std::vector<Welford> points;
  Welford steady;
};

struct PreparedFilter {
  const FilterConfig* config;
  FilterParams params;
  double metric_eps;
  Matrix stability_inv;
};

}  // namespace

std::string_view metric_name(Metric m) noexcept {
  for (const auto& [metric, name] : kMetricNames) {
    if (metric == m) return name;
  }
  return "unknown";
}

std::optional<Metric> parse_metric(std::string_view name) noexcept {
  for (const auto& [metric, n] : kMetricNames) {
    if (n == name) return metric;
  }
  return std::nullopt;
}

Channel gen_channel(const ChannelSpec& spec, Rng& rng) {
  if (spec.n == 0) throw ContractViolation("channel length must be at least 1");
  if (spec.sparsity < 1 || spec.sparsity > spec.n) {
    throw ContractViolation("channel sparsity " + std::to_string(spec.sparsity) +
                            " outside [1, " + std::to_string(spec.n) + "]");
  }
  if (spec.domain && spec.domain->size() != spec.n) {
    throw ContractViolation("channel sparsity basis does not match channel length");
  }

  // Partial Fisher-Yates: the first S slots become the support.
  std::vector<std::size_t> order(spec.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < spec.sparsity; ++i) {
    const std::size_t j = i + rng.below(spec.n - i);
    std::swap(order[i], order[j]);
  }
  Channel channel;
  channel.support.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.sparsity));
  std::sort(channel.support.begin(), channel.support.end());

  Vector coeffs = Vector::Zero(static_cast<Eigen::Index>(spec.n));
  for (std::size_t pos : channel.support) {
    const double value = spec.tap_law == TapLaw::GaussianUnit ? rng.gaussian() : rng.bpsk();
    coeffs[static_cast<Eigen::Index>(pos)] = value;
  }
  if (spec.normalize) {
    const double norm = coeffs.norm();
    if (norm > 0.0) coeffs /= norm;
  }
  channel.taps = spec.domain ? spec.domain->synthesize(coeffs) : coeffs;
  return channel;
}

std::vector<double> gen_bpsk(std::size_t len, Rng& rng) {
  if (len == 0) throw ContractViolation("BPSK stream length must be at least 1");
  std::vector<double> out(len);
  for (auto& s : out) s = rng.bpsk();
  return out;
}

double sigma_from_snr(double snr_db, const Vector& channel) {
  const double power = channel.squaredNorm();
  if (!(power > 0.0)) throw ContractViolation("SNR is undefined for an all-zero channel");
  if (!std::isfinite(snr_db)) throw ContractViolation("SNR must be finite");
  return power * std::pow(10.0, -snr_db / 10.0);
}

double NoiseSpec::variance_for(const Vector& channel) const {
  if (mode == Mode::SnrDb) return sigma_from_snr(value, channel);
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ContractViolation("noise variance must be finite and >= 0");
  }
  return value;
}

TrialRecord run_trial(const Channel& channel, std::span<const FilterConfig> filters,
                      const TrialOptions& options, double noise_variance, Rng& rng) {
  const auto n = static_cast<std::size_t>(channel.taps.size());
  if (n == 0) throw ContractViolation("empty channel");
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw ContractViolation("noise variance must be finite and >= 0");
  }

  bool want[kMetricCount] = {};
  for (Metric m : options.metrics) want[index_of(m)] = true;

  // BPSK input: R = I.
  const Covariance input_cov = Covariance::identity(n);

  std::vector<PreparedFilter> prepared;
  prepared.reserve(filters.size());
  for (const auto& f : filters) {
    PreparedFilter p{&f, f.params, 0.0, {}};
    if (p.params.variant == Variant::Oracle && f.oracle_true_support) {
      p.params.support = channel.support;
    }
    p.params.validate(n);
    if (f.basis && f.basis->size() != n) {
      throw ContractViolation("filter '" + f.label + "' basis does not match channel length");
    }
    p.metric_eps = p.params.variant == Variant::RL1 ? p.params.eps : options.analysis_eps;
    if (want[index_of(Metric::Beta)]) p.stability_inv = stability_inverse(p.params.mu, input_cov);
    prepared.push_back(std::move(p));
  }

  TrialRecord record;
  record.channel = channel;
  record.noise_variance = noise_variance;
  record.filters.resize(filters.size());
  std::vector<WeightState> states(filters.size(), WeightState::zeros(n));
  for (auto& trace : record.filters) {
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      if (want[m]) trace.series[m].reserve(options.iterations);
    }
  }

  const std::set<std::size_t> snapshot_at(options.snapshot_at.begin(), options.snapshot_at.end());
  const double sigma = std::sqrt(noise_variance);
  TapDelayLine line(n);

  for (std::size_t k = 0; k < options.iterations; ++k) {
    line.push(rng.bpsk());
    const Vector& x = line.window();
    const double d = channel.taps.dot(x) + sigma * rng.gaussian();
    const std::size_t iteration = k + 1;

    for (std::size_t f = 0; f < prepared.size(); ++f) {
      const auto& pf = prepared[f];
      StepOutput out = pf.config->basis ? step(states[f], x, d, pf.params, *pf.config->basis)
                                        : step(states[f], x, d, pf.params);
      if (!(out.next.w.norm() <= options.divergence_threshold)) {
        throw DivergenceError(iteration, pf.config->label);
      }
      states[f] = std::move(out.next);
      const WeightState& s = states[f];
      auto& trace = record.filters[f];

      if (want[index_of(Metric::Mse)] || want[index_of(Metric::Emse)]) {
        const Vector v = s.w - channel.taps;
        if (want[index_of(Metric::Mse)]) trace.series[index_of(Metric::Mse)].push_back(v.squaredNorm());
        if (want[index_of(Metric::Emse)]) {
          trace.series[index_of(Metric::Emse)].push_back(v.dot(input_cov.matrix() * v));
        }
      }
      if (want[index_of(Metric::SqErr)]) {
        trace.series[index_of(Metric::SqErr)].push_back(out.error * out.error);
      }
      if (want[index_of(Metric::Alpha)]) {
        trace.series[index_of(Metric::Alpha)].push_back(
            alpha_prime_term(s.w, s.w_prev, channel.taps, pf.metric_eps));
      }
      if (want[index_of(Metric::Beta)]) {
        trace.series[index_of(Metric::Beta)].push_back(
            beta_prime_term(s.w, s.w_prev, pf.metric_eps, pf.stability_inv));
      }
      if (snapshot_at.count(iteration) != 0) {
        trace.snapshots.push_back(StateSnapshot{iteration, s.w, s.w_prev, channel.taps});
      }
    }
  }

  for (std::size_t f = 0; f < states.size(); ++f) record.filters[f].final_state = std::move(states[f]);
  return record;
}

TrialRecord run_trial(const Channel& channel, const FilterConfig& filter,
                      const TrialOptions& options, double noise_variance, Rng& rng) {
  return run_trial(channel, std::span<const FilterConfig>(&filter, 1), options, noise_variance,
                   rng);
}

const FilterResult& MonteCarloResult::filter(std::string_view label) const {
  for (const auto& f : filters) {
    if (f.label == label) return f;
  }
  throw ContractViolation("no filter labelled '" + std::string(label) + "' in result");
}

std::pair<std::size_t, std::size_t> steady_window(std::size_t iterations, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ContractViolation("steady-state fraction must be in (0, 1]");
  }
  if (iterations == 0) return {0, 0};
  auto length = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(iterations) - 1e-9));
  length = std::clamp<std::size_t>(length, 1, iterations);
  return {iterations - length, length};
}

MonteCarloResult run_monte_carlo(const Experiment& experiment) {
  if (experiment.runs == 0) throw ContractViolation("Monte-Carlo needs at least one run");
  if (experiment.filters.empty()) throw ContractViolation("experiment has no filters");
  {
    std::set<std::string> labels;
    for (const auto& f : experiment.filters) {
      if (!labels.insert(f.label).second) {
        throw ContractViolation("duplicate filter label '" + f.label + "'");
      }
    }
  }
  const std::size_t iterations = experiment.trial.iterations;
  const auto& snaps = experiment.trial.snapshot_at;
  for (std::size_t j = 0; j < snaps.size(); ++j) {
    if (snaps[j] == 0 || snaps[j] > iterations || (j > 0 && snaps[j] <= snaps[j - 1])) {
      throw ContractViolation("snapshot iterations must be increasing and within [1, iterations]");
    }
  }
  const auto [window_begin, window_length] = steady_window(iterations, experiment.steady_fraction);

  std::size_t threads = experiment.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  const std::size_t filter_count = experiment.filters.size();
  const std::size_t snap_count = experiment.trial.snapshot_at.size();
  std::vector<std::array<SeriesAccumulator, kMetricCount>> acc(filter_count);
  for (auto& per_filter : acc) {
    for (std::size_t m = 0; m < kMetricCount; ++m) per_filter[m].points.resize(iterations);
  }
  bool want[kMetricCount] = {};
  for (Metric m : experiment.trial.metrics) want[index_of(m)] = true;

  MonteCarloResult result;
  result.runs = experiment.runs;
  result.seed = experiment.seed;
  result.metrics = experiment.trial.metrics;
  result.filters.resize(filter_count);
  for (std::size_t f = 0; f < filter_count; ++f) {
    result.filters[f].label = experiment.filters[f].label;
    result.filters[f].snapshots.resize(snap_count);
  }
  Welford noise_acc;

  const std::size_t batch = std::max<std::size_t>(64, threads * 16);
  std::vector<std::optional<TrialRecord>> records(batch);
  std::vector<std::string> diverged(batch);
  std::vector<std::exception_ptr> failures(batch);

  for (std::size_t start = 0; start < experiment.runs; start += batch) {
    const std::size_t count = std::min(batch, experiment.runs - start);
    auto work = [&](std::size_t lane) {
      for (std::size_t i = lane; i < count; i += threads) {
        records[i].reset();
        diverged[i].clear();
        failures[i] = nullptr;
        try {
          Rng rng = Rng::for_run(experiment.seed, start + i);
          const Channel channel = gen_channel(experiment.channel, rng);
          const double variance = experiment.noise.variance_for(channel.taps);
          records[i] = run_trial(channel, experiment.filters, experiment.trial, variance, rng);
        } catch (const DivergenceError& e) {
          diverged[i] = "run " + std::to_string(start + i) + ": " + e.what();
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(threads);
      for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }

    // Fold in run-index order so the result is independent of scheduling.
    for (std::size_t i = 0; i < count; ++i) {
      if (failures[i]) std::rethrow_exception(failures[i]);
      if (!records[i]) {
        ++result.diverged_runs;
        if (result.divergence_messages.size() < kMaxDivergenceMessages) {
          result.divergence_messages.push_back(diverged[i]);
        }
        continue;
      }
      const TrialRecord& rec = *records[i];
      ++result.completed_runs;
      noise_acc.add(rec.noise_variance);
      for (std::size_t f = 0; f < filter_count; ++f) {
        const FilterTrace& trace = rec.filters[f];
        for (std::size_t m = 0; m < kMetricCount; ++m) {
          if (!want[m]) continue;
          const auto& s = trace.series[m];
          auto& a = acc[f][m];
          for (std::size_t k = 0; k < iterations; ++k) a.points[k].add(s[k]);
          if (window_length > 0) {
            double sum = 0.0;
            for (std::size_t k = window_begin; k < window_begin + window_length; ++k) sum += s[k];
            a.steady.add(sum / static_cast<double>(window_length));
          }
        }
        for (std::size_t j = 0; j < trace.snapshots.size() && j < snap_count; ++j) {
          result.filters[f].snapshots[j].push_back(trace.snapshots[j]);
        }
      }
    }
  }

  result.mean_noise_variance = noise_acc.mean;
  for (std::size_t f = 0; f < filter_count; ++f) {
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      if (!want[m]) continue;
      auto& out = result.filters[f].series[m];
      const auto& a = acc[f][m];
      if (result.completed_runs > 0) {
        out.mean.resize(iterations);
        out.stddev.resize(iterations);
        for (std::size_t k = 0; k < iterations; ++k) {
          out.mean[k] = a.points[k].mean;
          out.stddev[k] = a.points[k].stddev();
        }
      }
      auto& st = result.filters[f].steady[m];
      st.mean = a.steady.mean;
      st.stddev = a.steady.stddev();
      st.window_begin = window_length > 0 ? window_begin + 1 : 0;
      st.window_length = window_length;
    }
  }
  return result;
}

}  // namespace sparselms
