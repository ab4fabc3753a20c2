#pragma once

// Online estimators for failure inter-arrival, request inter-arrival and
// holding times, plus the scan-based offered-load estimator.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lightroute {

/// Running mean and sample variance (Welford).
class MeanVarEstimator {
 public:
  void update(double sample) {
    if (!std::isfinite(sample)) throw std::invalid_argument("MeanVarEstimator: non-finite sample");
    ++count_;
    const double delta = sample - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (sample - mean_);
  }

  [[nodiscard]] std::uint64_t count() const { return count_; }
  [[nodiscard]] double mean() const { return mean_; }
  [[nodiscard]] double m2() const { return m2_; }

  /// m2 / (count - 1); zero below two samples.
  [[nodiscard]] double variance() const {
    if (count_ < 2) return 0.0;
    const double v = m2_ / static_cast<double>(count_ - 1);
    return v < 0.0 ? 0.0 : v;
  }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Scalar Kalman filter over a random-walk state.
class ScalarKalman {
 public:
  ScalarKalman(double initial_estimate, double initial_error_cov, double process_noise,
               double measurement_noise)
      : estimate_(initial_estimate),
        error_cov_(initial_error_cov),
        q_(process_noise),
        r_(measurement_noise) {
    if (!(measurement_noise > 0.0)) throw std::invalid_argument("ScalarKalman: measurement noise must be > 0");
    if (!(process_noise >= 0.0)) throw std::invalid_argument("ScalarKalman: process noise must be >= 0");
    if (!(initial_error_cov >= 0.0)) throw std::invalid_argument("ScalarKalman: error covariance must be >= 0");
  }

  void update(double measurement) {
    if (!std::isfinite(measurement)) throw std::invalid_argument("ScalarKalman: non-finite measurement");
    const double prior = error_cov_ + q_;
    const double gain = prior / (prior + r_);
    estimate_ += gain * (measurement - estimate_);
    error_cov_ = prior * r_ / (prior + r_);
  }

  [[nodiscard]] double estimate() const { return estimate_; }
  [[nodiscard]] double error_cov() const { return error_cov_; }
  [[nodiscard]] double process_noise() const { return q_; }
  [[nodiscard]] double measurement_noise() const { return r_; }

 private:
  double estimate_;
  double error_cov_;
  double q_;
  double r_;
};

inline MeanVarEstimator update(MeanVarEstimator est, double sample) {
  est.update(sample);
  return est;
}

inline ScalarKalman kalman_update(ScalarKalman kf, double measurement) {
  kf.update(measurement);
  return kf;
}

enum class EstimatorKind { mean_var, kalman };

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::mean_var;
  double kalman_q = 0.0;
  double kalman_r = 1.0;
};

/// Estimator of (mean, variance) for one stream of durations. Reports the
/// configured prior until two samples exist. With the Kalman kind, the mean
/// comes from the filter and the variance from the moment accumulator.
class DurationEstimator {
 public:
  DurationEstimator() = default;
  DurationEstimator(double prior_mean, double prior_variance, EstimatorConfig cfg = {})
      : prior_mean_(prior_mean), prior_variance_(prior_variance), kind_(cfg.kind) {
    if (kind_ == EstimatorKind::kalman) {
      const double start = std::isfinite(prior_mean) ? prior_mean : 0.0;
      kalman_.emplace(start, 1e12 * cfg.kalman_r, cfg.kalman_q, cfg.kalman_r);
    }
  }

  void add(double sample) {
    moments_.update(sample);
    if (kalman_) kalman_->update(sample);
  }

  [[nodiscard]] bool using_prior() const { return moments_.count() < 2; }

  [[nodiscard]] double mean() const {
    if (using_prior()) return prior_mean_;
    return kalman_ ? kalman_->estimate() : moments_.mean();
  }

  [[nodiscard]] double variance() const {
    return using_prior() ? prior_variance_ : moments_.variance();
  }

  [[nodiscard]] const MeanVarEstimator& moments() const { return moments_; }
  [[nodiscard]] const std::optional<ScalarKalman>& kalman() const { return kalman_; }
  [[nodiscard]] EstimatorKind kind() const { return kind_; }

 private:
  double prior_mean_ = 0.0;
  double prior_variance_ = 0.0;
  EstimatorKind kind_ = EstimatorKind::mean_var;
  MeanVarEstimator moments_;
  std::optional<ScalarKalman> kalman_;
};

/// Ring buffer of the last `window` occupancy samples of one resource.
class OccupancyScanWindow {
 public:
  OccupancyScanWindow(std::uint32_t capacity, std::size_t window, double scan_interval = 1.0)
      : capacity_(capacity), window_(window), interval_(scan_interval) {
    if (capacity == 0) throw std::invalid_argument("OccupancyScanWindow: capacity must be positive");
    if (window == 0) throw std::invalid_argument("OccupancyScanWindow: window must be positive");
    if (!(scan_interval > 0.0)) throw std::invalid_argument("OccupancyScanWindow: scan interval must be positive");
    samples_.reserve(window);
  }

  void push(std::uint32_t occupied) {
    if (occupied > capacity_) throw std::invalid_argument("OccupancyScanWindow: sample exceeds capacity");
    if (samples_.size() < window_) {
      samples_.push_back(occupied);
    } else {
      samples_[next_] = occupied;
    }
    next_ = (next_ + 1) % window_;
  }

  [[nodiscard]] std::uint32_t capacity() const { return capacity_; }
  [[nodiscard]] std::size_t window() const { return window_; }
  [[nodiscard]] double scan_interval() const { return interval_; }
  [[nodiscard]] std::size_t size() const { return samples_.size(); }
  [[nodiscard]] bool empty() const { return samples_.empty(); }

  /// Samples oldest first.
  [[nodiscard]] std::vector<std::uint32_t> samples() const {
    if (samples_.size() < window_) return samples_;
    std::vector<std::uint32_t> out;
    out.reserve(window_);
    for (std::size_t i = 0; i < window_; ++i) out.push_back(samples_[(next_ + i) % window_]);
    return out;
  }

 private:
  std::uint32_t capacity_;
  std::size_t window_;
  double interval_;
  std::vector<std::uint32_t> samples_;
  std::size_t next_ = 0;
};

struct OfferedLoadEstimate {
  double mean_occupancy = 0.0;   // N_r
  double blocking = 0.0;         // B_r
  std::optional<double> arrival_rate;  // lambda_r; empty when every scan was saturated

  [[nodiscard]] bool saturated() const { return !arrival_rate.has_value(); }
};

/// N_r = mean occupancy, B_r = fraction of saturated scans,
/// lambda_r = N_r / (h (1 - B_r)).
inline OfferedLoadEstimate estimate_offered_load(const OccupancyScanWindow& window, double mean_holding) {
  if (window.empty()) throw std::invalid_argument("estimate_offered_load: empty window");
  if (!(mean_holding > 0.0)) throw std::invalid_argument("estimate_offered_load: holding time must be positive");
  const auto samples = window.samples();
  double sum = 0.0;
  std::size_t full = 0;
  for (auto n : samples) {
    sum += n;
    if (n == window.capacity()) ++full;
  }
  const double phi = static_cast<double>(samples.size());
  OfferedLoadEstimate est;
  est.mean_occupancy = sum / phi;
  est.blocking = static_cast<double>(full) / phi;
  if (full < samples.size()) est.arrival_rate = est.mean_occupancy / (mean_holding * (1.0 - est.blocking));
  return est;
}

using RouterPair = std::pair<std::uint32_t, std::uint32_t>;

/// Everything the routing cost model learns online, per replication.
struct ElementStats {
  std::vector<DurationEstimator> link_failure_interarrival;
  std::vector<DurationEstimator> router_failure_interarrival;
  std::map<RouterPair, DurationEstimator> holding_by_pair;
  std::map<RouterPair, DurationEstimator> arrival_by_pair;
  std::vector<std::optional<OccupancyScanWindow>> link_occupancy;
  std::vector<std::optional<OccupancyScanWindow>> router_occupancy;

  double prior_holding_mean = 1.0;
  double prior_holding_variance = 1.0;
  double prior_arrival_mean = 1.0;
  double prior_arrival_variance = 1.0;
  EstimatorConfig estimator;

  DurationEstimator& holding(RouterPair p) {
    auto it = holding_by_pair.find(p);
    if (it == holding_by_pair.end())
      it = holding_by_pair.emplace(p, DurationEstimator(prior_holding_mean, prior_holding_variance, estimator)).first;
    return it->second;
  }

  DurationEstimator& arrival(RouterPair p) {
    auto it = arrival_by_pair.find(p);
    if (it == arrival_by_pair.end())
      it = arrival_by_pair.emplace(p, DurationEstimator(prior_arrival_mean, prior_arrival_variance, estimator)).first;
    return it->second;
  }

  /// (mean, variance) of holding time for a pair; the prior when unseen.
  [[nodiscard]] std::pair<double, double> holding_moments(RouterPair p) const {
    auto it = holding_by_pair.find(p);
    if (it == holding_by_pair.end()) return {prior_holding_mean, prior_holding_variance};
    return {it->second.mean(), it->second.variance()};
  }
};

}  // namespace lightroute
