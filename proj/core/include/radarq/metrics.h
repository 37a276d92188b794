#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radarq/types.h"

namespace radarq {

// Jain's fairness index (sum x)^2 / (n sum x^2). Absent when no entry is
// positive. Throws std::invalid_argument on negative input.
std::optional<double> jain_index(std::span<const double> throughputs);

struct DeliveryRecord {
  SimTime time{0};
  RequestId request = 0;
  double fidelity = 0.0;
};

// A demand that exhausted its retries and was replaced.
struct FailureRecord {
  SimTime time{0};
  RequestId request = 0;
};

struct ConfigEcho {
  std::string strategy;
  std::string topology;  // "grid" or "random"
  double shape_a = 0.0;  // rows, or n
  double shape_b = 0.0;  // cols, or average degree
  int concurrency = 0;
  CoherenceTime coherence_time;
  std::uint64_t seed = 0;

  friend bool operator==(const ConfigEcho&, const ConfigEcho&) = default;
};

struct RequestTally {
  RequestId id = 0;
  int served = 0;
  int failed = 0;
  std::optional<double> mean_fidelity;

  friend bool operator==(const RequestTally&, const RequestTally&) = default;
};

struct MetricsRecord {
  ConfigEcho config;
  double aggregate_throughput = 0.0;  // pairs per simulated second
  std::optional<double> mean_fidelity;
  std::optional<double> jain_index;
  std::vector<RequestTally> per_request;
  int delivered_count = 0;
  double sim_duration = 0.0;  // measured window, seconds

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

// Pure function of the run's outcome log. Only events in
// [window_start, window_end) count; fairness is over `tenants` request slots.
MetricsRecord aggregate(const ConfigEcho& config, int tenants,
                        std::span<const DeliveryRecord> deliveries,
                        std::span<const FailureRecord> failures,
                        SimTime window_start, SimTime window_end);

// Fixed CSV schema, numbers at 6 significant digits.
std::string csv_header();
std::string csv_row(const MetricsRecord& record);
std::string format_number(double value);
std::string format_coherence(CoherenceTime t);

}  // namespace radarq
