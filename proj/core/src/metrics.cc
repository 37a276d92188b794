#include "radarq/metrics.h"

#include <cstdio>
#include <stdexcept>

namespace radarq {

std::optional<double> jain_index(std::span<const double> throughputs) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : throughputs) {
    if (x < 0.0) throw std::invalid_argument("negative throughput");
    sum += x;
    sum_sq += x * x;
  }
  if (!(sum_sq > 0.0)) return std::nullopt;
  return sum * sum / (static_cast<double>(throughputs.size()) * sum_sq);
}

MetricsRecord aggregate(const ConfigEcho& config, int tenants,
                        std::span<const DeliveryRecord> deliveries,
                        std::span<const FailureRecord> failures,
                        SimTime window_start, SimTime window_end) {
  MetricsRecord rec;
  rec.config = config;
  rec.sim_duration = to_seconds(window_end - window_start);
  rec.per_request.resize(static_cast<std::size_t>(tenants));
  for (int i = 0; i < tenants; ++i) {
    rec.per_request[i].id = static_cast<RequestId>(i);
  }
  std::vector<double> fidelity_sum(rec.per_request.size(), 0.0);

  auto in_window = [&](SimTime t) {
    return t >= window_start && t < window_end;
  };

  double total_fidelity = 0.0;
  for (const DeliveryRecord& d : deliveries) {
    if (!in_window(d.time)) continue;
    if (d.request >= rec.per_request.size()) {
      throw std::out_of_range("delivery for unknown request slot");
    }
    ++rec.delivered_count;
    total_fidelity += d.fidelity;
    ++rec.per_request[d.request].served;
    fidelity_sum[d.request] += d.fidelity;
  }
  for (const FailureRecord& f : failures) {
    if (!in_window(f.time)) continue;
    if (f.request >= rec.per_request.size()) {
      throw std::out_of_range("failure for unknown request slot");
    }
    ++rec.per_request[f.request].failed;
  }

  std::vector<double> served;
  served.reserve(rec.per_request.size());
  for (std::size_t i = 0; i < rec.per_request.size(); ++i) {
    RequestTally& t = rec.per_request[i];
    if (t.served > 0) t.mean_fidelity = fidelity_sum[i] / t.served;
    served.push_back(static_cast<double>(t.served));
  }

  rec.aggregate_throughput =
      rec.sim_duration > 0.0 ? rec.delivered_count / rec.sim_duration : 0.0;
  if (rec.delivered_count > 0) {
    rec.mean_fidelity = total_fidelity / rec.delivered_count;
  }
  rec.jain_index = jain_index(served);
  return rec;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

std::string format_coherence(CoherenceTime t) {
  return t ? format_number(to_seconds(*t)) : "inf";
}

std::string csv_header() {
  return "strategy,topology,rows_or_n,cols_or_degree,N,T_co,seed,throughput,"
         "mean_fidelity,jain,delivered,duration";
}

std::string csv_row(const MetricsRecord& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string("NA");
  };
  std::string row;
  row += r.config.strategy + ",";
  row += r.config.topology + ",";
  row += format_number(r.config.shape_a) + ",";
  row += format_number(r.config.shape_b) + ",";
  row += std::to_string(r.config.concurrency) + ",";
  row += format_coherence(r.config.coherence_time) + ",";
  row += std::to_string(r.config.seed) + ",";
  row += format_number(r.aggregate_throughput) + ",";
  row += opt(r.mean_fidelity) + ",";
  row += opt(r.jain_index) + ",";
  row += std::to_string(r.delivered_count) + ",";
  row += format_number(r.sim_duration);
  return row;
}

}  // namespace radarq
