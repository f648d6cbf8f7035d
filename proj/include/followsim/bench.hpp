#pragma once

// Inference latency profiles and the benchmark harness that compares
// detector backends. The builtin empirical profiles carry per-inference
// execution times in seconds, forward driving direction, as published for
// this class of embedded robot platform; copies live under data/ one sample
// per line.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "followsim/random.hpp"

namespace followsim {

enum class LatencyKind { EMPIRICAL, LOGNORMAL, CONSTANT };

struct LatencyProfile {
  std::string backend;  // label, e.g. "SSD"
  LatencyKind kind = LatencyKind::CONSTANT;
  std::vector<double> samples;  // EMPIRICAL: seconds per inference
  double log_mu = 0.0;          // LOGNORMAL: mean of log seconds
  double log_sigma = 0.0;       // LOGNORMAL: sd of log seconds
  double constant_s = 0.0;      // CONSTANT: seconds

  static LatencyProfile empirical(std::string label, std::vector<double> s) {
    LatencyProfile p;
    p.backend = std::move(label);
    p.kind = LatencyKind::EMPIRICAL;
    p.samples = std::move(s);
    p.validate();
    return p;
  }
  static LatencyProfile lognormal(std::string label, double mu, double sigma) {
    LatencyProfile p;
    p.backend = std::move(label);
    p.kind = LatencyKind::LOGNORMAL;
    p.log_mu = mu;
    p.log_sigma = sigma;
    p.validate();
    return p;
  }
  static LatencyProfile constant(std::string label, double value) {
    LatencyProfile p;
    p.backend = std::move(label);
    p.kind = LatencyKind::CONSTANT;
    p.constant_s = value;
    p.validate();
    return p;
  }

  void validate() const {
    switch (kind) {
      case LatencyKind::EMPIRICAL:
        if (samples.empty())
          throw std::invalid_argument("latency profile \"" + backend +
                                      "\": empirical sample list is empty");
        for (double s : samples)
          if (!(s > 0.0))
            throw std::invalid_argument("latency profile \"" + backend +
                                        "\": samples must be positive");
        break;
      case LatencyKind::LOGNORMAL:
        if (!(log_sigma >= 0.0))
          throw std::invalid_argument("latency profile \"" + backend +
                                      "\": log_sigma must be >= 0");
        break;
      case LatencyKind::CONSTANT:
        if (!(constant_s >= 0.0))
          throw std::invalid_argument("latency profile \"" + backend +
                                      "\": constant must be >= 0");
        break;
    }
  }
};

// Published per-inference execution times, seconds, forward direction.
inline const std::vector<double>& ssd_forward_samples() {
  static const std::vector<double> v = {
      0.42902, 0.39288, 0.52259, 0.49419, 0.45433, 0.48836,
      0.38706, 0.38466, 0.37103, 0.40832, 0.42056};
  return v;
}

inline const std::vector<double>& ssd_ncs_forward_samples() {
  static const std::vector<double> v = {
      0.22644, 0.22303, 0.23443, 0.19288, 0.19351, 0.25596,
      0.21868, 0.19668, 0.19136, 0.18857, 0.21311};
  return v;
}

inline const std::vector<double>& ssd_lite_forward_samples() {
  static const std::vector<double> v = {
      0.22481, 0.20337, 0.22549, 0.22973, 0.22974, 0.22085,
      0.23718, 0.26686, 0.22443, 0.23024, 0.24348};
  return v;
}

inline const std::map<std::string, LatencyProfile>& builtin_profiles() {
  static const std::map<std::string, LatencyProfile> m = {
      {"SSD", LatencyProfile::empirical("SSD", ssd_forward_samples())},
      {"SSD_NCS",
       LatencyProfile::empirical("SSD_NCS", ssd_ncs_forward_samples())},
      {"SSD_LITE",
       LatencyProfile::empirical("SSD_LITE", ssd_lite_forward_samples())},
  };
  return m;
}

inline const LatencyProfile& builtin_profile(const std::string& name) {
  const auto& m = builtin_profiles();
  auto it = m.find(name);
  if (it == m.end())
    throw std::invalid_argument("unknown builtin latency profile \"" + name +
                                "\"");
  return it->second;
}

template <class URBG>
double sample_latency(const LatencyProfile& p, URBG& rng) {
  switch (p.kind) {
    case LatencyKind::EMPIRICAL:
      return p.samples[uniform_index(rng, p.samples.size())];
    case LatencyKind::LOGNORMAL:
      return std::exp(p.log_mu + p.log_sigma * gaussian(rng));
    case LatencyKind::CONSTANT:
      return p.constant_s;
  }
  return p.constant_s;
}

struct LatencyStats {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n-1)
  double median = 0.0;
  double p95 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Quantile by linear interpolation between order statistics of a sorted
// sequence, rank q*(n-1).
inline double quantile_linear(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (sorted.size() == 1) return sorted[0];
  const double rank = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

inline LatencyStats summarize(std::vector<double> samples) {
  if (samples.empty())
    throw std::invalid_argument("summarize: empty sample list");
  std::sort(samples.begin(), samples.end());
  LatencyStats s;
  s.count = samples.size();
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  double ss = 0.0;
  for (double v : samples) ss += (v - s.mean) * (v - s.mean);
  s.sd = s.count > 1 ? std::sqrt(ss / static_cast<double>(s.count - 1)) : 0.0;
  s.median = quantile_linear(samples, 0.5);
  s.p95 = quantile_linear(samples, 0.95);
  s.min = samples.front();
  s.max = samples.back();
  return s;
}

struct BackendStats {
  std::string backend;
  LatencyStats stats;
};

struct PairRatio {
  std::string a;
  std::string b;
  double mean_ratio = 0.0;  // mean(a) / mean(b)
};

struct CompareReport {
  bool exact = false;     // true: stats over the raw sample lists
  std::size_t draws = 0;  // resample count per backend (0 in exact mode)
  std::uint64_t seed = 0;
  std::vector<BackendStats> backends;
  std::vector<PairRatio> ratios;
};

// Compare backends by latency. draws == 0 selects exact mode: statistics are
// computed over each profile's own sample list with no randomness (empirical
// profiles only; a constant profile contributes its single value). With
// draws > 0 each backend is resampled draws times using a seed derived from
// (seed, backend label), so results do not depend on profile order.
inline CompareReport compare_backends(const std::vector<LatencyProfile>& profiles,
                                      std::size_t draws, std::uint64_t seed) {
  if (profiles.empty())
    throw std::invalid_argument("compare_backends: no profiles given");
  CompareReport report;
  report.exact = draws == 0;
  report.draws = draws;
  report.seed = seed;
  for (const auto& p : profiles) {
    p.validate();
    std::vector<double> values;
    if (draws == 0) {
      switch (p.kind) {
        case LatencyKind::EMPIRICAL:
          values = p.samples;
          break;
        case LatencyKind::CONSTANT:
          values = {p.constant_s};
          break;
        case LatencyKind::LOGNORMAL:
          throw std::invalid_argument(
              "compare_backends: exact mode needs sample lists, profile \"" +
              p.backend + "\" is parametric");
      }
    } else {
      Rng rng(derive_seed(seed, p.backend));
      values.reserve(draws);
      for (std::size_t i = 0; i < draws; ++i)
        values.push_back(sample_latency(p, rng));
    }
    report.backends.push_back({p.backend, summarize(std::move(values))});
  }
  for (const auto& a : report.backends)
    for (const auto& b : report.backends)
      if (a.backend != b.backend)
        report.ratios.push_back(
            {a.backend, b.backend, a.stats.mean / b.stats.mean});
  return report;
}

namespace detail {
inline std::string fixed5(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5f", v);
  return buf;
}
}  // namespace detail

inline std::string format_table(const CompareReport& r) {
  std::ostringstream out;
  out << (r.exact ? "mode: exact samples\n"
                  : "mode: resampled, draws=" + std::to_string(r.draws) +
                        ", seed=" + std::to_string(r.seed) + "\n");
  out << "backend      count      mean        sd    median       p95       "
         "min       max\n";
  for (const auto& b : r.backends) {
    char line[256];
    std::snprintf(line, sizeof line,
                  "%-10s %7zu %9.5f %9.5f %9.5f %9.5f %9.5f %9.5f\n",
                  b.backend.c_str(), b.stats.count, b.stats.mean, b.stats.sd,
                  b.stats.median, b.stats.p95, b.stats.min, b.stats.max);
    out << line;
  }
  out << "pairwise mean ratios (a/b):\n";
  for (const auto& p : r.ratios) {
    char line[256];
    std::snprintf(line, sizeof line, "%-10s / %-10s %9.5f\n", p.a.c_str(),
                  p.b.c_str(), p.mean_ratio);
    out << line;
  }
  return out.str();
}

// CSV layout: a stats block (one row per backend), a blank line, then a
// pairwise mean-ratio block.
inline std::string to_csv(const CompareReport& r) {
  std::ostringstream out;
  out << "backend,count,mean,sd,median,p95,min,max\n";
  for (const auto& b : r.backends) {
    out << b.backend << ',' << b.stats.count << ',' << detail::fixed5(b.stats.mean)
        << ',' << detail::fixed5(b.stats.sd) << ',' << detail::fixed5(b.stats.median)
        << ',' << detail::fixed5(b.stats.p95) << ',' << detail::fixed5(b.stats.min)
        << ',' << detail::fixed5(b.stats.max) << '\n';
  }
  out << '\n';
  out << "backend_a,backend_b,mean_ratio\n";
  for (const auto& p : r.ratios)
    out << p.a << ',' << p.b << ',' << detail::fixed5(p.mean_ratio) << '\n';
  return out.str();
}

}  // namespace followsim
