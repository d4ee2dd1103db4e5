#include "combosim/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace combosim {

const AutocorrPoint& MetricsReport::at_lag(int k) const {
  for (const auto& p : autocorr)
    if (p.lag == k) return p;
  throw std::out_of_range("no autocorrelation point at requested lag");
}

std::pair<double, double> bias(const BitStream& bits) {
  const std::uint64_t n = bits.size();
  if (n == 0) throw std::invalid_argument("bias of an empty stream");
  const auto ones = static_cast<double>(bits.popcount());
  const auto nd = static_cast<double>(n);
  return {ones / nd - 0.5, 0.5 / std::sqrt(nd)};
}

namespace {

// Sum of the first k bits (k small).
std::uint64_t head_sum(const BitStream& bits, int k) {
  std::uint64_t s = 0;
  for (int i = 0; i < k; ++i) s += bits.get(static_cast<std::size_t>(i)) ? 1 : 0;
  return s;
}

std::uint64_t tail_sum(const BitStream& bits, int k) {
  std::uint64_t s = 0;
  const std::size_t n = bits.size();
  for (int i = 0; i < k; ++i) s += bits.get(n - 1 - static_cast<std::size_t>(i)) ? 1 : 0;
  return s;
}

}  // namespace

std::vector<AutocorrPoint> autocorr(const BitStream& bits, int k_max) {
  const std::uint64_t n = bits.size();
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (n <= static_cast<std::uint64_t>(k_max))
    throw std::invalid_argument("stream shorter than k_max");
  const std::uint64_t ones = bits.popcount();
  if (ones == 0 || ones == n)
    throw std::invalid_argument(
        "degenerate stream: constant bits have undefined autocorrelation");

  // All sums are exact integer counts; x_i in {0,1} so x_i^2 = x_i.
  //   numerator_k   = sum_{i<=N-k} (x_i - m)(x_{i+k} - m)
  //                 = P_k - m*(H_k + T_k) + (N-k) m^2
  //   denominator_k = sum_{i<=N-k} (x_i - m)^2 = H_k (1 - 2m) + (N-k) m^2
  // with m the full-sequence mean, P_k the pair count, H_k the head sum
  // (first N-k bits) and T_k the tail-shifted sum (last N-k bits).
  const double m = static_cast<double>(ones) / static_cast<double>(n);
  std::vector<AutocorrPoint> out;
  out.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    const auto pair_count = static_cast<double>(bits.overlap_count(static_cast<std::size_t>(k)));
    const auto h = static_cast<double>(ones - tail_sum(bits, k));
    const auto t = static_cast<double>(ones - head_sum(bits, k));
    const auto terms = static_cast<double>(n - static_cast<std::uint64_t>(k));
    const double numerator = pair_count - m * (h + t) + terms * m * m;
    const double denominator = h * (1.0 - 2.0 * m) + terms * m * m;
    if (denominator == 0.0)
      throw std::invalid_argument("degenerate stream at lag " + std::to_string(k));
    out.push_back({k, numerator / denominator, 1.0 / std::sqrt(terms)});
  }
  return out;
}

MetricsReport metrics(const BitStream& bits, int k_max) {
  MetricsReport report;
  report.label = bits.label();
  report.n_bits = bits.size();
  if (bits.size() == 0) {
    report.degenerate = true;
    return report;
  }
  const auto [b, sb] = bias(bits);
  report.bias = b;
  report.sigma_b = sb;
  const std::uint64_t ones = bits.popcount();
  if (ones == 0 || ones == bits.size() ||
      bits.size() <= static_cast<std::uint64_t>(k_max)) {
    report.degenerate = true;
    return report;
  }
  report.autocorr = autocorr(bits, k_max);
  return report;
}

CrossCorrReport crosscorr(const BitStream& x, const BitStream& y, int k_max) {
  const std::uint64_t n = x.size() < y.size() ? x.size() : y.size();
  if (n < 2) throw std::invalid_argument("streams too short for crosscorr");
  if (k_max < 0 || static_cast<std::uint64_t>(k_max) >= n)
    throw std::invalid_argument("k_max out of range");
  const BitStream xs = x.size() == n ? x : x.prefix(n);
  const BitStream ys = y.size() == n ? y : y.prefix(n);
  const std::uint64_t ox = xs.popcount();
  const std::uint64_t oy = ys.popcount();
  if (ox == 0 || ox == n || oy == 0 || oy == n)
    throw std::invalid_argument("degenerate stream in crosscorr");
  const auto nd = static_cast<double>(n);
  const double mx = static_cast<double>(ox) / nd;
  const double my = static_cast<double>(oy) / nd;

  // a_xy(k) over the first N-k terms; negative lags swap the roles of the
  // two streams.
  const auto one_lag = [&](const BitStream& a, const BitStream& b, double ma,
                           double mb, int k) {
    const auto uk = static_cast<std::size_t>(k);
    const auto terms = static_cast<double>(n - static_cast<std::uint64_t>(k));
    const auto pair_count = static_cast<double>(BitStream::overlap_count(a, b, uk));
    const auto ha = static_cast<double>(a.popcount_prefix(static_cast<std::size_t>(n) - uk));
    const auto tb = static_cast<double>(b.popcount() - b.popcount_prefix(uk));
    const auto hb = static_cast<double>(b.popcount_prefix(static_cast<std::size_t>(n) - uk));
    const double numerator = pair_count - ma * tb - mb * ha + terms * ma * mb;
    const double var_a = ha * (1.0 - 2.0 * ma) + terms * ma * ma;
    const double var_b = hb * (1.0 - 2.0 * mb) + terms * mb * mb;
    const double denominator = std::sqrt(var_a * var_b);
    if (denominator == 0.0)
      throw std::invalid_argument("degenerate stream in crosscorr");
    return numerator / denominator;
  };

  CrossCorrReport report;
  report.n_bits = n;
  for (int k = -k_max; k <= k_max; ++k) {
    const double sigma = 1.0 / std::sqrt(static_cast<double>(n) - std::abs(k));
    const double v = k >= 0 ? one_lag(xs, ys, mx, my, k)
                            : one_lag(ys, xs, my, mx, -k);
    report.lags.push_back({k, v, sigma});
  }
  return report;
}

std::pair<std::vector<MarkovVerdict>, bool> markov_check(
    const MetricsReport& report, double z) {
  if (report.autocorr.size() < 2)
    throw std::invalid_argument("markov_check needs k_max >= 2");
  const double a1 = report.autocorr.front().value;
  std::vector<MarkovVerdict> verdicts;
  bool all_pass = true;
  for (const auto& point : report.autocorr) {
    if (point.lag < 2) continue;
    MarkovVerdict v;
    v.lag = point.lag;
    v.expected = std::pow(a1, point.lag);
    v.measured = point.value;
    v.sigma = point.sigma;
    v.pass = std::abs(v.measured - v.expected) <= z * v.sigma;
    all_pass = all_pass && v.pass;
    verdicts.push_back(v);
  }
  return {verdicts, all_pass};
}

}  // namespace combosim
