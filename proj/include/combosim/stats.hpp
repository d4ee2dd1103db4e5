#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "combosim/bitstream.hpp"

namespace combosim {

struct AutocorrPoint {
  int lag = 0;
  double value = 0.0;
  double sigma = 0.0;  ///< 1 / sqrt(N - k)
};

/// Estimated bias and serial autocorrelation of one bit stream, with exact
/// statistical errors.
struct MetricsReport {
  StreamLabel label = StreamLabel::X;
  std::uint64_t n_bits = 0;
  double bias = 0.0;
  double sigma_b = 0.0;  ///< 1 / (2 sqrt(N))
  std::vector<AutocorrPoint> autocorr;
  bool degenerate = false;  ///< constant stream; autocorr undefined

  const AutocorrPoint& at_lag(int k) const;
};

struct CrossCorrPoint {
  int lag = 0;  ///< negative lags swap the two streams' roles
  double value = 0.0;
  double sigma = 0.0;  ///< 1 / sqrt(N - |k|)
};

struct CrossCorrReport {
  std::uint64_t n_bits = 0;  ///< common (truncated) length
  std::vector<CrossCorrPoint> lags;
};

/// b-hat = (sum x_i)/N - 1/2 and its one-sigma error 1/(2 sqrt N).
/// Throws on an empty stream.
std::pair<double, double> bias(const BitStream& bits);

/// Serial autocorrelation coefficients for lags 1..k_max, computed with the
/// full-sequence mean and integer pair counts (single rounding at the end).
/// Throws on a constant ("degenerate") stream or when N <= k_max.
std::vector<AutocorrPoint> autocorr(const BitStream& bits, int k_max);

/// Convenience bundle of bias + autocorr that flags degenerate streams
/// instead of throwing, for scenario reporting.
MetricsReport metrics(const BitStream& bits, int k_max);

/// Normalized cross-correlation between two streams truncated to a common
/// length, for lags in [-k_max, k_max].
CrossCorrReport crosscorr(const BitStream& x, const BitStream& y, int k_max);

struct MarkovVerdict {
  int lag = 0;
  double expected = 0.0;  ///< a_1^k
  double measured = 0.0;
  double sigma = 0.0;
  bool pass = false;
};

/// Checks a_k against a_1^k for every lag k >= 2 in the report, within
/// z * sigma_k. Overall pass = all lags pass.
std::pair<std::vector<MarkovVerdict>, bool> markov_check(
    const MetricsReport& report, double z = 4.0);

}  // namespace combosim
