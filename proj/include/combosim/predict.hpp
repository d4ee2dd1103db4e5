#pragma once

#include <cstdint>

#include "combosim/bitstream.hpp"
#include "combosim/events.hpp"

namespace combosim {

/// A bit process fully characterized by its bias and lag-1 autocorrelation
/// (higher lags decay as a^k).
struct MarkovBitModel {
  double b = 0.0;  ///< bias, |b| <= 0.5
  double a = 0.0;  ///< lag-1 autocorrelation, |a| <= 1

  /// Transition probabilities of the implied stationary chain.
  double p1() const { return 0.5 + b; }
  double p1_given_1() const { return p1() + a * (1.0 - p1()); }
  double p1_given_0() const { return p1() - a * p1(); }

  void validate() const;
};

/// Dead-time / afterpulse autocorrelation inputs.
struct DeadTimeModel {
  Picos dead_time = 0;   ///< tau_d
  Picos mean_period = 0; ///< tau, mean detected period per detector
  double afterpulse_prob = 0.0;
};

/// Exact dead-time contribution to the spatial autocorrelation:
/// exp(-tau_d / tau) - 1.
double predict_deadtime_autocorr(Picos tau_d, Picos tau);

/// First-order form -tau_d / tau of the same quantity.
double predict_deadtime_autocorr_approx(Picos tau_d, Picos tau);

/// Net autocorrelation with afterpulsing: p_a - tau_d / tau. Positive below
/// the cancellation rate, negative above it.
double predict_net_autocorr(const DeadTimeModel& model);

/// Detection rate at which afterpulse and dead-time contributions cancel:
/// p_a / tau_d (per detector), in counts per second.
double predict_f0(double afterpulse_prob, Picos tau_d);

/// Pair-XOR propagation through y_i = s_2i ^ s_2i+1. The exact forms are
/// authoritative; the first-order forms (-2b^2 - a/2, 4ab^2) are reported
/// alongside with a validity flag for the a << 1, b^2 << 1/4 regime.
struct PairXorPrediction {
  MarkovBitModel exact;
  MarkovBitModel approx;
  bool approx_valid = false;
};

PairXorPrediction propagate_pairxor(const MarkovBitModel& m);

/// Bit-wise XOR of two independent Markov streams:
///   b_C = -2 b_T b_Y
///   a_C = a_T a_Y + 4 (a_T b_Y^2 + a_Y b_T^2)
MarkovBitModel propagate_xor(const MarkovBitModel& t, const MarkovBitModel& y);

/// Smallest N at which either |b| or |a| reaches z times its statistical
/// error. Throws when both are zero (the model is indistinguishable from
/// fair coin flips at any length).
double required_sample_size(const MarkovBitModel& m, double z = 1.96);

/// Stationary Markov chain with exact target (b, a); the synthetic oracle
/// source for the propagation formulas. Deterministic per seed.
BitStream gen_markov_bits(const MarkovBitModel& m, std::uint64_t n,
                          std::uint64_t seed);

}  // namespace combosim
