#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "combosim/events.hpp"
#include "combosim/rng.hpp"

namespace combosim {

/// Single-photon detector behavioural parameters.
struct DetectorParams {
  Picos dead_time = 24 * kPsPerNs;            ///< non-paralyzable dead window
  double afterpulse_prob = 0.031;             ///< chance a detection spawns one
  /// Mean of the exponential afterpulse delay past the dead-time end. Kept
  /// short so an afterpulse lands as the next accepted event rather than
  /// two events later, which would break the lag-1 (Markov) correlation
  /// structure of the bit streams at the 10 Mcps operating point.
  Picos afterpulse_mean_delay = 10 * kPsPerNs;
  double efficiency = 1.0;                    ///< photon detection probability
  double injection_detect_prob = 0.997;       ///< fake-pulse detection probability

  void validate() const;
};

/// Stateful detector model: efficiency thinning, non-paralyzable dead time
/// and cascading afterpulses. Feed arrivals in non-decreasing time order;
/// detections come out sorted and origin-tagged. The scanner owns its RNG,
/// so a fixed (params, channel, seed) triple reproduces the same output for
/// any chunking of the input.
class DetectorScanner {
 public:
  using Sink = std::function<void(const DetectionEvent&)>;

  DetectorScanner(const DetectorParams& params, Channel channel,
                  std::uint64_t seed)
      : params_(params), channel_(channel), rng_(seed) {
    params_.validate();
  }

  /// Processes one arrival plus any pending afterpulses due before it.
  void feed(const ArrivalEvent& ev, const Sink& out);

  /// Processes pending afterpulses strictly before `horizon`. Call when all
  /// arrivals before `horizon` have been fed; detections before the horizon
  /// are then final.
  void advance_to(Picos horizon, const Sink& out);

  /// Drops afterpulses scheduled at or past the end of the simulation.
  void finish() { pending_ = {}; }

 private:
  void candidate(Picos t, Origin origin, const Sink& out);

  DetectorParams params_;
  Channel channel_;
  Rng rng_;
  Picos next_free_ = std::numeric_limits<Picos>::min();
  std::priority_queue<Picos, std::vector<Picos>, std::greater<>> pending_;
};

/// Batch wrapper: runs a DetectorScanner over a sorted arrival list.
std::vector<DetectionEvent> detect(const std::vector<ArrivalEvent>& arrivals,
                                   const DetectorParams& params,
                                   Channel channel, std::uint64_t seed);

/// Merges two sorted per-channel detection streams into one sorted stream,
/// D0 before D1 on exact timestamp ties.
std::vector<DetectionEvent> merge_channels(
    const std::vector<DetectionEvent>& d0,
    const std::vector<DetectionEvent>& d1);

/// Steady-state detected rate of a non-paralyzable detector fed by Poisson
/// arrivals at `rate` (afterpulsing aside): rate / (1 + rate * dead_time).
double deadtime_detected_rate(double arrival_rate, Picos dead_time);

/// Inverts the dead-time rate formula, with a first-order correction for
/// afterpulses, to find the per-channel photon arrival rate that yields a
/// target detected rate (all origins counted).
double invert_detected_rate(double target_rate, const DetectorParams& params);

}  // namespace combosim
