#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "combosim/events.hpp"
#include "combosim/rng.hpp"

namespace combosim {

/// Light source configuration for one scenario point.
struct SourceParams {
  double mean_rate = 0.0;      ///< photon events per second (1/tau)
  double duration = 0.0;       ///< seconds
  double split_prob_d1 = 0.5;  ///< probability a photon routes to D1
  double injection_rate = 0.0; ///< periodic fake pulses per second; 0 = none
  Picos injection_phase = 0;   ///< offset of the injection grid, ps
};

/// Incremental Poisson arrival generator. Inter-arrival times are
/// exponential with mean 1/rate, rounded down to the ps grid; a sample that
/// rounds to zero is pushed forward 1 ps to keep the stream strictly
/// increasing within the channel.
class PoissonArrivalGen {
 public:
  PoissonArrivalGen(double rate, std::uint64_t seed)
      : rng_(seed), mean_ps_(1e12 / rate) {}

  Picos next() {
    auto dt = static_cast<Picos>(rng_.exponential(mean_ps_));
    t_ += dt > 0 ? dt : 1;
    return t_;
  }

  Picos current() const { return t_; }

 private:
  Rng rng_;
  double mean_ps_;
  Picos t_ = 0;
};

/// Incremental periodic injection generator: pulse k fires at
/// phase + round(k * period). A zero rate yields no pulses.
class InjectionGen {
 public:
  InjectionGen(double rate, Picos phase)
      : period_ps_(rate > 0 ? 1e12 / rate : 0.0), phase_(phase),
        active_(rate > 0) {}

  bool active() const { return active_; }

  Picos next() {
    const double t = static_cast<double>(k_++) * period_ps_;
    return phase_ + static_cast<Picos>(t + 0.5);
  }

 private:
  double period_ps_;
  Picos phase_ = 0;
  std::uint64_t k_ = 0;
  bool active_ = false;
};

/// Batch API over the incremental generators. All functions are pure in
/// (arguments, seed) and return time-sorted vectors.

std::vector<ArrivalEvent> gen_poisson_arrivals(double rate, double duration,
                                               std::uint64_t seed);

std::vector<ArrivalEvent> gen_injection_pulses(double rate, Picos phase,
                                               double duration);

/// Routes each photon to D1 with probability split_prob_d1, else D0.
std::pair<std::vector<Picos>, std::vector<Picos>> route_splitter(
    const std::vector<ArrivalEvent>& photons, double split_prob_d1,
    std::uint64_t seed);

/// Copies every injection pulse onto BOTH channels at the same timestamp
/// (stable merge with the per-channel photon streams).
std::pair<std::vector<ArrivalEvent>, std::vector<ArrivalEvent>>
merge_with_injection(const std::vector<Picos>& photons_d0,
                     const std::vector<Picos>& photons_d1,
                     const std::vector<ArrivalEvent>& injections);

}  // namespace combosim
