#include "combosim/arrival.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace combosim {

namespace {

// Batch generation keeps whole event lists in memory; cap the expected
// count so a bad config fails fast instead of exhausting the machine.
constexpr double kMaxExpectedEvents = 2e9;

void check_source(double rate, double duration) {
  if (!(rate > 0)) throw std::invalid_argument("arrival rate must be > 0");
  if (!(duration > 0)) throw std::invalid_argument("duration must be > 0");
  if (duration > 9e6)
    throw std::invalid_argument("duration exceeds the 64-bit ps time axis");
  const double expected = rate * duration;
  if (expected > kMaxExpectedEvents)
    throw std::invalid_argument(
        "expected event count " + std::to_string(expected) +
        " overflows the event-count capacity (" +
        std::to_string(kMaxExpectedEvents) + ")");
}

}  // namespace

std::vector<ArrivalEvent> gen_poisson_arrivals(double rate, double duration,
                                               std::uint64_t seed) {
  check_source(rate, duration);
  const Picos end = sec_to_ps(duration);
  std::vector<ArrivalEvent> events;
  events.reserve(static_cast<std::size_t>(rate * duration * 1.01) + 16);
  PoissonArrivalGen gen(rate, seed);
  for (Picos t = gen.next(); t < end; t = gen.next())
    events.push_back({t, ArrivalKind::Photon});
  return events;
}

std::vector<ArrivalEvent> gen_injection_pulses(double rate, Picos phase,
                                               double duration) {
  if (rate < 0) throw std::invalid_argument("injection rate must be >= 0");
  std::vector<ArrivalEvent> events;
  if (rate == 0) return events;
  if (rate * duration > kMaxExpectedEvents)
    throw std::invalid_argument("injection count overflows capacity");
  const Picos end = sec_to_ps(duration);
  InjectionGen gen(rate, phase);
  for (Picos t = gen.next(); t < end; t = gen.next())
    if (t >= 0) events.push_back({t, ArrivalKind::Injection});
  return events;
}

std::pair<std::vector<Picos>, std::vector<Picos>> route_splitter(
    const std::vector<ArrivalEvent>& photons, double split_prob_d1,
    std::uint64_t seed) {
  if (split_prob_d1 < 0 || split_prob_d1 > 1)
    throw std::invalid_argument("split probability must lie in [0, 1]");
  std::vector<Picos> d0, d1;
  Rng rng(seed);
  for (const ArrivalEvent& ev : photons) {
    if (rng.bernoulli(split_prob_d1))
      d1.push_back(ev.time);
    else
      d0.push_back(ev.time);
  }
  return {std::move(d0), std::move(d1)};
}

namespace {

std::vector<ArrivalEvent> merge_one(const std::vector<Picos>& photons,
                                    const std::vector<ArrivalEvent>& inj) {
  std::vector<ArrivalEvent> out;
  out.reserve(photons.size() + inj.size());
  std::size_t i = 0, j = 0;
  while (i < photons.size() || j < inj.size()) {
    // Stable merge, photons first on exact ties.
    if (j == inj.size() ||
        (i < photons.size() && photons[i] <= inj[j].time)) {
      out.push_back({photons[i++], ArrivalKind::Photon});
    } else {
      out.push_back(inj[j++]);
    }
  }
  return out;
}

}  // namespace

std::pair<std::vector<ArrivalEvent>, std::vector<ArrivalEvent>>
merge_with_injection(const std::vector<Picos>& photons_d0,
                     const std::vector<Picos>& photons_d1,
                     const std::vector<ArrivalEvent>& injections) {
  return {merge_one(photons_d0, injections), merge_one(photons_d1, injections)};
}

}  // namespace combosim
