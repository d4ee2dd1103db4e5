#include "combosim/detector.hpp"

#include <algorithm>
#include <stdexcept>

namespace combosim {

void DetectorParams::validate() const {
  if (dead_time <= 0) throw std::invalid_argument("dead_time must be > 0");
  if (afterpulse_prob < 0 || afterpulse_prob >= 1)
    throw std::invalid_argument("afterpulse_prob must lie in [0, 1)");
  if (afterpulse_mean_delay < 0)
    throw std::invalid_argument("afterpulse_mean_delay must be >= 0");
  if (efficiency <= 0 || efficiency > 1)
    throw std::invalid_argument("efficiency must lie in (0, 1]");
  if (injection_detect_prob < 0 || injection_detect_prob > 1)
    throw std::invalid_argument("injection_detect_prob must lie in [0, 1]");
}

void DetectorScanner::candidate(Picos t, Origin origin, const Sink& out) {
  // Thinning draws happen for every photon/injection candidate, dead or
  // not, so the draw sequence depends only on the arrival sequence.
  if (origin == Origin::Photon) {
    if (!rng_.bernoulli(params_.efficiency)) return;
  } else if (origin == Origin::Injection) {
    if (!rng_.bernoulli(params_.injection_detect_prob)) return;
  }
  if (t < next_free_) return;  // non-paralyzable: window not extended
  out(DetectionEvent{t, channel_, origin});
  next_free_ = t + params_.dead_time;
  if (params_.afterpulse_prob > 0 && rng_.bernoulli(params_.afterpulse_prob)) {
    const auto extra = static_cast<Picos>(
        rng_.exponential(static_cast<double>(params_.afterpulse_mean_delay)));
    pending_.push(t + params_.dead_time + extra);
  }
}

void DetectorScanner::feed(const ArrivalEvent& ev, const Sink& out) {
  while (!pending_.empty() && pending_.top() < ev.time) {
    const Picos t = pending_.top();
    pending_.pop();
    candidate(t, Origin::Afterpulse, out);
  }
  candidate(ev.time,
            ev.kind == ArrivalKind::Photon ? Origin::Photon : Origin::Injection,
            out);
}

void DetectorScanner::advance_to(Picos horizon, const Sink& out) {
  while (!pending_.empty() && pending_.top() < horizon) {
    const Picos t = pending_.top();
    pending_.pop();
    candidate(t, Origin::Afterpulse, out);
  }
}

std::vector<DetectionEvent> detect(const std::vector<ArrivalEvent>& arrivals,
                                   const DetectorParams& params,
                                   Channel channel, std::uint64_t seed) {
  std::vector<DetectionEvent> detections;
  DetectorScanner scanner(params, channel, seed);
  const auto sink = [&detections](const DetectionEvent& ev) {
    detections.push_back(ev);
  };
  for (const ArrivalEvent& ev : arrivals) scanner.feed(ev, sink);
  if (!arrivals.empty())
    scanner.advance_to(std::numeric_limits<Picos>::max(), sink);
  return detections;
}

std::vector<DetectionEvent> merge_channels(
    const std::vector<DetectionEvent>& d0,
    const std::vector<DetectionEvent>& d1) {
  std::vector<DetectionEvent> out;
  out.reserve(d0.size() + d1.size());
  std::size_t i = 0, j = 0;
  while (i < d0.size() || j < d1.size()) {
    if (j == d1.size() || (i < d0.size() && d0[i].time <= d1[j].time))
      out.push_back(d0[i++]);
    else
      out.push_back(d1[j++]);
  }
  return out;
}

double deadtime_detected_rate(double arrival_rate, Picos dead_time) {
  return arrival_rate / (1.0 + arrival_rate * ps_to_sec(dead_time));
}

double invert_detected_rate(double target_rate, const DetectorParams& params) {
  if (target_rate <= 0) return 0.0;
  const double tau_d = ps_to_sec(params.dead_time);
  if (target_rate * tau_d >= 1.0)
    throw std::invalid_argument(
        "target detected rate exceeds the 1/dead_time saturation limit");
  // Candidate pulses = photons + afterpulses (p_a per detection); invert
  // f = mu / (1 + mu * tau_d) for the candidate rate mu, then subtract the
  // afterpulse share and undo efficiency thinning.
  const double mu = target_rate / (1.0 - target_rate * tau_d);
  const double photon_part = mu - params.afterpulse_prob * target_rate;
  if (photon_part <= 0)
    throw std::invalid_argument("afterpulses alone exceed the target rate");
  return photon_part / params.efficiency;
}

}  // namespace combosim
