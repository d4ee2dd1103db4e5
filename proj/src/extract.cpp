#include "combosim/extract.hpp"

#include <stdexcept>

#include "combosim/detector.hpp"

namespace combosim {

void BlankParams::validate() const {
  if (blank_window < 0)
    throw std::invalid_argument("blank_window must be >= 0");
}

void ClockParams::validate() const {
  if (clock_period <= 0)
    throw std::invalid_argument("clock_period must be > 0");
}

void Blanker::feed(const DetectionEvent& ev, const Sink& out) {
  const bool accept = !any_accepted_ || ev.time >= last_accept_ + params_.blank_window;
  if (accept) {
    if (held_) out(*held_);
    held_ = ev;
    last_accept_ = ev.time;
    any_accepted_ = true;
    return;
  }
  ++blanked_count_;
  // Injection twin: same timestamp on the opposite channel. The held
  // survivor becomes the single '1' of the pair.
  if (held_ && held_->time == ev.time && held_->origin == Origin::Injection &&
      ev.origin == Origin::Injection && held_->channel != ev.channel) {
    held_->channel = Channel::D1;
  }
}

void Blanker::flush(const Sink& out) {
  if (held_) {
    out(*held_);
    held_.reset();
  }
}

std::int64_t T1T2Tracker::ticks(Picos from, Picos to) const {
  const Picos g = clock_.clock_period;
  if (clock_.mode == ClockParams::Mode::Restartable) {
    // Clock phase resets at the opening event, so the count is a pure
    // function of the interval length.
    return (to - from) / g;
  }
  // Free-running: ticks lie on the fixed grid k*g; count those in (from, to].
  return to / g - from / g;
}

std::optional<bool> T1T2Tracker::feed(Picos t) {
  slot_just_tied_ = false;
  if (!has_last_) {
    has_last_ = true;
    last_ = t;
    return std::nullopt;
  }
  const std::int64_t n = ticks(last_, t);
  last_ = t;
  if (!has_first_interval_) {
    first_ticks_ = n;
    has_first_interval_ = true;
    return std::nullopt;
  }
  has_first_interval_ = false;
  if (first_ticks_ > n) return false;
  if (n > first_ticks_) return true;
  ++tie_count_;
  slot_just_tied_ = true;
  return std::nullopt;
}

void PipelineExtractor::accepted(const DetectionEvent& ev) {
  ++result_.accepted_count;
  const bool s_bit = ev.channel == Channel::D1;
  result_.s.append(s_bit);
  if (event_index_ % 2 == 1) {
    y_pending_ = prev_s_bit_ != s_bit;
    result_.y.append(y_pending_);
  }
  prev_s_bit_ = s_bit;
  ++event_index_;

  const auto t_bit = t1t2_.feed(ev.time);
  if (t_bit) {
    result_.t.append(*t_bit);
    result_.c.append(*t_bit != y_latch_);
  }
  // Latch the slot's Y only after its comparison resolved (bit or tie).
  if (t_bit || t1t2_.slot_just_tied()) y_latch_ = y_pending_;
}

void PipelineExtractor::feed(const DetectionEvent& ev) {
  blanker_.feed(ev, [this](const DetectionEvent& acc) { accepted(acc); });
}

PipelineResult PipelineExtractor::finish(double duration) {
  blanker_.flush([this](const DetectionEvent& acc) { accepted(acc); });
  result_.blanked_count = blanker_.blanked_count();
  result_.tie_count = t1t2_.tie_count();
  result_.duration = duration;
  if (duration > 0) {
    result_.f_g = static_cast<double>(result_.c.size()) / duration;
    result_.f_b = static_cast<double>(result_.blanked_count) / duration;
  }
  result_.s.set_production_time(duration);
  result_.y.set_production_time(duration);
  result_.t.set_production_time(duration);
  result_.c.set_production_time(duration);
  return result_;
}

BlankedStream blank(const std::vector<DetectionEvent>& merged,
                    const BlankParams& params) {
  BlankedStream out;
  Blanker blanker(params);
  const auto sink = [&out](const DetectionEvent& ev) {
    out.accepted.push_back(ev);
  };
  for (const DetectionEvent& ev : merged) blanker.feed(ev, sink);
  blanker.flush(sink);
  out.blanked_count = blanker.blanked_count();
  if (!merged.empty()) out.duration = ps_to_sec(merged.back().time);
  return out;
}

BitStream extract_bsr(const std::vector<DetectionEvent>& accepted) {
  BitStream s(StreamLabel::S);
  for (const DetectionEvent& ev : accepted)
    s.append(ev.channel == Channel::D1);
  return s;
}

BitStream derive_y(const BitStream& s) {
  BitStream y(StreamLabel::Y);
  const std::size_t pairs = s.size() / 2;
  for (std::size_t i = 0; i < pairs; ++i)
    y.append(s.get(2 * i) != s.get(2 * i + 1));
  y.set_production_time(s.production_time());
  return y;
}

namespace {

BitStream t1t2_impl(const std::vector<DetectionEvent>& accepted,
                    const ClockParams& clock) {
  BitStream t(StreamLabel::T);
  T1T2Tracker tracker(clock);
  for (const DetectionEvent& ev : accepted)
    if (auto bit = tracker.feed(ev.time)) t.append(*bit);
  return t;
}

}  // namespace

BitStream extract_t1t2(const std::vector<DetectionEvent>& accepted,
                       const ClockParams& clock) {
  if (clock.mode != ClockParams::Mode::Restartable)
    throw std::invalid_argument("extract_t1t2 requires the restartable clock");
  return t1t2_impl(accepted, clock);
}

BitStream extract_t1t2_freerunning(const std::vector<DetectionEvent>& accepted,
                                   const ClockParams& clock) {
  if (clock.mode != ClockParams::Mode::FreeRunning)
    throw std::invalid_argument(
        "extract_t1t2_freerunning requires the free-running clock");
  return t1t2_impl(accepted, clock);
}

BitStream combine(const BitStream& t, const BitStream& y) {
  BitStream c(StreamLabel::C);
  const std::size_t n = t.size() < y.size() ? t.size() : y.size();
  for (std::size_t i = 0; i < n; ++i) c.append(t.get(i) != y.get(i));
  c.set_production_time(t.production_time());
  return c;
}

PipelineResult run_pipeline(const std::vector<DetectionEvent>& d0,
                            const std::vector<DetectionEvent>& d1,
                            const BlankParams& blank_params,
                            const ClockParams& clock, double duration) {
  PipelineExtractor pipeline(blank_params, clock);
  for (const DetectionEvent& ev : merge_channels(d0, d1)) pipeline.feed(ev);
  return pipeline.finish(duration);
}

}  // namespace combosim
