#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "combosim/bitstream.hpp"
#include "combosim/events.hpp"

namespace combosim {

/// Blanking filter configuration. The window is non-retriggerable: it is
/// anchored at accepted events only, and suppressed events never restart it.
struct BlankParams {
  enum class Retrigger : std::uint8_t { AcceptedOnly };

  Picos blank_window = Picos{17'600};  ///< delta-t, ps; 0 disables blanking
  Retrigger retrigger = Retrigger::AcceptedOnly;

  void validate() const;
};

/// Result of running the blanking filter over a merged detection stream.
struct BlankedStream {
  std::vector<DetectionEvent> accepted;
  std::uint64_t blanked_count = 0;
  double duration = 0.0;  ///< seconds
};

/// Interval-measuring clock configuration for the temporal extractor.
struct ClockParams {
  enum class Mode : std::uint8_t { Restartable, FreeRunning };

  Picos clock_period = kPsPerNs;
  Mode mode = Mode::Restartable;

  void validate() const;
};

/// Streaming blanking filter. An event is accepted iff it lies at least
/// blank_window past the previous ACCEPTED event; the first event is always
/// accepted. A suppressed event that shares its timestamp with the accepted
/// event, both injection-tagged on opposite channels, collapses the pair:
/// the survivor is re-tagged to channel D1 so the spatial extractor emits
/// the single '1' the pair produces in hardware.
///
/// Emission is delayed by one event (the possible injection twin), so flush()
/// must be called once the input is exhausted.
class Blanker {
 public:
  using Sink = std::function<void(const DetectionEvent&)>;

  explicit Blanker(const BlankParams& params) : params_(params) {
    params_.validate();
  }

  void feed(const DetectionEvent& ev, const Sink& out);
  void flush(const Sink& out);

  std::uint64_t blanked_count() const { return blanked_count_; }

 private:
  BlankParams params_;
  std::optional<DetectionEvent> held_;
  Picos last_accept_ = std::numeric_limits<Picos>::min();
  bool any_accepted_ = false;
  std::uint64_t blanked_count_ = 0;
};

/// Streaming temporal extractor: consumes accepted events, measures the two
/// intervals of each event triplet in whole clock periods and compares them.
/// Slot boundaries advance two events per slot (the third event opens the
/// next slot). A tie consumes the slot without emitting.
class T1T2Tracker {
 public:
  explicit T1T2Tracker(const ClockParams& clock) : clock_(clock) {
    clock_.validate();
  }

  /// Feeds the next accepted event time. Returns the emitted bit, or
  /// nullopt when no slot completed or the slot was a tie.
  std::optional<bool> feed(Picos t);

  std::uint64_t tie_count() const { return tie_count_; }
  bool slot_just_tied() const { return slot_just_tied_; }

 private:
  std::int64_t ticks(Picos from, Picos to) const;

  ClockParams clock_;
  bool has_last_ = false;
  Picos last_ = 0;
  bool has_first_interval_ = false;
  std::int64_t first_ticks_ = 0;
  std::uint64_t tie_count_ = 0;
  bool slot_just_tied_ = false;
};

/// Everything the full extraction pipeline produces for one run.
struct PipelineResult {
  BitStream s{StreamLabel::S};
  BitStream y{StreamLabel::Y};
  BitStream t{StreamLabel::T};
  BitStream c{StreamLabel::C};
  std::uint64_t accepted_count = 0;
  std::uint64_t blanked_count = 0;
  std::uint64_t tie_count = 0;
  double duration = 0.0;  ///< seconds
  double f_g = 0.0;       ///< bit generation rate, |C| / duration
  double f_b = 0.0;       ///< blanked events rate
};

/// Streaming core of the combined generator: merged detections go through
/// the blanking filter, then the SAME accepted stream feeds the spatial
/// (bit per event, pair-XOR to Y) and temporal (T1T2) sections. C XORs each
/// emitted T bit with the Y latch, which holds the PREVIOUS slot's Y bit:
/// the latch updates only after the slot's comparison strobes. The one-slot
/// lag keeps the two XOR inputs free of shared events; pairing a T bit with
/// its own slot's Y couples them through the dead-time floor on same-channel
/// gaps and biases C by a few percent.
class PipelineExtractor {
 public:
  PipelineExtractor(const BlankParams& blank, const ClockParams& clock)
      : blanker_(blank), t1t2_(clock) {}

  void feed(const DetectionEvent& ev);
  /// Finalizes counters and rates; call exactly once, with the simulated
  /// duration in seconds.
  PipelineResult finish(double duration);

 private:
  void accepted(const DetectionEvent& ev);

  Blanker blanker_;
  T1T2Tracker t1t2_;
  PipelineResult result_;
  std::uint64_t event_index_ = 0;
  bool prev_s_bit_ = false;
  bool y_pending_ = false;
  bool y_latch_ = false;  // powers up 0, like the hardware flip-flop
};

/// Batch operations mirroring the streaming classes.

BlankedStream blank(const std::vector<DetectionEvent>& merged,
                    const BlankParams& params);

/// Spatial extraction: one bit per accepted event, D0 -> 0, D1 -> 1.
BitStream extract_bsr(const std::vector<DetectionEvent>& accepted);

/// XOR of non-overlapping pairs of consecutive bits; a trailing odd bit is
/// discarded.
BitStream derive_y(const BitStream& s);

BitStream extract_t1t2(const std::vector<DetectionEvent>& accepted,
                       const ClockParams& clock);

/// Same comparison but against a global tick grid (t = k * clock_period)
/// instead of a per-interval restarted clock. Provided to demonstrate the
/// correlation the restartable clock removes.
BitStream extract_t1t2_freerunning(const std::vector<DetectionEvent>& accepted,
                                   const ClockParams& clock);

/// Index-wise XOR of two bit streams; excess bits of the longer stream are
/// discarded.
BitStream combine(const BitStream& t, const BitStream& y);

PipelineResult run_pipeline(const std::vector<DetectionEvent>& d0,
                            const std::vector<DetectionEvent>& d1,
                            const BlankParams& blank_params,
                            const ClockParams& clock, double duration);

}  // namespace combosim
