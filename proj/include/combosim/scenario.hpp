#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "combosim/detector.hpp"
#include "combosim/extract.hpp"
#include "combosim/predict.hpp"
#include "combosim/stats.hpp"

namespace combosim {

/// Declarative description of one experiment family.
struct ScenarioSpec {
  enum class Mode {
    Nominal,
    RateSweep,
    BlankSweep,
    DetectorFailure,
    InjectionAttack,
    Monitoring,
  };

  Mode mode = Mode::Nominal;
  double f_d0 = 10e6;          ///< target detected rate of D0, counts/s
  double f_d1 = 10e6;          ///< target detected rate of D1, counts/s
  double f_inject = 0.0;       ///< periodic injection rate, pulses/s
  std::optional<Picos> injection_phase;  ///< default: half the period
  double split_detune = 0.0;   ///< added to the computed D1 routing probability
  BlankParams blank;
  ClockParams clock;
  DetectorParams detector;
  std::uint64_t n_target_bits = 10'000'000;
  std::uint64_t seed = 1;
  int k_max = 6;
  int jobs = 1;

  /// Sweep grids; defaults are filled per mode when left empty.
  std::vector<double> sweep_rates;     ///< per-detector, RateSweep/failure/monitor
  std::vector<Picos> sweep_blanks;
  std::vector<double> sweep_inject;

  void validate() const;
};

/// Resolved inputs of a single simulated point.
struct PointParams {
  double f_d0 = 0.0;
  double f_d1 = 0.0;
  double f_inject = 0.0;
  std::optional<Picos> injection_phase;
  double split_detune = 0.0;
  BlankParams blank;
  ClockParams clock;
  DetectorParams detector;
  std::uint64_t target_bits = 0;
  StreamLabel target_stream = StreamLabel::C;  ///< which stream target_bits means
  std::uint64_t seed = 0;
  int k_max = 6;
};

/// Everything measured and predicted at one point.
struct PointReport {
  PointParams params;
  double duration = 0.0;  ///< simulated seconds
  MetricsReport s, y, t, c;
  CrossCorrReport ty;
  double f_g = 0.0;
  double f_b = 0.0;
  std::uint64_t detections_d0 = 0;
  std::uint64_t detections_d1 = 0;
  std::uint64_t accepted = 0;
  std::uint64_t blanked = 0;
  std::uint64_t ties = 0;
  double rate_d0 = 0.0;  ///< measured detected rate, counts/s
  double rate_d1 = 0.0;

  /// Closed-form values computed from the measured stream metrics.
  std::optional<PairXorPrediction> y_pred;   ///< from measured (b_S, a_S)
  std::optional<MarkovBitModel> c_pred;      ///< measured T x predicted Y
  double a_deadtime_pred = 0.0;  ///< exp form at the measured per-detector rate
  double a_net_pred = 0.0;       ///< p_a - tau_d/tau at the same rate
  std::optional<bool> markov_pass_s, markov_pass_t;
};

struct ScenarioReport {
  ScenarioSpec spec;
  std::vector<PointReport> points;
  /// RateSweep: sign-change location of a_S(1), linearly interpolated
  /// between the bracketing grid points (per-detector rate, counts/s).
  std::optional<double> crossover_rate;
  std::string note;
};

/// Monitoring runs the three § failure/attack families plus the nominal
/// reference point; alarm flags compare each point against the reference.
struct MonitoringReport {
  PointReport nominal;
  ScenarioReport both_failing;   ///< f_D = both detectors' rate
  ScenarioReport d0_failing;     ///< f_D = rate of D0, D1 nominal
  ScenarioReport injection;      ///< f_D = injection rate
};

/// Chunked discrete-event simulator for one point: Poisson source ->
/// splitter -> per-channel injection merge -> detectors -> channel merge ->
/// blanking -> extraction, with bounded memory. Output is bit-exact equal
/// to composing the batch operations with the same seed.
class PointSimulator {
 public:
  using EventSink = std::function<void(const DetectionEvent&)>;
  using ArrivalSink = std::function<void(const ArrivalEvent&, Channel)>;

  explicit PointSimulator(const PointParams& params);

  /// Simulated duration chosen to hit the bit target, seconds.
  double planned_duration() const { return duration_; }
  double source_rate() const { return source_rate_; }
  double split_prob_d1() const { return split_prob_; }

  void set_detection_sink(EventSink sink) { detection_sink_ = std::move(sink); }
  void set_arrival_sink(ArrivalSink sink) { arrival_sink_ = std::move(sink); }

  PipelineResult run();

  std::uint64_t detections_d0() const { return detections_d0_; }
  std::uint64_t detections_d1() const { return detections_d1_; }

 private:
  PointParams params_;
  double source_rate_ = 0.0;
  double split_prob_ = 0.5;
  double duration_ = 0.0;
  std::uint64_t detections_d0_ = 0;
  std::uint64_t detections_d1_ = 0;
  EventSink detection_sink_;
  ArrivalSink arrival_sink_;
};

/// Runs one point end to end: simulate, estimate metrics, attach the
/// closed-form predictions.
PointReport run_point(const PointParams& params);

ScenarioReport run_nominal(const ScenarioSpec& spec);
ScenarioReport sweep_rate(const ScenarioSpec& spec);
ScenarioReport sweep_blank(const ScenarioSpec& spec);
ScenarioReport scenario_failure(const ScenarioSpec& spec);
ScenarioReport scenario_injection(const ScenarioSpec& spec);
MonitoringReport scenario_monitoring(const ScenarioSpec& spec);

/// Derives the per-point seed for sweep point `index` from the scenario
/// master seed.
std::uint64_t point_seed(std::uint64_t master, std::size_t index);

}  // namespace combosim
