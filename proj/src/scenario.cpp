#include "combosim/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "combosim/arrival.hpp"
#include "combosim/rng.hpp"

namespace combosim {

void ScenarioSpec::validate() const {
  if (f_d0 < 0 || f_d1 < 0 || f_inject < 0)
    throw std::invalid_argument("rates must be >= 0");
  if (n_target_bits < 1)
    throw std::invalid_argument("n_target_bits must be >= 1");
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  detector.validate();
  blank.validate();
  clock.validate();
}

std::uint64_t point_seed(std::uint64_t master, std::size_t index) {
  return mix_seed(master, 0x106 + index);
}

namespace {

// Planned rates through the chain, used only to size the simulated
// duration; all reported quantities are measured.
struct RatePlan {
  double detected = 0.0;  // merged, all origins
  double accepted = 0.0;
  double c_bits = 0.0;
};

RatePlan plan_rates(const PointParams& p) {
  RatePlan plan;
  plan.detected = p.f_d0 + p.f_d1 +
                  2.0 * p.f_inject * p.detector.injection_detect_prob;
  const double blank_s = ps_to_sec(p.blank.blank_window);
  plan.accepted = plan.detected / (1.0 + plan.detected * blank_s);
  const double tie_frac = std::min(
      0.9, 0.5 * ps_to_sec(p.clock.clock_period) * plan.accepted);
  plan.c_bits = 0.5 * plan.accepted * (1.0 - tie_frac);
  return plan;
}

}  // namespace

PointSimulator::PointSimulator(const PointParams& params) : params_(params) {
  params_.detector.validate();
  params_.blank.validate();
  params_.clock.validate();
  const double lambda0 = invert_detected_rate(params_.f_d0, params_.detector);
  const double lambda1 = invert_detected_rate(params_.f_d1, params_.detector);
  source_rate_ = lambda0 + lambda1;
  split_prob_ = source_rate_ > 0 ? lambda1 / source_rate_ : 0.5;
  split_prob_ = std::clamp(split_prob_ + params_.split_detune, 0.0, 1.0);

  const RatePlan plan = plan_rates(params_);
  const double stream_rate =
      params_.target_stream == StreamLabel::S ? plan.accepted : plan.c_bits;
  if (stream_rate > 0) {
    duration_ = 1.06 * static_cast<double>(params_.target_bits) / stream_rate;
  } else {
    duration_ = 1e-3;  // no events expected; keep the run finite
  }
}

PipelineResult PointSimulator::run() {
  const Picos end = sec_to_ps(duration_);
  const std::uint64_t seed = params_.seed;

  PoissonArrivalGen photons(source_rate_ > 0 ? source_rate_ : 1.0,
                            stream_seed(seed, RngStream::Source));
  Rng route(stream_seed(seed, RngStream::Splitter));
  const Picos inj_phase = params_.injection_phase.value_or(
      params_.f_inject > 0
          ? static_cast<Picos>(0.5e12 / params_.f_inject + 0.5)
          : 0);
  InjectionGen injections(params_.f_inject, inj_phase);

  DetectorScanner det0(params_.detector, Channel::D0,
                       stream_seed(seed, RngStream::Detector0));
  DetectorScanner det1(params_.detector, Channel::D1,
                       stream_seed(seed, RngStream::Detector1));
  PipelineExtractor pipeline(params_.blank, params_.clock);

  // Lookahead events (first time >= current window end stays pending).
  Picos next_photon = source_rate_ > 0 ? photons.next() : end;
  Picos next_inj = injections.active() ? injections.next() : end;
  while (injections.active() && next_inj < 0) next_inj = injections.next();

  std::vector<ArrivalEvent> arr0, arr1;
  std::vector<DetectionEvent> det_buf0, det_buf1;

  constexpr Picos kWindow = 20 * kPsPerMs;
  for (Picos w_start = 0; w_start < end; w_start += kWindow) {
    const Picos w_end = std::min(end, w_start + kWindow);
    arr0.clear();
    arr1.clear();

    // Photons and injections interleave per channel in time order; on a
    // per-channel tie the photon precedes, matching the batch merge.
    while (next_photon < w_end || next_inj < w_end) {
      if (next_photon <= next_inj) {
        const ArrivalEvent ev{next_photon, ArrivalKind::Photon};
        const bool to_d1 = route.bernoulli(split_prob_);
        if (to_d1)
          arr1.push_back(ev);
        else
          arr0.push_back(ev);
        if (arrival_sink_)
          arrival_sink_(ev, to_d1 ? Channel::D1 : Channel::D0);
        next_photon = source_rate_ > 0 ? photons.next() : end;
      } else {
        const ArrivalEvent ev{next_inj, ArrivalKind::Injection};
        arr0.push_back(ev);
        arr1.push_back(ev);
        if (arrival_sink_) {
          arrival_sink_(ev, Channel::D0);
          arrival_sink_(ev, Channel::D1);
        }
        next_inj = injections.next();
      }
    }

    det_buf0.clear();
    det_buf1.clear();
    const auto sink0 = [&](const DetectionEvent& ev) { det_buf0.push_back(ev); };
    const auto sink1 = [&](const DetectionEvent& ev) { det_buf1.push_back(ev); };
    for (const ArrivalEvent& ev : arr0) det0.feed(ev, sink0);
    for (const ArrivalEvent& ev : arr1) det1.feed(ev, sink1);
    det0.advance_to(w_end, sink0);
    det1.advance_to(w_end, sink1);
    detections_d0_ += det_buf0.size();
    detections_d1_ += det_buf1.size();

    std::size_t i = 0, j = 0;
    while (i < det_buf0.size() || j < det_buf1.size()) {
      const bool take0 =
          j == det_buf1.size() ||
          (i < det_buf0.size() && det_buf0[i].time <= det_buf1[j].time);
      const DetectionEvent& ev = take0 ? det_buf0[i++] : det_buf1[j++];
      pipeline.feed(ev);
      if (detection_sink_) detection_sink_(ev);
    }
  }
  det0.finish();
  det1.finish();
  return pipeline.finish(duration_);
}

PointReport run_point(const PointParams& params) {
  PointSimulator sim(params);
  const PipelineResult result = sim.run();

  PointReport report;
  report.params = params;
  report.duration = result.duration;
  report.s = metrics(result.s, params.k_max);
  report.y = metrics(result.y, params.k_max);
  report.t = metrics(result.t, params.k_max);
  report.c = metrics(result.c, params.k_max);
  report.f_g = result.f_g;
  report.f_b = result.f_b;
  report.detections_d0 = sim.detections_d0();
  report.detections_d1 = sim.detections_d1();
  report.accepted = result.accepted_count;
  report.blanked = result.blanked_count;
  report.ties = result.tie_count;
  report.rate_d0 = static_cast<double>(report.detections_d0) / result.duration;
  report.rate_d1 = static_cast<double>(report.detections_d1) / result.duration;

  const bool ty_ok = !report.t.degenerate && !report.y.degenerate &&
                     result.t.size() >= 2 && result.y.size() >= 2 &&
                     std::min(result.t.size(), result.y.size()) >
                         static_cast<std::size_t>(params.k_max);
  if (ty_ok) report.ty = crosscorr(result.t, result.y, params.k_max);

  if (!report.s.degenerate) {
    try {
      const MarkovBitModel s_model{report.s.bias, report.s.at_lag(1).value};
      report.y_pred = propagate_pairxor(s_model);
      if (!report.t.degenerate) {
        const MarkovBitModel t_model{report.t.bias, report.t.at_lag(1).value};
        report.c_pred = propagate_xor(t_model, report.y_pred->exact);
      }
    } catch (const std::invalid_argument&) {
      // Measured metrics outside the model's domain; leave predictions unset.
    }
  }
  const double mean_rate = 0.5 * (report.rate_d0 + report.rate_d1);
  if (mean_rate > 0) {
    const auto tau = static_cast<Picos>(1e12 / mean_rate);
    report.a_deadtime_pred =
        predict_deadtime_autocorr(params.detector.dead_time, tau);
    report.a_net_pred = predict_net_autocorr(
        {params.detector.dead_time, tau, params.detector.afterpulse_prob});
  }
  if (!report.s.degenerate && params.k_max >= 2)
    report.markov_pass_s = markov_check(report.s).second;
  if (!report.t.degenerate && params.k_max >= 2)
    report.markov_pass_t = markov_check(report.t).second;
  return report;
}

namespace {

PointParams base_point(const ScenarioSpec& spec) {
  PointParams p;
  p.f_d0 = spec.f_d0;
  p.f_d1 = spec.f_d1;
  p.f_inject = spec.f_inject;
  p.injection_phase = spec.injection_phase;
  p.split_detune = spec.split_detune;
  p.blank = spec.blank;
  p.clock = spec.clock;
  p.detector = spec.detector;
  p.target_bits = spec.n_target_bits;
  p.target_stream = StreamLabel::C;
  p.seed = point_seed(spec.seed, 0);
  p.k_max = spec.k_max;
  return p;
}

std::vector<PointReport> run_points(const std::vector<PointParams>& points,
                                    int jobs) {
  std::vector<PointReport> reports(points.size());
  if (jobs <= 1 || points.size() <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i)
      reports[i] = run_point(points[i]);
    return reports;
  }
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < points.size();
         i = next.fetch_add(1))
      reports[i] = run_point(points[i]);
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min<int>(jobs, static_cast<int>(points.size()));
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return reports;
}

std::vector<double> default_rate_grid(double nominal) {
  std::vector<double> grid;
  for (int i = 1; i <= 9; ++i) grid.push_back(nominal * i / 10.0);
  return grid;
}

}  // namespace

ScenarioReport run_nominal(const ScenarioSpec& spec) {
  spec.validate();
  ScenarioReport report;
  report.spec = spec;
  report.points.push_back(run_point(base_point(spec)));
  return report;
}

ScenarioReport sweep_rate(const ScenarioSpec& spec) {
  spec.validate();
  ScenarioReport report;
  report.spec = spec;
  std::vector<double> grid = spec.sweep_rates;
  if (grid.empty()) grid = default_rate_grid(std::max(spec.f_d0, spec.f_d1));

  std::vector<PointParams> points;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    PointParams p = base_point(spec);
    p.f_d0 = grid[i];
    p.f_d1 = grid[i];
    p.target_stream = StreamLabel::S;
    p.seed = point_seed(spec.seed, i);
    points.push_back(p);
  }
  report.points = run_points(points, spec.jobs);

  // Locate the a_S(1) sign change on the per-detector rate axis.
  for (std::size_t i = 0; i + 1 < report.points.size(); ++i) {
    const auto& lo = report.points[i];
    const auto& hi = report.points[i + 1];
    if (lo.s.degenerate || hi.s.degenerate) continue;
    const double a0 = lo.s.at_lag(1).value;
    const double a1 = hi.s.at_lag(1).value;
    if (a0 == 0.0 || (a0 > 0) == (a1 > 0)) continue;
    const double x0 = grid[i], x1 = grid[i + 1];
    report.crossover_rate = x0 + (x1 - x0) * (0.0 - a0) / (a1 - a0);
    break;
  }
  if (!report.crossover_rate)
    report.note = "no autocorrelation sign change bracketed by the rate grid";
  return report;
}

ScenarioReport sweep_blank(const ScenarioSpec& spec) {
  spec.validate();
  ScenarioReport report;
  report.spec = spec;
  std::vector<Picos> grid = spec.sweep_blanks;
  if (grid.empty())
    for (int k = 0; k <= 8; ++k)
      grid.push_back(Picos{5'600} + k * Picos{4'000});  // hardware delay grid

  std::vector<PointParams> points;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    PointParams p = base_point(spec);
    p.blank.blank_window = grid[i];
    p.target_stream = StreamLabel::S;
    p.seed = point_seed(spec.seed, i);
    points.push_back(p);
  }
  report.points = run_points(points, spec.jobs);
  return report;
}

ScenarioReport scenario_failure(const ScenarioSpec& spec) {
  spec.validate();
  ScenarioReport report;
  report.spec = spec;
  std::vector<double> grid = spec.sweep_rates;
  if (grid.empty())
    grid = {0.0, 0.25 * spec.f_d1, 0.5 * spec.f_d1, 0.75 * spec.f_d1,
            spec.f_d1};

  std::vector<PointParams> points;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    PointParams p = base_point(spec);
    p.f_d1 = grid[i];  // D0 stays at its nominal target
    p.seed = point_seed(spec.seed, i);
    points.push_back(p);
  }
  report.points = run_points(points, spec.jobs);
  return report;
}

ScenarioReport scenario_injection(const ScenarioSpec& spec) {
  spec.validate();
  ScenarioReport report;
  report.spec = spec;
  std::vector<double> grid = spec.sweep_inject;
  if (grid.empty())
    for (int i = 0; i <= 7; ++i) grid.push_back(1e6 * i);

  std::vector<PointParams> points;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    PointParams p = base_point(spec);
    p.f_inject = grid[i];
    p.seed = point_seed(spec.seed, i);
    points.push_back(p);
  }
  report.points = run_points(points, spec.jobs);
  return report;
}

MonitoringReport scenario_monitoring(const ScenarioSpec& spec) {
  spec.validate();
  MonitoringReport report;
  report.nominal = run_point(base_point(spec));

  const std::vector<double> fractions = {1.0, 0.75, 0.5, 0.25, 0.1, 0.05};

  {
    ScenarioSpec s = spec;
    s.sweep_rates.clear();
    for (double f : fractions) s.sweep_rates.push_back(spec.f_d0 * f);
    ScenarioReport r;
    r.spec = s;
    std::vector<PointParams> points;
    for (std::size_t i = 0; i < s.sweep_rates.size(); ++i) {
      PointParams p = base_point(s);
      p.f_d0 = s.sweep_rates[i];
      p.f_d1 = s.sweep_rates[i];
      p.seed = point_seed(spec.seed ^ 0x11, i);
      points.push_back(p);
    }
    r.points = run_points(points, spec.jobs);
    report.both_failing = std::move(r);
  }
  {
    ScenarioSpec s = spec;
    ScenarioReport r;
    r.spec = s;
    std::vector<PointParams> points;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
      PointParams p = base_point(s);
      p.f_d0 = spec.f_d0 * fractions[i];
      p.seed = point_seed(spec.seed ^ 0x22, i);
      points.push_back(p);
    }
    r.points = run_points(points, spec.jobs);
    report.d0_failing = std::move(r);
  }
  {
    ScenarioSpec s = spec;
    s.sweep_inject.clear();
    for (int i = 0; i <= 7; ++i) s.sweep_inject.push_back(1e6 * i);
    ScenarioReport r;
    r.spec = s;
    std::vector<PointParams> points;
    for (std::size_t i = 0; i < s.sweep_inject.size(); ++i) {
      PointParams p = base_point(s);
      p.f_inject = s.sweep_inject[i];
      p.seed = point_seed(spec.seed ^ 0x33, i);
      points.push_back(p);
    }
    r.points = run_points(points, spec.jobs);
    report.injection = std::move(r);
  }
  return report;
}

}  // namespace combosim
