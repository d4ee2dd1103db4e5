// Acceptance suite: one check per criterion, one PASS/FAIL line each.
// Fixed seeds make every run reproducible; tolerances are the statistical
// bounds stated with each criterion.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "combosim/arrival.hpp"
#include "combosim/extract.hpp"
#include "combosim/predict.hpp"
#include "combosim/scenario.hpp"
#include "combosim/stats.hpp"
#include "combosim/sts.hpp"

using namespace combosim;

namespace {

struct Criterion {
  int id;
  std::string name;
  bool pass = false;
  bool declared = false;  // informational entries are not pass/fail
  std::string detail;
};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

PointParams nominal_point(std::uint64_t seed, std::uint64_t bits,
                          StreamLabel target) {
  PointParams p;
  p.f_d0 = p.f_d1 = 10e6;
  p.blank.blank_window = 17'600;
  p.clock.clock_period = kPsPerNs;
  p.target_bits = bits;
  p.target_stream = target;
  p.seed = seed;
  return p;
}

Criterion criterion_1() {
  Criterion c{1, "dead-time autocorrelation (spatial bits, no blanking)"};
  PointParams p;
  p.f_d0 = p.f_d1 = 1e6;  // 1000 ns mean detected period per detector
  p.detector.dead_time = 40 * kPsPerNs;
  p.detector.afterpulse_prob = 0.0;
  p.blank.blank_window = 0;
  p.target_bits = 10'000'000;
  p.target_stream = StreamLabel::S;
  p.seed = 101;
  const auto r = run_point(p);
  const double predicted = std::expm1(-40.0 / 1000.0);  // -0.039211
  const double measured = r.s.at_lag(1).value;
  const double bound = 4.0 / std::sqrt(static_cast<double>(r.s.n_bits));
  c.pass = std::abs(measured - predicted) <= bound;
  c.detail = "a1 = " + fmt(measured) + ", formula " + fmt(predicted) +
             ", |diff| " + fmt(std::abs(measured - predicted)) + " <= " +
             fmt(bound) + " (N = " + std::to_string(r.s.n_bits) + ")";
  return c;
}

Criterion criterion_2() {
  Criterion c{2, "afterpulse/dead-time cancellation rate"};
  ScenarioSpec spec;
  spec.blank.blank_window = 0;
  spec.detector.dead_time = 24 * kPsPerNs;
  spec.detector.afterpulse_prob = 0.031;
  spec.n_target_bits = 4'000'000;
  spec.seed = 202;
  spec.sweep_rates = {0.4e6, 0.6e6, 0.8e6, 1.0e6, 1.2e6, 1.4e6, 1.6e6, 1.9e6};
  const auto report = sweep_rate(spec);
  const double f0 = predict_f0(0.031, 24 * kPsPerNs);  // 1.29 Mcps/detector
  if (!report.crossover_rate) {
    c.detail = "no sign change bracketed by the sweep";
    return c;
  }
  const double crossover = *report.crossover_rate;  // per-detector axis
  c.pass = crossover >= 0.7 * 1.3e6 && crossover <= 1.3 * 1.3e6;
  c.detail = "sign change at " + fmt(crossover) +
             " cps per detector (combined " + fmt(2 * crossover) +
             "), bound 1.3e6 +- 30% on the per-detector axis, formula f0 = " +
             fmt(f0);
  return c;
}

Criterion criterion_3() {
  Criterion c{3, "blanking past the dead time leaves no autocorrelation"};
  PointParams p = nominal_point(303, 10'000'000, StreamLabel::S);
  p.detector.afterpulse_prob = 0.0;
  p.blank.blank_window = 30 * kPsPerNs;  // > 24 ns dead time
  const auto r = run_point(p);
  const double measured = r.s.at_lag(1).value;
  const double bound = 4.0 * r.s.at_lag(1).sigma;
  c.pass = std::abs(measured) < bound;
  c.detail = "a1 = " + fmt(measured) + ", bound " + fmt(bound) +
             " at 10 Mcps/detector";
  if (!c.pass)
    c.detail +=
        " -- detections inside the blank window keep their dead time, which "
        "shadows the opposite channel past the window (vanishes at low rate "
        "or blanking >~ 2.5x dead time)";
  return c;
}

Criterion criterion_4() {
  Criterion c{4, "autocorrelation sign structure across the rate sweep"};
  ScenarioSpec spec;
  spec.blank.blank_window = 17'600;
  spec.n_target_bits = 10'000'000;
  spec.seed = 404;
  for (int i = 1; i <= 9; ++i) spec.sweep_rates.push_back(1e6 * i);
  const auto report = sweep_rate(spec);
  const auto& first = report.points.front().s.at_lag(1);
  const auto& last = report.points.back().s.at_lag(1);
  int sign_changes = 0;
  for (std::size_t i = 0; i + 1 < report.points.size(); ++i) {
    const double a0 = report.points[i].s.at_lag(1).value;
    const double a1 = report.points[i + 1].s.at_lag(1).value;
    if ((a0 > 0) != (a1 > 0)) ++sign_changes;
  }
  c.pass = first.value > 4 * first.sigma && last.value < -4 * last.sigma &&
           sign_changes == 1;
  c.detail = "a1(1 Mcps) = " + fmt(first.value) + ", a1(9 Mcps) = " +
             fmt(last.value) + ", sign changes = " +
             std::to_string(sign_changes) +
             (report.crossover_rate
                  ? ", crossover " + fmt(*report.crossover_rate) + " cps"
                  : "");
  return c;
}

Criterion criterion_5() {
  Criterion c{5, "pair-XOR propagation (exact forms and oracle)"};
  // Brute-force stationary-distribution oracle over a 5x5 grid.
  double max_err = 0.0;
  for (double b = -0.1; b <= 0.105; b += 0.05) {
    for (double a = -0.2; a <= 0.205; a += 0.1) {
      const MarkovBitModel m{b, a};
      const auto pred = propagate_pairxor(m);
      // Enumerate the 16 four-bit patterns of the stationary chain.
      const double p1 = m.p1();
      const double t11 = m.p1_given_1(), t10 = m.p1_given_0();
      const auto trans = [&](int from, int to) {
        const double t = from ? t11 : t10;
        return to ? t : 1 - t;
      };
      double py = 0, pyy = 0;
      for (int s0 = 0; s0 < 2; ++s0)
        for (int s1 = 0; s1 < 2; ++s1)
          for (int s2 = 0; s2 < 2; ++s2)
            for (int s3 = 0; s3 < 2; ++s3) {
              const double pr = (s0 ? p1 : 1 - p1) * trans(s0, s1) *
                                trans(s1, s2) * trans(s2, s3);
              if (s0 != s1) py += pr;
              if (s0 != s1 && s2 != s3) pyy += pr;
            }
      const double oracle_b = py - 0.5;
      const double oracle_a = (pyy - py * py) / (py * (1 - py));
      max_err = std::max({max_err, std::abs(pred.exact.b - oracle_b),
                          std::abs(pred.exact.a - oracle_a)});
    }
  }

  const MarkovBitModel m{0.01, 0.02};
  const auto s = gen_markov_bits(m, 100'000'000, 505);
  const auto y = derive_y(s);
  const auto [by, sby] = bias(y);
  const auto ay = autocorr(y, 1);
  const auto pred = propagate_pairxor(m);
  const bool b_ok = std::abs(by - pred.exact.b) <= 4 * sby;
  const bool a_ok = std::abs(ay[0].value - pred.exact.a) <= 4 * ay[0].sigma;
  c.pass = max_err <= 1e-10 && b_ok && a_ok;
  c.detail = "oracle max err " + fmt(max_err) + "; measured b_Y " + fmt(by) +
             " vs " + fmt(pred.exact.b) + ", a_Y " + fmt(ay[0].value) +
             " vs " + fmt(pred.exact.a) + " at N = 1e8";
  return c;
}

Criterion criterion_6() {
  Criterion c{6, "XOR propagation across independent streams"};
  const MarkovBitModel mt{0.01, 0.02};
  const MarkovBitModel my{-0.02, 0.05};
  const auto t = gen_markov_bits(mt, 100'000'000, 606);
  const auto y = gen_markov_bits(my, 100'000'000, 607);
  const auto xored = combine(t, y);
  const auto pred = propagate_xor(mt, my);
  const auto [bc, sbc] = bias(xored);
  const auto ac = autocorr(xored, 1);
  const bool b_ok = std::abs(bc - pred.b) <= 4 * sbc;
  const bool a_ok = std::abs(ac[0].value - pred.a) <= 4 * ac[0].sigma;
  c.pass = b_ok && a_ok;
  c.detail = "b_C " + fmt(bc) + " vs " + fmt(pred.b) + " (4sig " +
             fmt(4 * sbc) + "); a_C " + fmt(ac[0].value) + " vs " +
             fmt(pred.a) + " (4sig " + fmt(4 * ac[0].sigma) + ")";
  return c;
}

Criterion criterion_7() {
  Criterion c{7, "temporal/spatial cross-correlation consistent with zero"};
  const auto r = run_point(nominal_point(707, 10'000'000, StreamLabel::C));
  bool all_ok = !r.ty.lags.empty();
  double worst = 0.0;
  int worst_lag = 0;
  for (const auto& p : r.ty.lags) {
    if (std::abs(p.value) >= 4 * p.sigma) all_ok = false;
    if (std::abs(p.value) / p.sigma > worst) {
      worst = std::abs(p.value) / p.sigma;
      worst_lag = p.lag;
    }
  }
  c.pass = all_ok;
  c.detail = "13 lags in [-6, 6], worst |a_TY|/sigma = " + fmt(worst) +
             " at lag " + std::to_string(worst_lag) +
             " (N = " + std::to_string(r.ty.n_bits) + ")";
  return c;
}

Criterion criterion_8() {
  Criterion c{8, "free-running vs restartable clock at 10x the mean interval"};
  const double rate = 1e7;
  const Picos g = 1000 * kPsPerNs;  // 10x the 100 ns mean interval
  T1T2Tracker restart(ClockParams{g, ClockParams::Mode::Restartable});
  T1T2Tracker freerun(ClockParams{g, ClockParams::Mode::FreeRunning});
  BitStream tr(StreamLabel::T), tf(StreamLabel::T);
  PoissonArrivalGen gen(rate, 808);
  for (int i = 0; i < 10'000'000; ++i) {
    const Picos t = gen.next();
    if (auto b = restart.feed(t)) tr.append(*b);
    if (auto b = freerun.feed(t)) tf.append(*b);
  }
  const auto ar = autocorr(tr, 1);
  const auto af = autocorr(tf, 1);
  const bool restart_ok = std::abs(ar[0].value) < 4 * ar[0].sigma;
  const bool freerun_ok = std::abs(af[0].value) > 5 * af[0].sigma;
  c.pass = restart_ok && freerun_ok;
  c.detail = "restartable |a1|/sigma = " +
             fmt(std::abs(ar[0].value) / ar[0].sigma) + " (N = " +
             std::to_string(tr.size()) + "), free-running = " +
             fmt(std::abs(af[0].value) / af[0].sigma) + " (N = " +
             std::to_string(tf.size()) + "), required > 5";
  if (!freerun_ok)
    c.detail +=
        " -- at this clock/interval ratio the bit value is the parity of the "
        "event count before each grid line, and Poisson counts between lines "
        "wash that parity out (contrast is large near ratio 1; see "
        "test_extract)";
  return c;
}

Criterion criterion_9() {
  Criterion c{9, "combined bit generation rate near 8.0 Mbit/s"};
  const auto r = run_point(nominal_point(909, 2'000'000, StreamLabel::C));
  c.pass = r.f_g >= 0.85 * 8.0e6 && r.f_g <= 1.15 * 8.0e6;
  c.detail = "f_G = " + fmt(r.f_g) + " bit/s, bound 8.0e6 +- 15%";
  return c;
}

Criterion criterion_10() {
  Criterion c{10, "detector failure leaves the combined output intact"};
  ScenarioSpec spec;
  spec.n_target_bits = 10'000'000;
  spec.seed = 1010;
  spec.sweep_rates = {0.0, 2.5e6, 5e6, 7.5e6};
  const auto report = scenario_failure(spec);
  const auto& dead = report.points[0];
  const bool equal_b =
      std::abs(dead.c.bias - dead.t.bias) <= 2 * dead.c.sigma_b;
  const bool equal_a = std::abs(dead.c.at_lag(1).value -
                                dead.t.at_lag(1).value) <=
                       2 * dead.c.at_lag(1).sigma;
  bool partial_ok = true;
  std::string partial;
  for (std::size_t i = 1; i < report.points.size(); ++i) {
    const auto& p = report.points[i];
    const double ac = std::abs(p.c.at_lag(1).value);
    const double at = std::abs(p.t.at_lag(1).value);
    if (ac > at + 4 * p.c.at_lag(1).sigma) partial_ok = false;
    partial += " |a_C|=" + fmt(ac) + "/|a_T|=" + fmt(at);
  }
  c.pass = equal_b && equal_a && partial_ok;
  c.detail = "f_D1=0: |b_C-b_T| = " + fmt(std::abs(dead.c.bias - dead.t.bias)) +
             ", |a_C-a_T| = " +
             fmt(std::abs(dead.c.at_lag(1).value - dead.t.at_lag(1).value)) +
             "; partial points:" + partial;
  return c;
}

Criterion criterion_11() {
  Criterion c{11, "periodic injection attack up to 7 MHz"};
  // Operating point calibrated the way the hardware was: blanking chosen to
  // null a_S at 10 Mcps/detector for these detector parameters (19.6 ns).
  // Points are measured well past 1e7 bits and the central values are held
  // to the 1e7-bit error scale, so the verdict reflects the model rather
  // than one draw of the 1e7-bit sampling noise.
  const double scale_n = 1e7;
  const double b_bound = 4.0 * 0.5 / std::sqrt(scale_n);
  const double a_bound = 4.0 / std::sqrt(scale_n - 1);
  // Sample sizes grow toward the sweep's extreme so the measurement noise
  // stays small against each point's distance from the bound.
  const std::vector<std::pair<double, std::uint64_t>> grid = {
      {0.0, 20'000'000},   {2e6, 20'000'000}, {3e6, 20'000'000},
      {4.5e6, 50'000'000}, {5e6, 50'000'000}, {6e6, 50'000'000},
      {7e6, 200'000'000}};
  bool c_ok = true;
  bool y_ok = true;
  std::string worst_c;
  double b_y_5 = 0, z_y_5 = 0, b_y_7 = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    PointParams pp;
    pp.f_d0 = pp.f_d1 = 10e6;
    pp.f_inject = grid[i].first;
    pp.blank.blank_window = 19'600;
    pp.target_bits = grid[i].second;
    pp.seed = point_seed(1111, i);
    const auto p = run_point(pp);
    const double bc = std::abs(p.c.bias);
    const double ac = std::abs(p.c.at_lag(1).value);
    if (bc >= b_bound || ac >= a_bound) {
      c_ok = false;
      worst_c += " f=" + fmt(p.params.f_inject) + ": |b_C|=" + fmt(bc) +
                 ", |a_C|=" + fmt(ac) + ";";
    }
    if (p.params.f_inject >= 5e6 && p.y.bias >= -4 * p.y.sigma_b) y_ok = false;
    if (p.params.f_inject == 5e6) {
      b_y_5 = p.y.bias;
      z_y_5 = p.y.bias / p.y.sigma_b;
    }
    if (p.params.f_inject == 7e6) b_y_7 = p.y.bias;
  }
  c.pass = c_ok && y_ok;
  c.detail = "b_Y(5 MHz) = " + fmt(b_y_5) + " (" + fmt(z_y_5) +
             " sigma), b_Y(7 MHz) = " + fmt(b_y_7) + "; C central values " +
             (c_ok ? "all inside the 1e7-scale bounds (|b_C| < " +
                         fmt(b_bound) + ", |a_C| < " + fmt(a_bound) + ")"
                   : "exceed the 1e7-scale bounds at:" + worst_c);
  if (!c_ok)
    c.detail +=
        " -- the periodic attack cross-correlates the temporal and spatial "
        "streams, which the XOR propagation assumes independent";
  return c;
}

Criterion criterion_12() {
  Criterion c{12, "rate monitoring flags failure and attack"};
  ScenarioSpec spec;
  spec.n_target_bits = 200'000;
  spec.seed = 1212;
  const auto report = scenario_monitoring(spec);
  const auto& worst_both = report.both_failing.points.back();
  const auto& worst_d0 = report.d0_failing.points.back();
  const auto& attacked = report.injection.points.back();
  const bool fail_low = worst_both.f_g < report.nominal.f_g &&
                        worst_both.f_b < report.nominal.f_b &&
                        worst_d0.f_g < report.nominal.f_g &&
                        worst_d0.f_b < report.nominal.f_b;
  const bool attack_high = attacked.f_g > report.nominal.f_g &&
                           attacked.f_b > report.nominal.f_b;
  c.pass = fail_low && attack_high;
  c.detail = "nominal (f_G, f_B) = (" + fmt(report.nominal.f_g) + ", " +
             fmt(report.nominal.f_b) + "); both-fail extreme (" +
             fmt(worst_both.f_g) + ", " + fmt(worst_both.f_b) +
             "); attack extreme (" + fmt(attacked.f_g) + ", " +
             fmt(attacked.f_b) + ")";
  return c;
}

Criterion criterion_13() {
  Criterion c{13, "statistical test suite on the combined stream"};
  PointSimulator sim(nominal_point(1313, 100'000'000, StreamLabel::C));
  const auto result = sim.run();
  SuiteParams params;  // 1e6-bit sequences, alpha 0.01
  const BitStream c_bits = result.c.size() >= 100'000'000
                               ? result.c.prefix(100'000'000)
                               : result.c;
  const auto suite = run_suite(c_bits, params);
  bool proportions_ok = suite.sequences >= 100;
  std::string rows;
  for (const auto& t : suite.tests) {
    if (t.pass_count < t.min_pass_count) proportions_ok = false;
    rows += " " + t.test_name + " " + std::to_string(t.pass_count) + "/" +
            std::to_string(t.sequences) + " (>=" +
            std::to_string(t.min_pass_count) + ")";
  }

  // Null-distribution soundness: KS of the p-values over 200 fair-coin
  // sequences of 1e6 bits, 1% critical value 1.628/sqrt(200).
  const int reps = 200;
  std::vector<std::vector<double>> ps(8);
  for (int r = 0; r < reps; ++r) {
    const auto s = gen_markov_bits({0.0, 0.0}, 1'000'000, 131'300 + r);
    ps[0].push_back(test_frequency(s).p_value);
    ps[1].push_back(test_block_frequency(s, params.block_len).p_value);
    ps[2].push_back(test_cusum(s, CusumMode::Forward).p_value);
    ps[3].push_back(test_cusum(s, CusumMode::Backward).p_value);
    ps[4].push_back(test_runs(s).p_value);
    const auto serial = test_serial(s, params.serial_m);
    ps[5].push_back(serial.p_values[0]);
    ps[6].push_back(serial.p_values[1]);
    ps[7].push_back(test_approx_entropy(s, params.apen_m).p_value);
  }
  const double crit = 1.628 / std::sqrt(static_cast<double>(reps));
  double worst_ks = 0.0;
  for (auto& v : ps) {
    std::sort(v.begin(), v.end());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      d = std::max(d, std::abs(v[i] - static_cast<double>(i) / reps));
      d = std::max(d, std::abs(v[i] - static_cast<double>(i + 1) / reps));
    }
    worst_ks = std::max(worst_ks, d);
  }
  const bool ks_ok = worst_ks < crit;
  c.pass = proportions_ok && ks_ok;
  c.detail = std::to_string(suite.sequences) + " sequences:" + rows +
             "; null KS worst " + fmt(worst_ks) + " < " + fmt(crit);
  return c;
}

Criterion criterion_14() {
  Criterion c{14, "full-scale statistics declared out of desk reach"};
  c.declared = true;
  c.pass = true;
  // The 1e-4-scale metric determinations at 2e9 bits and the 6e13-bit
  // indistinguishability horizon are not rerun here; criteria 5-7 pin the
  // propagation algebra and the sample-size power check covers the horizon
  // arithmetic (see test_predict).
  const double n = required_sample_size({7.1e-8, 3.7e-12}, 1.0);
  c.detail = "substituted by criteria 5-7 and the sample-size checks; "
             "detectability horizon for the output-scale metrics = " +
             fmt(n) + " bits";
  return c;
}

}  // namespace

int main() {
  std::vector<std::function<Criterion()>> criteria = {
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
      criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
      criterion_11, criterion_12, criterion_13, criterion_14,
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    try {
      c = criteria[i]();
    } catch (const std::exception& e) {
      c.id = static_cast<int>(i) + 1;
      c.name = "criterion threw";
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const char* tag = c.declared ? "DECLARED" : c.pass ? "PASS" : "FAIL";
    if (!c.pass && !c.declared) ++failures;
    std::printf("[%s] criterion %d: %s | %s\n", tag, c.id, c.name.c_str(),
                c.detail.c_str());
    std::fflush(stdout);
  }
  if (failures > 0)
    std::printf("%d of 13 checked criteria failed (see lines above; the "
                "failures are analysed model defects of the source claims, "
                "kept red deliberately)\n",
                failures);
  else
    std::printf("all checked criteria passed\n");
  return failures == 0 ? 0 : 1;
}
