#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "combosim/config.hpp"
#include "combosim/predict.hpp"
#include "combosim/report.hpp"
#include "combosim/scenario.hpp"
#include "combosim/sts.hpp"

namespace fs = std::filesystem;
using namespace combosim;

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::string format = "csv";  // csv | report
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> bits;
  std::optional<int> jobs;
  bool full = false;
};

// String overrides collected from the command line; they win over the
// config file and land in the manifest.
struct Overrides {
  std::map<std::string, std::string> values;
  void set(const std::string& key, const std::string& value) {
    values[key] = value;
  }
};

std::vector<double> parse_rate_list(const std::string& text,
                                    const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_rate_hz(item, key));
  return out;
}

std::vector<Picos> parse_duration_list(const std::string& text,
                                       const std::string& key) {
  std::vector<Picos> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_duration_ps(item, key));
  return out;
}

ScenarioSpec spec_from_config(const Config& cfg) {
  ScenarioSpec spec;
  spec.f_d0 = cfg.get_rate_hz("f_d0", spec.f_d0);
  spec.f_d1 = cfg.get_rate_hz("f_d1", spec.f_d1);
  spec.f_inject = cfg.get_rate_hz("f_inject", spec.f_inject);
  if (cfg.has("injection_phase") &&
      cfg.get_string("injection_phase", "auto") != "auto")
    spec.injection_phase = cfg.get_duration_ps("injection_phase", 0);
  spec.split_detune = cfg.get_double("split_detune", spec.split_detune);
  spec.blank.blank_window =
      cfg.get_duration_ps("blank_window", spec.blank.blank_window);
  spec.clock.clock_period =
      cfg.get_duration_ps("clock_period", spec.clock.clock_period);
  const std::string mode = cfg.get_string("clock_mode", "restartable");
  if (mode == "restartable")
    spec.clock.mode = ClockParams::Mode::Restartable;
  else if (mode == "free-running")
    spec.clock.mode = ClockParams::Mode::FreeRunning;
  else
    throw std::invalid_argument(
        "config key 'clock_mode': expected restartable|free-running");
  spec.detector.dead_time =
      cfg.get_duration_ps("dead_time", spec.detector.dead_time);
  spec.detector.afterpulse_prob =
      cfg.get_double("afterpulse_prob", spec.detector.afterpulse_prob);
  spec.detector.afterpulse_mean_delay = cfg.get_duration_ps(
      "afterpulse_delay", spec.detector.afterpulse_mean_delay);
  spec.detector.efficiency =
      cfg.get_double("efficiency", spec.detector.efficiency);
  spec.detector.injection_detect_prob = cfg.get_double(
      "injection_detect_prob", spec.detector.injection_detect_prob);
  spec.n_target_bits = cfg.get_u64("target_bits", spec.n_target_bits);
  spec.seed = cfg.get_u64("seed", spec.seed);
  spec.k_max = static_cast<int>(cfg.get_u64("k_max", spec.k_max));
  spec.jobs = static_cast<int>(cfg.get_u64("jobs", spec.jobs));
  if (cfg.has("sweep_rates"))
    spec.sweep_rates =
        parse_rate_list(cfg.get_string("sweep_rates", ""), "sweep_rates");
  if (cfg.has("sweep_blanks"))
    spec.sweep_blanks = parse_duration_list(
        cfg.get_string("sweep_blanks", ""), "sweep_blanks");
  if (cfg.has("sweep_inject"))
    spec.sweep_inject =
        parse_rate_list(cfg.get_string("sweep_inject", ""), "sweep_inject");
  return spec;
}

Config resolve_config(const ScenarioSpec& spec, const std::string& mode,
                      const std::string& format) {
  Config cfg;
  cfg.set("mode", mode);
  cfg.set("seed", std::to_string(spec.seed));
  cfg.set("target_bits", std::to_string(spec.n_target_bits));
  cfg.set("f_d0", fmt_double(spec.f_d0));
  cfg.set("f_d1", fmt_double(spec.f_d1));
  cfg.set("f_inject", fmt_double(spec.f_inject));
  cfg.set("injection_phase",
          spec.injection_phase ? format_duration_ps(*spec.injection_phase)
                               : "auto");
  cfg.set("split_detune", fmt_double(spec.split_detune));
  cfg.set("blank_window", format_duration_ps(spec.blank.blank_window));
  cfg.set("clock_period", format_duration_ps(spec.clock.clock_period));
  cfg.set("clock_mode", spec.clock.mode == ClockParams::Mode::Restartable
                            ? "restartable"
                            : "free-running");
  cfg.set("dead_time", format_duration_ps(spec.detector.dead_time));
  cfg.set("afterpulse_prob", fmt_double(spec.detector.afterpulse_prob));
  cfg.set("afterpulse_delay",
          format_duration_ps(spec.detector.afterpulse_mean_delay));
  cfg.set("efficiency", fmt_double(spec.detector.efficiency));
  cfg.set("injection_detect_prob",
          fmt_double(spec.detector.injection_detect_prob));
  cfg.set("k_max", std::to_string(spec.k_max));
  cfg.set("jobs", std::to_string(spec.jobs));
  cfg.set("format", format);
  const auto join_rates = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += (i ? "," : "") + fmt_double(v[i]);
    return s;
  };
  if (!spec.sweep_rates.empty())
    cfg.set("sweep_rates", join_rates(spec.sweep_rates));
  if (!spec.sweep_inject.empty())
    cfg.set("sweep_inject", join_rates(spec.sweep_inject));
  if (!spec.sweep_blanks.empty()) {
    std::string s;
    for (std::size_t i = 0; i < spec.sweep_blanks.size(); ++i)
      s += (i ? "," : "") + format_duration_ps(spec.sweep_blanks[i]);
    cfg.set("sweep_blanks", s);
  }
  return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_scenario_outputs(const GlobalOpts& g, const ScenarioSpec& spec,
                            const std::string& mode,
                            const ScenarioReport& report) {
  const fs::path dir(g.out_dir);
  fs::create_directories(dir);
  write_file(dir / "summary.csv", summary_csv(report));
  write_file(dir / "metrics.csv", metrics_csv(report));
  write_file(dir / "crosscorr.csv", crosscorr_csv(report));
  if (g.format == "report") write_file(dir / "report.txt", text_report(report));
  write_file(dir / "manifest.txt",
             manifest_text(resolve_config(spec, mode, g.format), mode,
                           kVersion));
  std::cout << "wrote " << (dir / "summary.csv").string() << " ("
            << report.points.size() << " points)\n";
  if (report.crossover_rate)
    std::cout << "crossover_rate_per_detector = "
              << fmt_double(*report.crossover_rate) << "\n";
  if (!report.note.empty()) std::cout << "note = " << report.note << "\n";
}

PointParams point_from_spec(const ScenarioSpec& spec) {
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
  p.seed = point_seed(spec.seed, 0);
  p.k_max = spec.k_max;
  return p;
}

// Shared scenario flags; collects overrides and assembles the final spec.
struct ScenarioCli {
  explicit ScenarioCli(GlobalOpts* global) : g(global) {}

  GlobalOpts* g = nullptr;
  Overrides ov;

  void attach(CLI::App* cmd) {
    cmd_ = cmd;
    opt("--f-d0", "f_d0", "target detected rate of D0 (e.g. 10Mcps)");
    opt("--f-d1", "f_d1", "target detected rate of D1");
    opt("--f-inject", "f_inject", "periodic injection rate (0 disables)");
    opt("--injection-phase", "injection_phase",
        "injection phase offset (duration or 'auto')");
    opt("--split-detune", "split_detune",
        "additive detuning of the D1 routing probability");
    opt("--blank", "blank_window", "blanking window (e.g. 17.6ns)");
    opt("--clock-period", "clock_period", "T1T2 clock period");
    opt("--clock-mode", "clock_mode", "restartable|free-running");
    opt("--dead-time", "dead_time", "detector dead time");
    opt("--pa", "afterpulse_prob", "afterpulse probability");
    opt("--ap-delay", "afterpulse_delay", "mean afterpulse delay");
    opt("--efficiency", "efficiency", "photon detection efficiency");
    opt("--injection-detect-prob", "injection_detect_prob",
        "fake-pulse detection probability");
    opt("--kmax", "k_max", "max autocorrelation lag");
    opt("--rates", "sweep_rates", "comma-separated rate grid");
    opt("--blanks", "sweep_blanks", "comma-separated blanking grid");
    opt("--inject-rates", "sweep_inject",
        "comma-separated injection rate grid");
  }

  ScenarioSpec resolve() const {
    Config cfg;
    if (!g->config_path.empty()) cfg = Config::parse_file(g->config_path);
    for (const auto& [k, v] : ov.values) cfg.set(k, v);
    if (g->seed) cfg.set("seed", std::to_string(*g->seed));
    if (g->bits) cfg.set("target_bits", std::to_string(*g->bits));
    if (g->jobs) cfg.set("jobs", std::to_string(*g->jobs));
    ScenarioSpec spec = spec_from_config(cfg);
    if (g->full && !g->bits && !cfg.has("target_bits"))
      spec.n_target_bits = 1'000'000'000;
    spec.validate();
    return spec;
  }

 private:
  void opt(const std::string& flag, const std::string& key,
           const std::string& desc) {
    cmd_->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { ov.set(key, v); }, desc);
  }

  CLI::App* cmd_ = nullptr;
};

void run_simulate(const GlobalOpts& g, const ScenarioCli& cli,
                  const std::string& dump_arrivals,
                  const std::string& dump_detections) {
  const ScenarioSpec spec = cli.resolve();
  if (!dump_arrivals.empty() || !dump_detections.empty()) {
    // Dump path: run the single point again with event sinks attached.
    PointSimulator sim(point_from_spec(spec));
    std::ofstream arr_out, det_out;
    if (!dump_arrivals.empty()) {
      arr_out.open(dump_arrivals);
      if (!arr_out) throw std::runtime_error("cannot write " + dump_arrivals);
      arr_out << "time_ps,channel,kind\n";
      sim.set_arrival_sink([&arr_out](const ArrivalEvent& ev, Channel ch) {
        arr_out << ev.time << ',' << (ch == Channel::D0 ? "D0" : "D1") << ','
                << (ev.kind == ArrivalKind::Photon ? "photon" : "injection")
                << '\n';
      });
    }
    auto last_accept = std::numeric_limits<Picos>::min();
    bool any_accept = false;
    if (!dump_detections.empty()) {
      det_out.open(dump_detections);
      if (!det_out)
        throw std::runtime_error("cannot write " + dump_detections);
      det_out << "time_ps,channel,origin,accepted\n";
      // Replicate the blanking decision to tag each merged detection.
      const Picos window = spec.blank.blank_window;
      sim.set_detection_sink([&](const DetectionEvent& ev) {
        const bool acc = !any_accept || ev.time >= last_accept + window;
        if (acc) {
          last_accept = ev.time;
          any_accept = true;
        }
        const char* origin = ev.origin == Origin::Photon       ? "photon"
                             : ev.origin == Origin::Afterpulse ? "afterpulse"
                                                               : "injection";
        det_out << ev.time << ',' << (ev.channel == Channel::D0 ? "D0" : "D1")
                << ',' << origin << ',' << (acc ? 1 : 0) << '\n';
      });
    }
    sim.run();
  }
  write_scenario_outputs(g, spec, "simulate", run_nominal(spec));
}

void run_predict_cmd(const std::map<std::string, std::string>& args) {
  const auto has = [&args](const char* k) { return args.count(k) != 0; };
  const auto rate = [&args](const char* k) {
    return parse_rate_hz(args.at(k), k);
  };
  const auto dur = [&args](const char* k) {
    return parse_duration_ps(args.at(k), k);
  };
  const auto num = [&args](const char* k) { return std::stod(args.at(k)); };

  bool produced = false;
  if (has("pa") && has("dead_time")) {
    std::cout << "f0_cps = "
              << fmt_double(predict_f0(num("pa"), dur("dead_time"))) << "\n";
    produced = true;
  }
  if (has("dead_time") && has("tau")) {
    const Picos tau = dur("tau");
    std::cout << "a_deadtime_exact = "
              << fmt_double(predict_deadtime_autocorr(dur("dead_time"), tau))
              << "\n";
    std::cout << "a_deadtime_approx = "
              << fmt_double(
                     predict_deadtime_autocorr_approx(dur("dead_time"), tau))
              << "\n";
    if (has("pa"))
      std::cout << "a_net = "
                << fmt_double(
                       predict_net_autocorr({dur("dead_time"), tau, num("pa")}))
                << "\n";
    produced = true;
  }
  if (has("rate") && has("dead_time") && has("pa")) {
    const auto tau = static_cast<Picos>(1e12 / rate("rate"));
    std::cout << "a_net_at_rate = "
              << fmt_double(
                     predict_net_autocorr({dur("dead_time"), tau, num("pa")}))
              << "\n";
    produced = true;
  }
  if (has("b") && has("a")) {
    const MarkovBitModel m{num("b"), num("a")};
    const auto y = propagate_pairxor(m);
    std::cout << "pairxor_b_exact = " << fmt_double(y.exact.b) << "\n";
    std::cout << "pairxor_a_exact = " << fmt_double(y.exact.a) << "\n";
    std::cout << "pairxor_b_approx = " << fmt_double(y.approx.b) << "\n";
    std::cout << "pairxor_a_approx = " << fmt_double(y.approx.a) << "\n";
    std::cout << "pairxor_approx_valid = " << (y.approx_valid ? 1 : 0) << "\n";
    const double z = has("z") ? num("z") : 1.96;
    std::cout << "required_sample_size = "
              << fmt_double(required_sample_size(m, z)) << "\n";
    produced = true;
  }
  if (has("bt") && has("at") && has("by") && has("ay")) {
    const auto c =
        propagate_xor({num("bt"), num("at")}, {num("by"), num("ay")});
    std::cout << "xor_b = " << fmt_double(c.b) << "\n";
    std::cout << "xor_a = " << fmt_double(c.a) << "\n";
    produced = true;
  }
  if (!produced)
    throw std::invalid_argument(
        "predict needs inputs, e.g. --pa 0.031 --dead-time 24ns, or "
        "--b/--a, or --bt/--at/--by/--ay");
}

BitFileFormat parse_bit_format(const std::string& s) {
  if (s == "ascii") return BitFileFormat::Ascii;
  if (s == "packed") return BitFileFormat::Packed;
  throw std::invalid_argument("bit file format must be ascii|packed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"combosim: discrete-event simulator and analysis toolkit for "
               "a combined spatio-temporal optical RNG"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "key = value config file");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--format", g.format, "csv|report")
      ->check(CLI::IsMember({"csv", "report"}));
  std::uint64_t seed_val = 0, bits_val = 0;
  int jobs_val = 0;
  app.add_option("--seed", seed_val, "master seed")
      ->each([&g, &seed_val](const std::string&) { g.seed = seed_val; });
  app.add_option("--bits", bits_val, "target bit count")
      ->each([&g, &bits_val](const std::string&) { g.bits = bits_val; });
  app.add_option("--jobs", jobs_val, "worker threads for sweeps")
      ->each([&g, &jobs_val](const std::string&) { g.jobs = jobs_val; });
  app.add_flag("--full", g.full,
               "paper-scale statistics (1e9 bits) unless --bits is given");

  ScenarioCli sim_cli(&g), rate_cli(&g), blank_cli(&g), fail_cli(&g),
      inj_cli(&g), mon_cli(&g), exp_cli(&g);

  auto* sim = app.add_subcommand("simulate", "nominal run with full reports");
  sim_cli.attach(sim);
  std::string dump_arrivals, dump_detections;
  sim->add_option("--dump-arrivals", dump_arrivals,
                  "CSV dump of arrival events (time_ps,channel,kind)");
  sim->add_option("--dump-detections", dump_detections,
                  "CSV dump of merged detections "
                  "(time_ps,channel,origin,accepted)");

  auto* swr = app.add_subcommand("sweep-rate",
                                 "a_S(1) vs detected rate, crossover search");
  rate_cli.attach(swr);
  auto* swb = app.add_subcommand("sweep-blank", "a_S(1) vs blanking window");
  blank_cli.attach(swb);
  auto* fail =
      app.add_subcommand("scenario-failure", "D1 rate swept down to zero");
  fail_cli.attach(fail);
  auto* inj = app.add_subcommand("scenario-inject",
                                 "periodic injection attack sweep");
  inj_cli.attach(inj);
  auto* mon = app.add_subcommand(
      "monitor", "f_G/f_B monitoring across failure and attack scenarios");
  mon_cli.attach(mon);

  auto* pred = app.add_subcommand("predict", "closed-form predictions");
  std::map<std::string, std::string> pred_args;
  for (const char* key : {"pa", "dead_time", "tau", "rate", "b", "a", "z",
                          "bt", "at", "by", "ay"}) {
    std::string flag = "--" + std::string(key);
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    pred->add_option_function<std::string>(
        flag, [&pred_args, key](const std::string& v) { pred_args[key] = v; });
  }

  auto* stats_cmd =
      app.add_subcommand("stats", "estimators over an imported bit file");
  std::string stats_in, stats_format = "ascii";
  int stats_kmax = 6;
  stats_cmd->add_option("--in", stats_in, "bit file path")->required();
  stats_cmd->add_option("--in-format", stats_format, "ascii|packed");
  stats_cmd->add_option("--kmax", stats_kmax, "max lag");

  auto* test_cmd =
      app.add_subcommand("test", "statistical test suite over a bit file");
  std::string test_in, test_format = "ascii";
  SuiteParams suite_params;
  test_cmd->add_option("--in", test_in, "bit file path")->required();
  test_cmd->add_option("--in-format", test_format, "ascii|packed");
  test_cmd->add_option("--seq-len", suite_params.seq_len, "bits per sequence");
  test_cmd->add_option("--alpha", suite_params.alpha, "significance level");
  test_cmd->add_option("--block-len", suite_params.block_len,
                       "block frequency block length");
  test_cmd->add_option("--serial-m", suite_params.serial_m,
                       "serial pattern length");
  test_cmd->add_option("--apen-m", suite_params.apen_m,
                       "approximate entropy pattern length");

  auto* exp = app.add_subcommand("export",
                                 "simulate and export a bit stream, or "
                                 "generate a synthetic Markov stream");
  exp_cli.attach(exp);
  std::string exp_stream = "C", exp_format = "ascii", exp_path;
  std::string exp_markov_b, exp_markov_a;
  exp->add_option("--stream", exp_stream, "S|Y|T|C");
  exp->add_option("--bit-format", exp_format, "ascii|packed");
  exp->add_option("--out-file", exp_path, "destination bit file")->required();
  exp->add_option("--markov-b", exp_markov_b,
                  "synthetic source bias (skips simulation)");
  exp->add_option("--markov-a", exp_markov_a,
                  "synthetic source lag-1 autocorrelation");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      run_simulate(g, sim_cli, dump_arrivals, dump_detections);
    } else if (swr->parsed()) {
      const auto spec = rate_cli.resolve();
      write_scenario_outputs(g, spec, "sweep-rate", sweep_rate(spec));
    } else if (swb->parsed()) {
      const auto spec = blank_cli.resolve();
      write_scenario_outputs(g, spec, "sweep-blank", sweep_blank(spec));
    } else if (fail->parsed()) {
      const auto spec = fail_cli.resolve();
      write_scenario_outputs(g, spec, "scenario-failure",
                             scenario_failure(spec));
    } else if (inj->parsed()) {
      const auto spec = inj_cli.resolve();
      write_scenario_outputs(g, spec, "scenario-inject",
                             scenario_injection(spec));
    } else if (mon->parsed()) {
      const auto spec = mon_cli.resolve();
      const auto report = scenario_monitoring(spec);
      const fs::path dir(g.out_dir);
      fs::create_directories(dir);
      write_file(dir / "monitoring.csv", monitoring_csv(report));
      write_file(dir / "manifest.txt",
                 manifest_text(resolve_config(spec, "monitor", g.format),
                               "monitor", kVersion));
      std::cout << "wrote " << (dir / "monitoring.csv").string() << "\n";
    } else if (pred->parsed()) {
      run_predict_cmd(pred_args);
    } else if (stats_cmd->parsed()) {
      const auto bits = import_bits(stats_in, parse_bit_format(stats_format));
      std::cout << metrics_text(metrics(bits, stats_kmax));
    } else if (test_cmd->parsed()) {
      const auto bits = import_bits(test_in, parse_bit_format(test_format));
      const auto result = run_suite(bits, suite_params);
      std::cout << suite_text(result);
      const fs::path dir(g.out_dir);
      fs::create_directories(dir);
      write_file(dir / "suite.csv", suite_csv(result));
    } else if (exp->parsed()) {
      BitStream bits;
      const auto spec = exp_cli.resolve();
      if (!exp_markov_b.empty() || !exp_markov_a.empty()) {
        const double b = exp_markov_b.empty() ? 0.0 : std::stod(exp_markov_b);
        const double a = exp_markov_a.empty() ? 0.0 : std::stod(exp_markov_a);
        bits = gen_markov_bits({b, a}, spec.n_target_bits, spec.seed);
      } else {
        PointSimulator sim_point(point_from_spec(spec));
        const auto result = sim_point.run();
        if (exp_stream == "S") bits = result.s;
        else if (exp_stream == "Y") bits = result.y;
        else if (exp_stream == "T") bits = result.t;
        else if (exp_stream == "C") bits = result.c;
        else throw std::invalid_argument("--stream must be S|Y|T|C");
      }
      export_bits(bits, parse_bit_format(exp_format), exp_path);
      std::cout << "wrote " << exp_path << " (" << bits.size() << " bits)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
