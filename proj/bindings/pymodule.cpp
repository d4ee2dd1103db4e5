#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "combosim/arrival.hpp"
#include "combosim/detector.hpp"
#include "combosim/extract.hpp"
#include "combosim/predict.hpp"
#include "combosim/scenario.hpp"
#include "combosim/stats.hpp"
#include "combosim/sts.hpp"

namespace py = pybind11;
using namespace combosim;

namespace {

py::array_t<std::uint8_t> stream_to_array(const BitStream& bits) {
  const std::vector<std::uint8_t> bytes = bits.to_bytes_per_bit();
  return py::array_t<std::uint8_t>(
      {static_cast<py::ssize_t>(bytes.size())}, bytes.data());
}

BitStream array_to_stream(const py::array_t<std::uint8_t>& arr,
                          StreamLabel label = StreamLabel::X) {
  auto view = arr.unchecked<1>();
  BitStream bits(label);
  for (py::ssize_t i = 0; i < view.shape(0); ++i) bits.append(view(i) != 0);
  return bits;
}

py::dict metrics_to_dict(const MetricsReport& m) {
  py::dict d;
  d["label"] = to_string(m.label);
  d["n_bits"] = m.n_bits;
  d["bias"] = m.bias;
  d["sigma_b"] = m.sigma_b;
  d["degenerate"] = m.degenerate;
  py::list ac;
  for (const auto& p : m.autocorr) {
    py::dict row;
    row["lag"] = p.lag;
    row["value"] = p.value;
    row["sigma"] = p.sigma;
    ac.append(row);
  }
  d["autocorr"] = ac;
  return d;
}

py::dict point_to_dict(const PointReport& r, bool with_streams,
                       const PipelineResult* streams) {
  py::dict d;
  d["duration_s"] = r.duration;
  d["f_g"] = r.f_g;
  d["f_b"] = r.f_b;
  d["rate_d0"] = r.rate_d0;
  d["rate_d1"] = r.rate_d1;
  d["accepted"] = r.accepted;
  d["blanked"] = r.blanked;
  d["ties"] = r.ties;
  d["s"] = metrics_to_dict(r.s);
  d["y"] = metrics_to_dict(r.y);
  d["t"] = metrics_to_dict(r.t);
  d["c"] = metrics_to_dict(r.c);
  py::list ty;
  for (const auto& p : r.ty.lags) {
    py::dict row;
    row["lag"] = p.lag;
    row["value"] = p.value;
    row["sigma"] = p.sigma;
    ty.append(row);
  }
  d["crosscorr_ty"] = ty;
  if (r.y_pred) {
    d["pred_b_y"] = r.y_pred->exact.b;
    d["pred_a_y"] = r.y_pred->exact.a;
  }
  if (r.c_pred) {
    d["pred_b_c"] = r.c_pred->b;
    d["pred_a_c"] = r.c_pred->a;
  }
  if (with_streams && streams) {
    d["bits_s"] = stream_to_array(streams->s);
    d["bits_y"] = stream_to_array(streams->y);
    d["bits_t"] = stream_to_array(streams->t);
    d["bits_c"] = stream_to_array(streams->c);
  }
  return d;
}

PointParams point_params(double f_d0, double f_d1, double f_inject,
                         double blank_window_ns, double clock_period_ns,
                         const std::string& clock_mode, double dead_time_ns,
                         double afterpulse_prob, double afterpulse_delay_ns,
                         double efficiency, double injection_detect_prob,
                         double split_detune, std::uint64_t target_bits,
                         std::uint64_t seed, int k_max) {
  PointParams p;
  p.f_d0 = f_d0;
  p.f_d1 = f_d1;
  p.f_inject = f_inject;
  p.blank.blank_window = static_cast<Picos>(blank_window_ns * 1e3);
  p.clock.clock_period = static_cast<Picos>(clock_period_ns * 1e3);
  if (clock_mode == "restartable")
    p.clock.mode = ClockParams::Mode::Restartable;
  else if (clock_mode == "free-running")
    p.clock.mode = ClockParams::Mode::FreeRunning;
  else
    throw std::invalid_argument("clock_mode must be restartable|free-running");
  p.detector.dead_time = static_cast<Picos>(dead_time_ns * 1e3);
  p.detector.afterpulse_prob = afterpulse_prob;
  p.detector.afterpulse_mean_delay =
      static_cast<Picos>(afterpulse_delay_ns * 1e3);
  p.detector.efficiency = efficiency;
  p.detector.injection_detect_prob = injection_detect_prob;
  p.split_detune = split_detune;
  p.target_bits = target_bits;
  p.seed = seed;
  p.k_max = k_max;
  return p;
}

}  // namespace

PYBIND11_MODULE(_combosim, m) {
  m.doc() = "Discrete-event simulator and analysis toolkit for a combined "
            "spatio-temporal optical random number generator";

  m.def(
      "gen_poisson_arrivals",
      [](double rate, double duration, std::uint64_t seed) {
        const auto events = gen_poisson_arrivals(rate, duration, seed);
        std::vector<std::int64_t> times;
        times.reserve(events.size());
        for (const auto& ev : events) times.push_back(ev.time);
        return py::array_t<std::int64_t>(
            {static_cast<py::ssize_t>(times.size())}, times.data());
      },
      py::arg("rate"), py::arg("duration"), py::arg("seed"),
      "Poisson arrival times in integer picoseconds.");

  m.def(
      "gen_markov_bits",
      [](double b, double a, std::uint64_t n, std::uint64_t seed) {
        return stream_to_array(gen_markov_bits({b, a}, n, seed));
      },
      py::arg("b"), py::arg("a"), py::arg("n"), py::arg("seed"),
      "Stationary Markov bit stream with the given bias and lag-1 "
      "autocorrelation.");

  m.def(
      "bias",
      [](const py::array_t<std::uint8_t>& arr) {
        const auto [b, sb] = bias(array_to_stream(arr));
        return py::make_tuple(b, sb);
      },
      py::arg("bits"), "(bias, sigma) of a 0/1 array.");

  m.def(
      "autocorr",
      [](const py::array_t<std::uint8_t>& arr, int k_max) {
        py::list out;
        for (const auto& p : autocorr(array_to_stream(arr), k_max)) {
          py::dict row;
          row["lag"] = p.lag;
          row["value"] = p.value;
          row["sigma"] = p.sigma;
          out.append(row);
        }
        return out;
      },
      py::arg("bits"), py::arg("k_max") = 6,
      "Serial autocorrelation coefficients for lags 1..k_max.");

  m.def(
      "crosscorr",
      [](const py::array_t<std::uint8_t>& x, const py::array_t<std::uint8_t>& y,
         int k_max) {
        py::list out;
        for (const auto& p :
             crosscorr(array_to_stream(x), array_to_stream(y), k_max).lags) {
          py::dict row;
          row["lag"] = p.lag;
          row["value"] = p.value;
          row["sigma"] = p.sigma;
          out.append(row);
        }
        return out;
      },
      py::arg("x"), py::arg("y"), py::arg("k_max") = 6);

  m.def("predict_f0", &predict_f0, py::arg("afterpulse_prob"),
        py::arg("dead_time_ps"),
        "Cancellation rate p_a / tau_d in counts per second.");
  m.def("predict_deadtime_autocorr", &predict_deadtime_autocorr,
        py::arg("dead_time_ps"), py::arg("mean_period_ps"));
  m.def(
      "predict_net_autocorr",
      [](double dead_time_ps, double mean_period_ps, double afterpulse_prob) {
        return predict_net_autocorr({static_cast<Picos>(dead_time_ps),
                                     static_cast<Picos>(mean_period_ps),
                                     afterpulse_prob});
      },
      py::arg("dead_time_ps"), py::arg("mean_period_ps"),
      py::arg("afterpulse_prob"));
  m.def(
      "propagate_pairxor",
      [](double b, double a) {
        const auto p = propagate_pairxor({b, a});
        py::dict d;
        d["b"] = p.exact.b;
        d["a"] = p.exact.a;
        d["b_approx"] = p.approx.b;
        d["a_approx"] = p.approx.a;
        d["approx_valid"] = p.approx_valid;
        return d;
      },
      py::arg("b"), py::arg("a"));
  m.def(
      "propagate_xor",
      [](double b_t, double a_t, double b_y, double a_y) {
        const auto c = propagate_xor({b_t, a_t}, {b_y, a_y});
        return py::make_tuple(c.b, c.a);
      },
      py::arg("b_t"), py::arg("a_t"), py::arg("b_y"), py::arg("a_y"));
  m.def(
      "required_sample_size",
      [](double b, double a, double z) {
        return required_sample_size({b, a}, z);
      },
      py::arg("b"), py::arg("a"), py::arg("z") = 1.96);

  m.def(
      "simulate",
      [](double f_d0, double f_d1, double f_inject, double blank_window_ns,
         double clock_period_ns, const std::string& clock_mode,
         double dead_time_ns, double afterpulse_prob,
         double afterpulse_delay_ns, double efficiency,
         double injection_detect_prob, double split_detune,
         std::uint64_t target_bits, std::uint64_t seed, int k_max,
         bool return_bits) {
        const PointParams p = point_params(
            f_d0, f_d1, f_inject, blank_window_ns, clock_period_ns,
            clock_mode, dead_time_ns, afterpulse_prob, afterpulse_delay_ns,
            efficiency, injection_detect_prob, split_detune, target_bits,
            seed, k_max);
        if (return_bits) {
          PointSimulator sim(p);
          const auto streams = sim.run();
          const auto report = run_point(p);
          return point_to_dict(report, true, &streams);
        }
        const auto report = run_point(p);
        return point_to_dict(report, false, nullptr);
      },
      py::arg("f_d0") = 10e6, py::arg("f_d1") = 10e6,
      py::arg("f_inject") = 0.0, py::arg("blank_window_ns") = 17.6,
      py::arg("clock_period_ns") = 1.0, py::arg("clock_mode") = "restartable",
      py::arg("dead_time_ns") = 24.0, py::arg("afterpulse_prob") = 0.031,
      py::arg("afterpulse_delay_ns") = 10.0, py::arg("efficiency") = 1.0,
      py::arg("injection_detect_prob") = 0.997, py::arg("split_detune") = 0.0,
      py::arg("target_bits") = 1'000'000, py::arg("seed") = 1,
      py::arg("k_max") = 6, py::arg("return_bits") = false,
      "Full pipeline at one operating point; returns measured metrics, "
      "rates and closed-form predictions (plus the bit streams when "
      "return_bits is set).");

  m.def(
      "run_suite",
      [](const py::array_t<std::uint8_t>& arr, std::uint64_t seq_len,
         double alpha, int block_len, int serial_m, int apen_m) {
        SuiteParams params;
        params.seq_len = seq_len;
        params.alpha = alpha;
        params.block_len = block_len;
        params.serial_m = serial_m;
        params.apen_m = apen_m;
        const auto result = run_suite(array_to_stream(arr), params);
        py::dict d;
        d["sequences"] = result.sequences;
        d["all_pass"] = result.all_pass;
        py::list tests;
        for (const auto& t : result.tests) {
          py::dict row;
          row["test"] = t.test_name;
          row["pass_count"] = t.pass_count;
          row["threshold"] = t.min_pass_count;
          row["proportion_pass"] = t.proportion_pass;
          row["min_p"] = t.min_p;
          row["median_p"] = t.median_p;
          row["uniformity_p"] = t.uniformity_p;
          tests.append(row);
        }
        d["tests"] = tests;
        return d;
      },
      py::arg("bits"), py::arg("seq_len") = 1'000'000,
      py::arg("alpha") = 0.01, py::arg("block_len") = 128,
      py::arg("serial_m") = 16, py::arg("apen_m") = 10,
      "Statistical test suite over sequences cut from the given bit array.");

  m.def(
      "test_frequency",
      [](const py::array_t<std::uint8_t>& arr, double alpha) {
        const auto r = test_frequency(array_to_stream(arr), alpha);
        return py::make_tuple(r.p_value, r.pass);
      },
      py::arg("bits"), py::arg("alpha") = 0.01);

  m.def(
      "export_bits",
      [](const py::array_t<std::uint8_t>& arr, const std::string& format,
         const std::string& path) {
        export_bits(array_to_stream(arr),
                    format == "packed" ? BitFileFormat::Packed
                                       : BitFileFormat::Ascii,
                    path);
      },
      py::arg("bits"), py::arg("format"), py::arg("path"));

  m.def(
      "import_bits",
      [](const std::string& path, const std::string& format) {
        return stream_to_array(import_bits(
            path, format == "packed" ? BitFileFormat::Packed
                                     : BitFileFormat::Ascii));
      },
      py::arg("path"), py::arg("format"));

#ifdef COMBOSIM_VERSION
  m.attr("__version__") = COMBOSIM_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
