#include "combosim/report.hpp"

#include <charconv>
#include <sstream>

namespace combosim {

std::string fmt_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

void point_prefix_header(std::ostringstream& out) {
  out << "point,f_d0_target,f_d1_target,f_inject,blank_window_ps,"
         "clock_period_ps,seed";
}

void point_prefix(std::ostringstream& out, std::size_t index,
                  const PointReport& p) {
  out << index << ',' << fmt_double(p.params.f_d0) << ','
      << fmt_double(p.params.f_d1) << ',' << fmt_double(p.params.f_inject)
      << ',' << p.params.blank.blank_window << ','
      << p.params.clock.clock_period << ',' << p.params.seed;
}

void stream_rows(std::ostringstream& out, std::size_t index,
                 const PointReport& p, const MetricsReport& m) {
  if (m.n_bits == 0) return;
  if (m.degenerate || m.autocorr.empty()) {
    point_prefix(out, index, p);
    out << ',' << to_string(m.label) << ',' << m.n_bits << ','
        << fmt_double(m.bias) << ',' << fmt_double(m.sigma_b)
        << ",,,degenerate\n";
    return;
  }
  for (const AutocorrPoint& a : m.autocorr) {
    point_prefix(out, index, p);
    out << ',' << to_string(m.label) << ',' << m.n_bits << ','
        << fmt_double(m.bias) << ',' << fmt_double(m.sigma_b) << ',' << a.lag
        << ',' << fmt_double(a.value) << ',' << fmt_double(a.sigma) << '\n';
  }
}

}  // namespace

std::string metrics_csv(const ScenarioReport& report) {
  std::ostringstream out;
  point_prefix_header(out);
  out << ",stream,n_bits,bias,sigma_b,lag,a_k,sigma_k\n";
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const PointReport& p = report.points[i];
    stream_rows(out, i, p, p.s);
    stream_rows(out, i, p, p.y);
    stream_rows(out, i, p, p.t);
    stream_rows(out, i, p, p.c);
  }
  return out.str();
}

namespace {

void stream_summary_header(std::ostringstream& out, const char* label) {
  out << ',' << label << "_n," << label << "_bias," << label << "_sigma_b,"
      << label << "_a1," << label << "_sigma_a1";
}

void stream_summary(std::ostringstream& out, const MetricsReport& m) {
  out << ',' << m.n_bits << ',' << fmt_double(m.bias) << ','
      << fmt_double(m.sigma_b);
  if (m.degenerate || m.autocorr.empty())
    out << ",,";
  else
    out << ',' << fmt_double(m.autocorr.front().value) << ','
        << fmt_double(m.autocorr.front().sigma);
}

}  // namespace

std::string summary_csv(const ScenarioReport& report) {
  std::ostringstream out;
  point_prefix_header(out);
  out << ",duration_s,rate_d0,rate_d1,accepted,blanked,ties,f_g,f_b";
  stream_summary_header(out, "s");
  stream_summary_header(out, "y");
  stream_summary_header(out, "t");
  stream_summary_header(out, "c");
  out << ",pred_b_y,pred_a_y,pred_b_c,pred_a_c,pred_a_deadtime,pred_a_net\n";
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const PointReport& p = report.points[i];
    point_prefix(out, i, p);
    out << ',' << fmt_double(p.duration) << ',' << fmt_double(p.rate_d0) << ','
        << fmt_double(p.rate_d1) << ',' << p.accepted << ',' << p.blanked
        << ',' << p.ties << ',' << fmt_double(p.f_g) << ','
        << fmt_double(p.f_b);
    stream_summary(out, p.s);
    stream_summary(out, p.y);
    stream_summary(out, p.t);
    stream_summary(out, p.c);
    if (p.y_pred)
      out << ',' << fmt_double(p.y_pred->exact.b) << ','
          << fmt_double(p.y_pred->exact.a);
    else
      out << ",,";
    if (p.c_pred)
      out << ',' << fmt_double(p.c_pred->b) << ',' << fmt_double(p.c_pred->a);
    else
      out << ",,";
    out << ',' << fmt_double(p.a_deadtime_pred) << ','
        << fmt_double(p.a_net_pred) << '\n';
  }
  return out.str();
}

std::string crosscorr_csv(const ScenarioReport& report) {
  std::ostringstream out;
  point_prefix_header(out);
  out << ",lag,a_ty,sigma\n";
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const PointReport& p = report.points[i];
    for (const CrossCorrPoint& c : p.ty.lags) {
      point_prefix(out, i, p);
      out << ',' << c.lag << ',' << fmt_double(c.value) << ','
          << fmt_double(c.sigma) << '\n';
    }
  }
  return out.str();
}

namespace {

void monitoring_rows(std::ostringstream& out, const char* scenario,
                     const ScenarioReport& r, double x_of_point_is_inject,
                     const PointReport& nominal) {
  for (const PointReport& p : r.points) {
    const double x = x_of_point_is_inject != 0.0 ? p.params.f_inject
                                                 : p.params.f_d0;
    const bool below = p.f_g < nominal.f_g && p.f_b < nominal.f_b;
    const bool above = p.f_g > nominal.f_g && p.f_b > nominal.f_b;
    out << scenario << ',' << fmt_double(x) << ',' << fmt_double(p.f_g) << ','
        << fmt_double(p.f_b) << ',' << (below ? 1 : 0) << ','
        << (above ? 1 : 0) << '\n';
  }
}

}  // namespace

std::string monitoring_csv(const MonitoringReport& report) {
  std::ostringstream out;
  out << "scenario,f_d,f_g,f_b,alarm_low,alarm_high\n";
  out << "nominal," << fmt_double(report.nominal.params.f_d0) << ','
      << fmt_double(report.nominal.f_g) << ',' << fmt_double(report.nominal.f_b)
      << ",0,0\n";
  monitoring_rows(out, "both_failing", report.both_failing, 0.0,
                  report.nominal);
  monitoring_rows(out, "d0_failing", report.d0_failing, 0.0, report.nominal);
  monitoring_rows(out, "injection", report.injection, 1.0, report.nominal);
  return out.str();
}

std::string metrics_text(const MetricsReport& m) {
  std::ostringstream out;
  out << "stream = " << to_string(m.label) << "\n";
  out << "n_bits = " << m.n_bits << "\n";
  out << "bias = " << fmt_double(m.bias) << "\n";
  out << "sigma_b = " << fmt_double(m.sigma_b) << "\n";
  if (m.degenerate) {
    out << "degenerate = 1\n";
    return out.str();
  }
  for (const AutocorrPoint& a : m.autocorr) {
    out << "a_" << a.lag << " = " << fmt_double(a.value) << "\n";
    out << "sigma_" << a.lag << " = " << fmt_double(a.sigma) << "\n";
  }
  return out.str();
}

std::string text_report(const ScenarioReport& report) {
  std::ostringstream out;
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const PointReport& p = report.points[i];
    out << "[point " << i << "]\n";
    out << "f_d0_target = " << fmt_double(p.params.f_d0) << "\n";
    out << "f_d1_target = " << fmt_double(p.params.f_d1) << "\n";
    out << "f_inject = " << fmt_double(p.params.f_inject) << "\n";
    out << "duration_s = " << fmt_double(p.duration) << "\n";
    out << "rate_d0 = " << fmt_double(p.rate_d0) << "\n";
    out << "rate_d1 = " << fmt_double(p.rate_d1) << "\n";
    out << "f_g = " << fmt_double(p.f_g) << "\n";
    out << "f_b = " << fmt_double(p.f_b) << "\n";
    out << "accepted = " << p.accepted << "\n";
    out << "blanked = " << p.blanked << "\n";
    out << "ties = " << p.ties << "\n";
    for (const MetricsReport* m : {&p.s, &p.y, &p.t, &p.c}) {
      if (m->n_bits == 0) continue;
      out << "[point " << i << " stream " << to_string(m->label) << "]\n";
      out << metrics_text(*m);
    }
    if (!p.ty.lags.empty()) {
      out << "[point " << i << " crosscorr TY]\n";
      for (const CrossCorrPoint& c : p.ty.lags)
        out << "a_ty_" << c.lag << " = " << fmt_double(c.value) << " +- "
            << fmt_double(c.sigma) << "\n";
    }
    if (p.y_pred) {
      out << "[point " << i << " predictions]\n";
      out << "pred_b_y = " << fmt_double(p.y_pred->exact.b) << "\n";
      out << "pred_a_y = " << fmt_double(p.y_pred->exact.a) << "\n";
      if (p.c_pred) {
        out << "pred_b_c = " << fmt_double(p.c_pred->b) << "\n";
        out << "pred_a_c = " << fmt_double(p.c_pred->a) << "\n";
      }
      out << "pred_a_deadtime = " << fmt_double(p.a_deadtime_pred) << "\n";
      out << "pred_a_net = " << fmt_double(p.a_net_pred) << "\n";
    }
  }
  if (report.crossover_rate)
    out << "crossover_rate_per_detector = " << fmt_double(*report.crossover_rate)
        << "\n";
  if (!report.note.empty()) out << "note = " << report.note << "\n";
  return out.str();
}

std::string suite_csv(const SuiteResult& result) {
  std::ostringstream out;
  out << "test,sequences,pass_count,threshold,proportion_pass,min_p,median_p,"
         "uniformity_p\n";
  for (const TestSummary& t : result.tests) {
    out << t.test_name << ',' << t.sequences << ',' << t.pass_count << ','
        << t.min_pass_count << ',' << (t.proportion_pass ? 1 : 0) << ','
        << fmt_double(t.min_p) << ',' << fmt_double(t.median_p) << ','
        << fmt_double(t.uniformity_p) << '\n';
  }
  return out.str();
}

std::string suite_text(const SuiteResult& result) {
  std::ostringstream out;
  out << "sequences = " << result.sequences << "\n";
  out << "seq_len = " << result.params.seq_len << "\n";
  out << "alpha = " << fmt_double(result.params.alpha) << "\n";
  for (const TestSummary& t : result.tests) {
    out << t.test_name << " = " << t.pass_count << "/" << t.sequences
        << " (threshold " << t.min_pass_count << ") "
        << (t.proportion_pass ? "pass" : "FAIL")
        << " median_p=" << fmt_double(t.median_p)
        << " uniformity_p=" << fmt_double(t.uniformity_p) << "\n";
  }
  out << "all_pass = " << (result.all_pass ? 1 : 0) << "\n";
  return out.str();
}

std::string manifest_text(const Config& resolved, const std::string& command,
                          const std::string& version) {
  std::ostringstream out;
  out << "# combosim run manifest; feed back via --config to reproduce\n";
  out << "version = " << version << "\n";
  out << "command = " << command << "\n";
  for (const auto& [key, value] : resolved.values())
    out << key << " = " << value << "\n";
  return out.str();
}

}  // namespace combosim
