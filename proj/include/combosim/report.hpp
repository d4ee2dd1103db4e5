#pragma once

#include <string>

#include "combosim/config.hpp"
#include "combosim/scenario.hpp"
#include "combosim/sts.hpp"

namespace combosim {

/// CSV/report writers. Numeric formatting is fixed (shortest round-trip
/// doubles) so identical runs produce byte-identical files.

/// One row per (point, stream, lag): the stats module's long schema with
/// the point's input parameters prepended.
std::string metrics_csv(const ScenarioReport& report);

/// One row per point: inputs, per-stream bias/lag-1 summaries, rates and
/// the closed-form predictions side by side.
std::string summary_csv(const ScenarioReport& report);

/// One row per (point, lag) of the T/Y cross-correlation.
std::string crosscorr_csv(const ScenarioReport& report);

/// Monitoring: one row per point per scenario family: scenario, x value,
/// f_G, f_B and the alarm flags relative to the nominal reference.
std::string monitoring_csv(const MonitoringReport& report);

/// Human-readable key-value rendering of a scenario report.
std::string text_report(const ScenarioReport& report);

/// Suite results as CSV mirroring the summary table layout.
std::string suite_csv(const SuiteResult& result);
std::string suite_text(const SuiteResult& result);

std::string metrics_text(const MetricsReport& report);

/// Serializes the fully resolved configuration (plus seed, version and the
/// invoking command) in config syntax, so a run can be reproduced from its
/// manifest alone.
std::string manifest_text(const Config& resolved, const std::string& command,
                          const std::string& version);

/// Round-trippable double formatting (max_digits10).
std::string fmt_double(double v);

}  // namespace combosim
