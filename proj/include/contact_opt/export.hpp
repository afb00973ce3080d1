#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "contact_opt/harness.hpp"

namespace contact {

/// Shortest round-trip decimal; infinities as "inf" / "-inf", NaN as "nan".
std::string format_double(double v);
double parse_double(const std::string& text);

/// Trace CSV: `optimizer,trial,iter,f_gap,diverged`, one row per iteration.
void export_trace_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
std::string trace_csv(const std::vector<RunRecord>& records);

/// Rows of a trace CSV grouped back into (optimizer, trial) traces.
struct TraceSeries {
  std::string optimizer;
  int trial = 0;
  bool diverged = false;
  std::vector<double> trace;
};
std::vector<TraceSeries> read_trace_csv(const std::filesystem::path& path);

/// Band CSV: `optimizer,iter,median,q025,q975`.
void export_band_csv(const std::vector<QuantileBand>& bands, const std::filesystem::path& path);
std::string band_csv(const std::vector<QuantileBand>& bands);
std::vector<QuantileBand> read_band_csv(const std::filesystem::path& path);

struct SvgOptions {
  std::string title;
  int width = 640;
  int height = 420;
  /// Values at or below this (including zero gaps) are drawn at the floor.
  double floor = 1e-300;
};

/// Log10 gap-vs-iteration figure: shaded q025..q975 polygon and median line
/// per band, one legend entry per band.
void export_svg(const std::vector<QuantileBand>& bands, const std::filesystem::path& path,
                const SvgOptions& options = {});
std::string render_svg(const std::vector<QuantileBand>& bands, const SvgOptions& options = {});

}  // namespace contact
