#ifndef HERDGIBBS_IO_HPP
#define HERDGIBBS_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "herdgibbs/diagnostics.hpp"
#include "herdgibbs/herded.hpp"
#include "herdgibbs/oracle.hpp"

namespace herdgibbs {

// Writes content to path via a temporary file in the same directory followed
// by an atomic rename, so concurrent writers never interleave.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// Doubles are printed with %.17g throughout so every CSV value round-trips.
std::string format_double(double v);

// Header "sweep,x0,x1,..."; one row per completed sweep, 1-based index.
std::string sample_record_csv(const SampleRecord& rec);

// Header "t,var,blanket_code,w_before,p,x_emitted".
std::string step_trace_csv(const StepTrace& trace);

// Header "sweep,q0,q1,..." from a mean-field trajectory.
std::string mean_field_csv(const std::vector<std::vector<double>>& trajectory);

// Header "state_index,probability".
std::string distribution_csv(const ExactDistribution& d);

// Header "T,error".
std::string error_series_csv(const ErrorSeries& series);

// Plain-text key-value block: "slope=... intercept=... n_points=..." lines.
std::string slope_report(const SlopeFit& fit);

// Minimal CSV reader for schema round-trip tests: the header line split on
// commas plus all following rows parsed as doubles.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable parse_csv(const std::string& text);

}  // namespace herdgibbs

#endif  // HERDGIBBS_IO_HPP
