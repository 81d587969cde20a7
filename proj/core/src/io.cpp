#include "herdgibbs/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace herdgibbs {

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sample_record_csv(const SampleRecord& rec) {
  std::ostringstream out;
  out << "sweep";
  for (std::uint32_t i = 0; i < rec.num_vars; ++i) out << ",x" << i;
  out << "\n";
  for (std::size_t k = 0; k < rec.sweeps.size(); ++k) {
    out << (k + 1);
    for (std::uint32_t i = 0; i < rec.num_vars; ++i)
      out << ',' << static_cast<int>(rec.sweeps[k][i]);
    out << "\n";
  }
  return out.str();
}

std::string step_trace_csv(const StepTrace& trace) {
  std::ostringstream out;
  out << "t,var,blanket_code,w_before,p,x_emitted\n";
  for (const StepRecord& s : trace.steps) {
    out << s.t << ',' << s.var << ',' << s.blanket_code << ','
        << format_double(s.w_before) << ',' << format_double(s.p) << ','
        << static_cast<int>(s.x) << "\n";
  }
  return out.str();
}

std::string mean_field_csv(const std::vector<std::vector<double>>& trajectory) {
  std::ostringstream out;
  const std::size_t n = trajectory.empty() ? 0 : trajectory.front().size();
  out << "sweep";
  for (std::size_t i = 0; i < n; ++i) out << ",q" << i;
  out << "\n";
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    out << (k + 1);
    for (double q : trajectory[k]) out << ',' << format_double(q);
    out << "\n";
  }
  return out.str();
}

std::string distribution_csv(const ExactDistribution& d) {
  std::ostringstream out;
  out << "state_index,probability\n";
  for (std::size_t s = 0; s < d.probs.size(); ++s)
    out << s << ',' << format_double(d.probs[s]) << "\n";
  return out.str();
}

std::string error_series_csv(const ErrorSeries& series) {
  std::ostringstream out;
  out << "T,error\n";
  for (const auto& [t, err] : series.points)
    out << t << ',' << format_double(err) << "\n";
  return out.str();
}

std::string slope_report(const SlopeFit& fit) {
  std::ostringstream out;
  out << "slope=" << format_double(fit.slope) << "\n"
      << "intercept=" << format_double(fit.intercept) << "\n"
      << "n_points=" << fit.n_points << "\n"
      << "n_excluded=" << fit.n_excluded << "\n";
  return out.str();
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");

  auto split = [](const std::string& row) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream rs(row);
    while (std::getline(rs, cell, ',')) cells.push_back(cell);
    return cells;
  };

  table.header = split(line);
  if (table.header.empty()) throw std::runtime_error("csv: empty header");

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != table.header.size())
      throw std::runtime_error("csv: row width differs from header");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) {
      std::size_t pos = 0;
      double v = 0;
      try {
        v = std::stod(c, &pos);
      } catch (const std::exception&) {
        throw std::runtime_error("csv: non-numeric cell '" + c + "'");
      }
      if (pos != c.size()) throw std::runtime_error("csv: non-numeric cell '" + c + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace herdgibbs
