#include "secest/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace secest {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_trace_csv(const SimTrace& trace, const std::string& path, int decimation) {
  if (decimation < 1) throw std::invalid_argument("write_trace_csv: decimation must be >= 1");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot write " + path);

  const int n = trace.x.empty() ? 0 : static_cast<int>(trace.x.front().size());
  const int ny = trace.y.empty() ? 0 : static_cast<int>(trace.y.front().size());

  std::string header = "t";
  for (int i = 0; i < n; ++i) header += ",x[" + std::to_string(i) + "]";
  for (const IndexSet& s : trace.tier1_sets) {
    for (int i = 0; i < n; ++i) header += ",xhat_S" + s.label() + "[" + std::to_string(i) + "]";
  }
  for (const IndexSet& s : trace.tier1_sets) header += ",pi_S" + s.label();
  header += ",sigma";
  for (int i = 0; i < ny; ++i) header += ",y[" + std::to_string(i) + "]";
  for (int i = 0; i < ny; ++i) header += ",a[" + std::to_string(i) + "]";
  for (const IndexSet& s : trace.tier2_sets) {
    for (int i = 0; i < n; ++i) header += ",xhat_P" + s.label() + "[" + std::to_string(i) + "]";
  }
  out << header << "\n";

  for (int s = 0; s < trace.samples(); ++s) {
    if (s % decimation != 0 && s + 1 != trace.samples()) continue;
    std::string row = fmt(trace.times[static_cast<size_t>(s)]);
    const auto& x = trace.x[static_cast<size_t>(s)];
    for (int i = 0; i < n; ++i) row += "," + fmt(x(i));
    for (const auto& xh : trace.xhat1[static_cast<size_t>(s)]) {
      for (int i = 0; i < n; ++i) row += "," + fmt(xh(i));
    }
    for (double pi : trace.pis[static_cast<size_t>(s)]) row += "," + fmt(pi);
    const int sig = trace.sigma[static_cast<size_t>(s)];
    row += ",";
    row += sig >= 0 ? trace.tier1_sets[static_cast<size_t>(sig)].label() : "none";
    const auto& y = trace.y[static_cast<size_t>(s)];
    for (int i = 0; i < ny; ++i) row += "," + fmt(y(i));
    const auto& a = trace.attack[static_cast<size_t>(s)];
    for (int i = 0; i < ny; ++i) row += "," + fmt(a(i));
    for (const auto& xh : trace.xhat2[static_cast<size_t>(s)]) {
      for (int i = 0; i < n; ++i) row += "," + fmt(xh(i));
    }
    out << row << "\n";
  }
}

int TraceTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

double TraceTable::value(int row, int col) const {
  return std::stod(rows[static_cast<size_t>(row)][static_cast<size_t>(col)]);
}

std::vector<double> TraceTable::numeric_column(const std::string& name) const {
  const int col = column(name);
  if (col < 0) throw std::runtime_error("TraceTable: no column named " + name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) out.push_back(value(static_cast<int>(r), col));
  return out;
}

TraceTable read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_trace_csv: cannot read " + path);
  TraceTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

}  // namespace secest
