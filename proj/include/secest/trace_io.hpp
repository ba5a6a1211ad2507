#pragma once

#include <string>
#include <vector>

#include "secest/sim.hpp"

namespace secest {

/// Columnar trace file: header row, one row per recorded sample, floating
/// point written with 17 significant digits. Columns: t, x[..],
/// xhat_S{set}[..] and pi_S{set} per tier-1 set, sigma (chosen set label),
/// y[..], a[..], then xhat_P{set}[..] per tier-2 set.
void write_trace_csv(const SimTrace& trace, const std::string& path, int decimation = 1);

/// Minimal reader for post-hoc reporting and round-trip tests.
struct TraceTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  double value(int row, int col) const;
  std::vector<double> numeric_column(const std::string& name) const;
};

TraceTable read_trace_csv(const std::string& path);

}  // namespace secest
