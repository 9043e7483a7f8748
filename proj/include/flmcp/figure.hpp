#ifndef FLMCP_FIGURE_HPP_
#define FLMCP_FIGURE_HPP_

#include <string>
#include <vector>

#include "flmcp/simlab.hpp"

namespace flmcp {

struct FigureFiles {
  std::string csv_path;
  std::string svg_path;
};

/// Writes <prefix>.csv with one line per row and <prefix>.svg with one
/// rejection curve per sample size and a dotted reference line at the
/// nominal level. Rows must be non-empty and share one family. Output is
/// byte-identical for identical rows.
FigureFiles emit_figure_data(const std::vector<RejectionRow>& rows,
                             const std::string& prefix);

/// Reads back a CSV written by emit_figure_data.
std::vector<RejectionRow> load_rejection_rows(const std::string& path);

}  // namespace flmcp

#endif  // FLMCP_FIGURE_HPP_
