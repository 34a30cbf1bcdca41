#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "selfcma/run_log.hpp"

namespace selfcma {

/// Extents of the plotted series, also embedded in the SVG as data-*
/// attributes of the element with id "extents".
struct PlotExtents {
  double evals_min = 0.0;
  double evals_max = 0.0;
  double best_f_min = 0.0;
  double best_f_max = 0.0;
};

PlotExtents plot_extents(const RunLog& log);

/// Dual-axis chart: c1 / cmu / cc against evaluations on a linear left axis
/// fixed to [0, 0.9], log10(best_f) on the right axis. Throws
/// Error(EmptyInput) for an empty log.
std::string render_svg(const RunLog& log, std::string_view title = {});

/// render_svg written to `path`; Error(IoError) on failure.
void emit_plot(const RunLog& log, const std::filesystem::path& path, std::string_view title = {});

}  // namespace selfcma
