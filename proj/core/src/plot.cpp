#include "selfcma/plot.hpp"

#include <algorithm>
#include <cmath>
#include <locale>
#include <sstream>
#include <vector>

#include "selfcma/error.hpp"

namespace selfcma {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 80.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr double kRateMax = 0.9;
constexpr double kFloor = 1e-300;
constexpr std::size_t kMaxMarkers = 25;

std::string fmt(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s.precision(6);
  s << v;
  return s.str();
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x_lo, x_hi, f_lo, f_hi;

  double px(double evals) const {
    const double span = x_hi > x_lo ? x_hi - x_lo : 1.0;
    return kLeft + (evals - x_lo) / span * (kWidth - kLeft - kRight);
  }
  double py_rate(double c) const {
    return kHeight - kBottom - std::clamp(c, 0.0, kRateMax) / kRateMax * (kHeight - kTop - kBottom);
  }
  double py_logf(double lf) const {
    const double span = f_hi > f_lo ? f_hi - f_lo : 1.0;
    return kHeight - kBottom - (lf - f_lo) / span * (kHeight - kTop - kBottom);
  }
};

void marker(std::ostream& out, int shape, double x, double y, const char* color) {
  switch (shape) {
    case 0:
      out << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"3.5\" fill=\"" << color << "\"/>";
      break;
    case 1:
      out << "<rect x=\"" << fmt(x - 3.5) << "\" y=\"" << fmt(y - 3.5)
          << "\" width=\"7\" height=\"7\" fill=\"" << color << "\"/>";
      break;
    default:
      out << "<polygon points=\"" << fmt(x) << ',' << fmt(y - 4.5) << ' ' << fmt(x - 4) << ','
          << fmt(y + 3) << ' ' << fmt(x + 4) << ',' << fmt(y + 3) << "\" fill=\"" << color << "\"/>";
  }
  out << '\n';
}

}  // namespace

PlotExtents plot_extents(const RunLog& log) {
  if (log.empty()) throw Error(ErrorCode::EmptyInput, "cannot plot an empty log");
  PlotExtents e{static_cast<double>(log.records.front().evals), static_cast<double>(log.records.front().evals),
                log.records.front().best_f, log.records.front().best_f};
  for (const GenerationRecord& r : log.records) {
    e.evals_min = std::min(e.evals_min, static_cast<double>(r.evals));
    e.evals_max = std::max(e.evals_max, static_cast<double>(r.evals));
    e.best_f_min = std::min(e.best_f_min, r.best_f);
    e.best_f_max = std::max(e.best_f_max, r.best_f);
  }
  return e;
}

std::string render_svg(const RunLog& log, std::string_view title) {
  const PlotExtents ext = plot_extents(log);
  const auto log10f = [](double f) { return std::log10(std::max(f, kFloor)); };
  Frame frame{ext.evals_min, ext.evals_max, std::floor(log10f(ext.best_f_min)),
              std::ceil(log10f(ext.best_f_max))};
  if (frame.f_hi <= frame.f_lo) frame.f_hi = frame.f_lo + 1.0;

  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(title) << "</text>\n";
  }
  out << "<g id=\"extents\" data-evals-min=\"" << format_double(ext.evals_min) << "\" data-evals-max=\""
      << format_double(ext.evals_max) << "\" data-best-f-min=\"" << format_double(ext.best_f_min)
      << "\" data-best-f-max=\"" << format_double(ext.best_f_max) << "\"/>\n";

  // Axes.
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  out << "<g id=\"axes\" stroke=\"black\" fill=\"none\">\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\"/>\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\"/>\n"
      << "<line x1=\"" << x1 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y1 << "\"/>\n"
      << "</g>\n";

  out << "<g id=\"left-ticks\" text-anchor=\"end\">\n";
  for (int i = 0; i <= 9; i += 3) {
    const double c = i / 10.0;
    out << "<text x=\"" << x0 - 6 << "\" y=\"" << fmt(frame.py_rate(c) + 4) << "\">" << fmt(c) << "</text>\n";
  }
  out << "</g>\n<g id=\"right-ticks\" text-anchor=\"start\">\n";
  const int f_steps = static_cast<int>(frame.f_hi - frame.f_lo);
  const int f_stride = std::max(1, f_steps / 8);
  for (int k = 0; k <= f_steps; k += f_stride) {
    const double lf = frame.f_lo + k;
    out << "<text x=\"" << x1 + 6 << "\" y=\"" << fmt(frame.py_logf(lf) + 4) << "\">" << fmt(lf) << "</text>\n";
  }
  out << "</g>\n<g id=\"bottom-ticks\" text-anchor=\"middle\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double ev = ext.evals_min + (ext.evals_max - ext.evals_min) * k / 4.0;
    out << "<text x=\"" << fmt(frame.px(ev)) << "\" y=\"" << y0 + 18 << "\">" << fmt(ev) << "</text>\n";
  }
  out << "</g>\n"
      << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\">function evaluations</text>\n"
      << "<text transform=\"translate(18," << (y0 + y1) / 2
      << ") rotate(-90)\" text-anchor=\"middle\">learning rate</text>\n"
      << "<text transform=\"translate(" << kWidth - 18 << ',' << (y0 + y1) / 2
      << ") rotate(90)\" text-anchor=\"middle\">log10(best f)</text>\n";

  struct Series {
    const char* id;
    const char* label;
    const char* color;
    double GenerationRecord::*field;
  };
  const Series rates[] = {{"series-c1", "c1", "#1f77b4", &GenerationRecord::c1},
                          {"series-cmu", "cmu", "#d62728", &GenerationRecord::cmu},
                          {"series-cc", "cc", "#2ca02c", &GenerationRecord::cc}};

  const std::size_t stride = std::max<std::size_t>(1, log.records.size() / kMaxMarkers);
  for (int s = 0; s < 3; ++s) {
    const Series& series = rates[s];
    out << "<g id=\"" << series.id << "\">\n<polyline fill=\"none\" stroke=\"" << series.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const GenerationRecord& r : log.records) {
      out << fmt(frame.px(static_cast<double>(r.evals))) << ',' << fmt(frame.py_rate(r.*series.field)) << ' ';
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < log.records.size(); i += stride) {
      const GenerationRecord& r = log.records[i];
      marker(out, s, frame.px(static_cast<double>(r.evals)), frame.py_rate(r.*series.field), series.color);
    }
    out << "</g>\n";
  }

  out << "<g id=\"series-best-f\">\n<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
  for (const GenerationRecord& r : log.records) {
    out << fmt(frame.px(static_cast<double>(r.evals))) << ',' << fmt(frame.py_logf(log10f(r.best_f))) << ' ';
  }
  out << "\"/>\n</g>\n";

  out << "<g id=\"legend\">\n";
  double ly = kTop + 12;
  for (int s = 0; s < 3; ++s) {
    marker(out, s, x0 + 20, ly - 4, rates[s].color);
    out << "<text x=\"" << x0 + 32 << "\" y=\"" << ly << "\">" << rates[s].label << "</text>\n";
    ly += 18;
  }
  out << "<line x1=\"" << x0 + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << x0 + 28 << "\" y2=\"" << ly - 4
      << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n"
      << "<text x=\"" << x0 + 32 << "\" y=\"" << ly << "\">log10(best f)</text>\n</g>\n"
      << "</svg>\n";
  return out.str();
}

void emit_plot(const RunLog& log, const std::filesystem::path& path, std::string_view title) {
  write_file_atomic(path, render_svg(log, title));
}

}  // namespace selfcma
