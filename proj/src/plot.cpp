#include "ssf/plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssf/io.hpp"

namespace ssf {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 30;
constexpr double kTop = 40;
constexpr double kBottom = 60;

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string render_svg(const StepFunction& xi, std::string_view title) {
  const auto supp = xi.support();
  double x0 = -1.0;
  double x1 = 1.0;
  if (supp) {
    const double pad = std::max(0.05 * (supp->second - supp->first), 1e-9 * std::max(1.0, std::fabs(supp->first)));
    x0 = supp->first - pad;
    x1 = supp->second + pad;
  }
  double y0 = std::min(0.0, xi.min_value());
  double y1 = std::max(0.0, xi.max_value());
  if (y1 - y0 == 0.0) {
    y0 = -1.0;
    y1 = 1.0;
  }
  const double ypad = 0.1 * (y1 - y0);
  y0 -= ypad;
  y1 += ypad;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
  // frame and axes
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "<line class=\"zero\" x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kLeft + pw << "\" y2=\""
     << py(0) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = x0 + (x1 - x0) * i / 4.0;
    const double y = y0 + (y1 - y0) * i / 4.0;
    os << "<text x=\"" << px(x) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << fmt(x)
       << "</text>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">s</text>\n";
  os << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << kTop + ph / 2 << ")\">&#958;(s)</text>\n";

  // one horizontal segment per interval, vertical connectors at the jumps
  const auto& bp = xi.breakpoints();
  const auto& v = xi.values();
  std::ostringstream path;
  path << "M" << px(x0) << "," << py(v.front());
  for (std::size_t i = 0; i < bp.size(); ++i) {
    path << " H" << px(bp[i]) << " V" << py(v[i + 1]);
  }
  path << " H" << px(x1);
  os << "<path class=\"xi\" d=\"" << path.str() << "\" fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"2\"/>\n";

  std::ostringstream legend;
  if (supp) {
    os << "<text x=\"" << kLeft + 8 << "\" y=\"" << kTop + 16 << "\">support [" << fmt(supp->first) << ", "
       << fmt(supp->second) << "]</text>\n";
    legend << "&#8747;&#958; = " << format_double(xi.integral()) << "   &#8214;&#958;&#8214;&#8321; = "
           << format_double(xi.l1_norm());
  } else {
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << py(0) - 10
       << "\" text-anchor=\"middle\">&#958; &#8801; 0</text>\n";
    legend << "&#8747;&#958; = 0   &#8214;&#958;&#8214;&#8321; = 0";
  }
  os << "<text class=\"legend\" x=\"" << kLeft + pw - 8 << "\" y=\"" << kTop + 16 << "\" text-anchor=\"end\">"
     << legend.str() << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

void emit_plot(const StepFunction& xi, const std::filesystem::path& path, std::string_view title) {
  write_text(path, render_svg(xi, title));
}

}  // namespace ssf
