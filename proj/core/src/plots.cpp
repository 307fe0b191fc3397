#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "msplace/error.hpp"
#include "msplace/eval.hpp"
#include "msplace/text.hpp"

namespace msplace {

namespace {

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c",
                                              "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// Plot area: 60..460 in x (recall), 20..420 in y (precision, inverted).
std::string pr_svg(const std::vector<NamedCurve>& curves) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
        "viewBox=\"0 0 640 480\">\n";
  os << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  os << "<rect x=\"60\" y=\"20\" width=\"400\" height=\"400\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 10; ++i) {
    const double f = i / 10.0;
    const std::string x = fmt(60 + 400 * f);
    const std::string y = fmt(420 - 400 * f);
    os << "<line x1=\"" << x << "\" y1=\"420\" x2=\"" << x << "\" y2=\"425\" stroke=\"black\"/>\n";
    os << "<text x=\"" << x << "\" y=\"440\" font-size=\"10\" text-anchor=\"middle\">" << fmt(f)
       << "</text>\n";
    os << "<line x1=\"55\" y1=\"" << y << "\" x2=\"60\" y2=\"" << y << "\" stroke=\"black\"/>\n";
    os << "<text x=\"50\" y=\"" << y << "\" font-size=\"10\" text-anchor=\"end\">" << fmt(f)
       << "</text>\n";
  }
  os << "<text x=\"260\" y=\"465\" font-size=\"12\" text-anchor=\"middle\">Recall</text>\n";
  os << "<text x=\"15\" y=\"220\" font-size=\"12\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 15 220)\">Precision</text>\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* colour = kPalette[c % kPalette.size()];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    const auto& pts = curves[c].curve.points;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      os << fmt(60 + 400 * it->recall) << ',' << fmt(420 - 400 * it->precision) << ' ';
    }
    os << "\"/>\n";
    const std::string ly = fmt(40 + 20.0 * static_cast<double>(c));
    os << "<line x1=\"475\" y1=\"" << ly << "\" x2=\"495\" y2=\"" << ly << "\" stroke=\"" << colour
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"500\" y=\"" << ly << "\" font-size=\"11\" dominant-baseline=\"middle\">"
       << escape(curves[c].name) << " (AUC " << fmt(curves[c].curve.auc) << ")</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string report_svg(const std::vector<ModalityShare>& report) {
  const int bar_h = 22;
  const int height = 40 + bar_h * static_cast<int>(report.size());
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"560\" height=\"" << height
     << "\" viewBox=\"0 0 560 " << height << "\">\n";
  os << "<rect width=\"560\" height=\"" << height << "\" fill=\"white\"/>\n";
  os << "<text x=\"280\" y=\"18\" font-size=\"13\" text-anchor=\"middle\">Modality importance "
        "weights (%)</text>\n";
  for (std::size_t i = 0; i < report.size(); ++i) {
    const double y = 30 + bar_h * static_cast<double>(i);
    const double w = 3.6 * report[i].percent;
    os << "<text x=\"95\" y=\"" << fmt(y + 14) << "\" font-size=\"11\" text-anchor=\"end\">"
       << escape(report[i].name) << "</text>\n";
    os << "<rect x=\"100\" y=\"" << fmt(y + 3) << "\" width=\"" << fmt(w) << "\" height=\""
       << bar_h - 6 << "\" fill=\"" << kPalette[0] << "\"/>\n";
    os << "<text x=\"" << fmt(105 + w) << "\" y=\"" << fmt(y + 14) << "\" font-size=\"10\">"
       << fmt(report[i].percent) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << body;
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const std::vector<NamedCurve>& curves,
                                              const std::optional<std::vector<ModalityShare>>& report,
                                              const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& c : curves) {
    const auto path = out_dir / ("pr_" + c.name + ".csv");
    write_curve_csv(c.curve, path);
    written.push_back(path);
  }
  if (!curves.empty()) {
    const auto path = out_dir / "pr_curves.svg";
    write_text(path, pr_svg(curves));
    written.push_back(path);
  }
  if (report) {
    const auto csv = out_dir / "modality_weights.csv";
    write_report_csv(*report, csv);
    written.push_back(csv);
    const auto svg = out_dir / "modality_weights.svg";
    write_text(svg, report_svg(*report));
    written.push_back(svg);
  }
  return written;
}

}  // namespace msplace
