#include "magnon/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "magnon/scenario.hpp"

namespace magnon {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 70;
constexpr double kRight = 130;
constexpr double kTop = 40;
constexpr double kBottom = 55;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double x, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<double> nice_ticks(double lo, double hi) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return ticks;
}

int tick_digits(const std::vector<double>& ticks) {
  if (ticks.size() < 2) return 2;
  const double step = ticks[1] - ticks[0];
  return std::clamp(static_cast<int>(std::ceil(-std::log10(step) + 1e-9)), 0, 6);
}

struct Frame2D {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void axes(std::ostringstream& os, const Frame2D& f, const std::string& title, const std::string& xlabel,
          const std::string& ylabel) {
  const double plot_bottom = kHeight - kBottom;
  const double plot_right = kWidth - kRight;
  os << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(plot_right - kLeft)
     << "\" height=\"" << fmt(plot_bottom - kTop) << "\" fill=\"none\" stroke=\"black\"/>\n";
  const auto xt = nice_ticks(f.x0, f.x1);
  const int xd = tick_digits(xt);
  for (double t : xt) {
    const double x = f.px(t);
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(plot_bottom) << "\" x2=\"" << fmt(x) << "\" y2=\""
       << fmt(plot_bottom + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(plot_bottom + 18)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(t, xd) << "</text>\n";
  }
  const auto yt = nice_ticks(f.y0, f.y1);
  const int yd = tick_digits(yt);
  for (double t : yt) {
    const double y = f.py(t);
    os << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
       << fmt(y) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(y + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(t, yd) << "</text>\n";
  }
  os << "<text x=\"" << fmt((kLeft + plot_right) / 2) << "\" y=\"" << fmt(kHeight - 15)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(xlabel) << "</text>\n";
  os << "<text x=\"18\" y=\"" << fmt((kTop + plot_bottom) / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
     << "transform=\"rotate(-90 18 " << fmt((kTop + plot_bottom) / 2) << ")\">" << escape(ylabel) << "</text>\n";
  os << "<text x=\"" << fmt((kLeft + plot_right) / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(title) << "</text>\n";
}

void polyline(std::ostringstream& os, const Frame2D& f, const std::vector<double>& xs,
              const std::vector<double>& ys, const char* color) {
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? " " : "") << fmt(f.px(xs[i])) << "," << fmt(f.py(ys[i]));
  os << "\"/>\n";
}

std::string header() {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth, 0) + "\" height=\"" +
         fmt(kHeight, 0) + "\" viewBox=\"0 0 " + fmt(kWidth, 0) + " " + fmt(kHeight, 0) +
         "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string population_plot(const PopulationSeries& s) {
  if (s.times_s.empty() || s.values.empty()) throw ContractViolation("emit_plot: empty trajectory");
  std::vector<double> t_ns;
  for (double t : s.times_s) t_ns.push_back(t * 1e9);
  Frame2D f{t_ns.front(), t_ns.back() > t_ns.front() ? t_ns.back() : t_ns.front() + 1, 0.0, 1.0};

  std::ostringstream os;
  os << header();
  if (s.window_s) {
    const double a = f.px(s.window_s->first * 1e9);
    const double b = f.px(s.window_s->second * 1e9);
    os << "<rect x=\"" << fmt(a) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(b - a) << "\" height=\""
       << fmt(kHeight - kTop - kBottom) << "\" fill=\"#bbbbbb\" fill-opacity=\"0.5\"/>\n";
  }
  axes(os, f, s.title, "time (ns)", "population");
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    polyline(os, f, t_ns, s.values[k], color);
    const double ly = kTop + 14 + 20.0 * static_cast<double>(k);
    const double lx = kWidth - kRight + 12;
    os << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(lx + 22) << "\" y2=\""
       << fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fmt(lx + 28) << "\" y=\"" << fmt(ly) << "\" font-size=\"12\">|"
       << escape(s.labels.at(k)) << "&#x27E9;</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string phase_plot(const PhaseSeries& s) {
  if (s.detunings_hz.empty()) throw ContractViolation("emit_plot: empty phase scan");
  std::vector<double> x_mhz;
  for (double d : s.detunings_hz) x_mhz.push_back(d * 1e-6);
  const auto [xmin, xmax] = std::minmax_element(x_mhz.begin(), x_mhz.end());
  const auto [ymin, ymax] = std::minmax_element(s.phases_rad.begin(), s.phases_rad.end());
  double y0 = std::min(*ymin, -1.0), y1 = std::max(*ymax, 1.0);
  const double pad = 0.05 * (y1 - y0);
  Frame2D f{*xmin, *xmax > *xmin ? *xmax : *xmin + 1, y0 - pad, y1 + pad};

  std::ostringstream os;
  os << header();
  axes(os, f, s.title, "detuning \xCE\x94\xCF\x89/2\xCF\x80 (MHz)", "N00N phase (rad)");
  polyline(os, f, x_mhz, s.phases_rad, kPalette[0]);
  for (std::size_t i = 0; i < x_mhz.size(); ++i)
    os << "<circle cx=\"" << fmt(f.px(x_mhz[i])) << "\" cy=\"" << fmt(f.py(s.phases_rad[i]))
       << "\" r=\"2.5\" fill=\"" << kPalette[0] << "\"/>\n";
  const double lx = kWidth - kRight + 12;
  os << "<circle cx=\"" << fmt(lx + 11) << "\" cy=\"" << fmt(kTop + 10) << "\" r=\"3\" fill=\"" << kPalette[0]
     << "\"/>\n<text x=\"" << fmt(lx + 28) << "\" y=\"" << fmt(kTop + 14)
     << "\" font-size=\"12\">arg(c02/c20)</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace

PopulationSeries population_series(const Trajectory<double>& traj, std::string title,
                                   std::optional<std::pair<double, double>> window_s, double threshold) {
  PopulationSeries s;
  s.title = std::move(title);
  s.window_s = window_s;
  s.times_s = traj.times;
  if (traj.empty()) return s;
  const auto states = traj.states.front().basis().states();
  for (std::size_t j = 0; j < states.size(); ++j) {
    std::vector<double> v;
    double peak = 0;
    for (const auto& p : traj.populations) {
      v.push_back(p(static_cast<Eigen::Index>(j)));
      peak = std::max(peak, v.back());
    }
    if (peak > threshold) {
      s.labels.push_back(ket_label(states[j]));
      s.values.push_back(std::move(v));
    }
  }
  return s;
}

PhaseSeries phase_series(const PhaseScanResult<double>& scan, std::string title) {
  PhaseSeries s;
  s.title = std::move(title);
  for (double d : scan.detunings) s.detunings_hz.push_back(rad_to_hz(d));
  s.phases_rad = scan.phases;
  return s;
}

std::string emit_plot(const PlotSource& source, PlotKind kind) {
  if (kind == PlotKind::populations) {
    const auto* s = std::get_if<PopulationSeries>(&source);
    if (!s) throw ContractViolation("emit_plot: population plot requested for a phase scan");
    return population_plot(*s);
  }
  const auto* s = std::get_if<PhaseSeries>(&source);
  if (!s) throw ContractViolation("emit_plot: phase plot requested for a population trajectory");
  return phase_plot(*s);
}

}  // namespace magnon
