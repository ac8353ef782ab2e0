#include "carrystate/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "carrystate/error.hpp"
#include "carrystate/io.hpp"

namespace cs {

namespace {

constexpr double kW = 640, kH = 480, kL = 70, kR = 30, kT = 40, kB = 60;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else if (c == '"') o += "&quot;";
    else o += c;
  }
  return o;
}

std::string header(const std::string& title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) + "\" height=\"" + num(kH) +
                  "\" viewBox=\"0 0 " + num(kW) + " " + num(kH) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kW / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + esc(title) + "</text>\n";
  return s;
}

std::string text(double x, double y, const std::string& t, const char* anchor = "middle") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\">" + esc(t) + "</text>\n";
}

std::string line(double x0, double y0, double x1, double y1, const char* stroke = "black") {
  return "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(y1) +
         "\" stroke=\"" + stroke + "\"/>\n";
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string axes(const std::string& xl, const std::string& yl) {
  std::string s = line(kL, kH - kB, kW - kR, kH - kB) + line(kL, kT, kL, kH - kB);
  s += text((kL + kW - kR) / 2, kH - 15, xl);
  s += "<text x=\"18\" y=\"" + num((kT + kH - kB) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
       num((kT + kH - kB) / 2) + ")\">" + esc(yl) + "</text>\n";
  return s;
}

// Diverging map on log10(v): blue below 1, red above, clamped at two decades.
std::string color(double v) {
  if (!std::isfinite(v) || v <= 0) return "#dddddd";
  const double t = std::clamp(std::log10(v) / 2.0, -1.0, 1.0);
  int r, g, b;
  if (t < 0) {
    r = static_cast<int>(std::lround(255 * (1 + t)));
    g = r;
    b = 255;
  } else {
    r = 255;
    g = static_cast<int>(std::lround(255 * (1 - t)));
    b = g;
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

}  // namespace

std::string svg_phase_diagram(const PhaseDiagram& pd) {
  if (pd.B.empty() || pd.r.empty()) fail(ErrorCode::InvalidArgument, "phase diagram is empty");
  std::string s = header("sqrt(D_q) over budget and resolution ratio");
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  const double cw = pw / pd.B.size(), ch = ph / pd.r.size();
  for (std::size_t i = 0; i < pd.r.size(); ++i)
    for (std::size_t j = 0; j < pd.B.size(); ++j) {
      const double x = kL + j * cw, y = kH - kB - (i + 1) * ch;
      s += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cw) + "\" height=\"" + num(ch) +
           "\" fill=\"" + color(pd.value[i][j]) + "\"/>\n";
    }
  // Cell centres map grid values to pixels; contour points interpolate between them.
  auto px = [&](double B) {
    const auto& g = pd.B;
    if (g.size() == 1) return kL + cw / 2;
    auto it = std::upper_bound(g.begin(), g.end(), B);
    std::size_t k = std::clamp<std::size_t>(it - g.begin(), 1, g.size() - 1);
    const double f = (B - g[k - 1]) / (g[k] - g[k - 1]);
    return kL + (k - 1 + f + 0.5) * cw;
  };
  auto py = [&](double r) {
    const auto& g = pd.r;
    if (g.size() == 1) return kH - kB - ch / 2;
    auto it = std::upper_bound(g.begin(), g.end(), r);
    std::size_t k = std::clamp<std::size_t>(it - g.begin(), 1, g.size() - 1);
    const double f = (r - g[k - 1]) / (g[k] - g[k - 1]);
    return kH - kB - (k - 1 + f + 0.5) * ch;
  };
  for (const auto& [B, r] : pd.contour)
    s += "<circle cx=\"" + num(px(B)) + "\" cy=\"" + num(py(r)) + "\" r=\"2.5\" fill=\"black\"/>\n";
  s += axes("budget B (bits per coarse point)", "resolution ratio r");
  const std::size_t bstep = std::max<std::size_t>(1, pd.B.size() / 8), rstep = std::max<std::size_t>(1, pd.r.size() / 8);
  for (std::size_t j = 0; j < pd.B.size(); j += bstep) s += text(kL + (j + 0.5) * cw, kH - kB + 15, label(pd.B[j]));
  for (std::size_t i = 0; i < pd.r.size(); i += rstep)
    s += text(kL - 6, kH - kB - (i + 0.5) * ch + 4, label(pd.r[i]), "end");
  return s + "</svg>\n";
}

std::string svg_shell_curves(const std::vector<ShellCurve>& curves, const std::string& title) {
  std::string s = header(title);
  std::size_t shells = 0;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& c : curves) {
    shells = std::max(shells, c.L2.size());
    for (double v : c.L2)
      if (std::isfinite(v) && v > 0) {
        lo = std::min(lo, std::log10(v));
        hi = std::max(hi, std::log10(v));
      }
  }
  if (!std::isfinite(lo)) lo = -1, hi = 0;
  lo = std::floor(lo);
  hi = std::max(std::ceil(hi), lo + 1);
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  auto px = [&](std::size_t k) { return kL + (shells > 1 ? pw * k / (shells - 1.0) : pw / 2); };
  auto py = [&](double v) { return kH - kB - ph * (std::log10(v) - lo) / (hi - lo); };
  for (double e = lo; e <= hi; e += 1) {
    s += line(kL, py(std::pow(10, e)), kW - kR, py(std::pow(10, e)), "#eeeeee");
    s += text(kL - 6, py(std::pow(10, e)) + 4, "1e" + label(e), "end");
  }
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const char* col = kPalette[i % 8];
    std::string pts;
    for (std::size_t k = 0; k < c.L2.size(); ++k) {
      if (!(std::isfinite(c.L2[k]) && c.L2[k] > 0)) {
        if (!pts.empty()) s += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" points=\"" + pts + "\"/>\n";
        pts.clear();
        continue;
      }
      pts += (pts.empty() ? "" : " ") + num(px(k)) + "," + num(py(c.L2[k]));
    }
    if (!pts.empty()) s += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" points=\"" + pts + "\"/>\n";
    s += "<rect x=\"" + num(kW - kR - 150) + "\" y=\"" + num(kT + 14 * i) + "\" width=\"10\" height=\"10\" fill=\"" +
         col + "\"/>\n";
    s += text(kW - kR - 135, kT + 14 * i + 9, c.channel + " @ " + std::to_string(c.bits) + " bits", "start");
  }
  const std::size_t step = std::max<std::size_t>(1, shells / 8);
  for (std::size_t k = 0; k < shells; k += step) s += text(px(k), kH - kB + 15, std::to_string(k));
  s += axes("shell", "relative distortion");
  return s + "</svg>\n";
}

std::string svg_ladder_bars(const LadderResult& r) {
  std::string s = header(r.family + ": fineRel(0) per design");
  double hi = 0;
  for (const auto& row : r.rows)
    if (std::isfinite(row.fine_rel)) hi = std::max(hi, row.fine_rel);
  hi = hi > 0 ? hi * 1.1 : 1.0;
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  const double bw = pw / std::max<std::size_t>(1, r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const double v = std::isfinite(r.rows[i].fine_rel) ? r.rows[i].fine_rel : 0.0;
    const double h = ph * v / hi;
    s += "<rect x=\"" + num(kL + i * bw + bw * 0.15) + "\" y=\"" + num(kH - kB - h) + "\" width=\"" + num(bw * 0.7) +
         "\" height=\"" + num(h) + "\" fill=\"" + kPalette[i % 8] + "\"/>\n";
    s += text(kL + (i + 0.5) * bw, kH - kB - h - 4, label(r.rows[i].fine_rel));
    s += text(kL + (i + 0.5) * bw, kH - kB + 15, r.rows[i].label);
  }
  for (int k = 0; k <= 4; ++k) s += text(kL - 6, kH - kB - ph * k / 4 + 4, label(hi * k / 4), "end");
  s += axes("design", "fineRel(0)");
  return s + "</svg>\n";
}

void write_plot(const std::string& path, const std::string& svg) { write_text(path, svg); }

}  // namespace cs
