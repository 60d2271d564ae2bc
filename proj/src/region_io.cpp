#include "detthin/region_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace detthin {
namespace {

int decimals_for(double step) {
  if (!(step > 0.0)) return 6;
  return std::clamp(static_cast<int>(std::ceil(-std::log10(step) - 1e-9)), 0, 12);
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

std::size_t write_region_csv(std::ostream& out, const RegionGrid& grid) {
  const int digits = decimals_for(grid.step);
  out << "lambda,mu,feasible,k\n";
  std::size_t rows = 0;
  for (std::size_t im = 0; im < grid.mu_axis.size(); ++im) {
    for (std::size_t il = 0; il < grid.lambda_axis.size(); ++il) {
      const auto& c = grid.cell(il, im);
      if (!c) continue;
      out << fixed(grid.lambda_axis[il], digits) << ',' << fixed(grid.mu_axis[im], digits) << ','
          << (c->feasible ? 1 : 0) << ',' << (c->feasible ? *c->k : *c->blocking_k) << '\n';
      ++rows;
    }
  }
  return rows;
}

void write_region_svg(std::ostream& out, const RegionGrid& grid) {
  if (grid.lambda_axis.empty() || grid.mu_axis.empty()) return;
  const double l0 = grid.lambda_axis.front(), l1 = grid.lambda_axis.back();
  const double m0 = grid.mu_axis.front(), m1 = grid.mu_axis.back();
  const double scale = 600.0 / std::max(l1 - l0, m1 - m0);
  const double margin = 50.0;
  const double width = (l1 - l0) * scale + 2 * margin;
  const double height = (m1 - m0) * scale + 2 * margin;
  auto px = [&](double lam) { return margin + (lam - l0) * scale; };
  auto py = [&](double mu) { return height - margin - (mu - m0) * scale; };
  const double cell = grid.step * scale;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\""
      << fixed(height, 0) << "\" viewBox=\"0 0 " << fixed(width, 0) << ' ' << fixed(height, 0)
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g fill=\"#bbbbbb\" shape-rendering=\"crispEdges\">\n";

  // Horizontal runs of feasible cells, one rect per run.
  for (std::size_t im = 0; im < grid.mu_axis.size(); ++im) {
    std::size_t il = 0;
    while (il < grid.lambda_axis.size()) {
      const auto& c = grid.cell(il, im);
      if (!c || !c->feasible) {
        ++il;
        continue;
      }
      std::size_t end = il;
      while (end < grid.lambda_axis.size() && grid.cell(end, im) && grid.cell(end, im)->feasible) ++end;
      const double x = px(grid.lambda_axis[il]) - cell / 2;
      const double y = py(grid.mu_axis[im]) - cell / 2;
      out << "<rect x=\"" << fixed(x, 2) << "\" y=\"" << fixed(y, 2) << "\" width=\""
          << fixed(cell * static_cast<double>(end - il), 2) << "\" height=\"" << fixed(cell, 2)
          << "\"/>\n";
      il = end;
    }
  }
  out << "</g>\n";

  for (const BoundaryCurve& c : grid.curves) {
    if (c.points.size() < 2) continue;
    out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\""
        << (c.family == CurveFamily::shifted_cdf ? "red" : "blue") << "\" points=\"";
    for (const auto& [lam, mu] : c.points) out << fixed(px(lam), 2) << ',' << fixed(py(mu), 2) << ' ';
    out << "\"/>\n";
  }

  const double d1 = std::min(l1, m1);
  const double d0 = std::max(l0, m0);
  out << "<line x1=\"" << fixed(px(d0), 2) << "\" y1=\"" << fixed(py(d0), 2) << "\" x2=\""
      << fixed(px(d1), 2) << "\" y2=\"" << fixed(py(d1), 2)
      << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";

  // Axes with integer ticks.
  out << "<g stroke=\"black\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<line x1=\"" << fixed(px(l0), 2) << "\" y1=\"" << fixed(py(m0), 2) << "\" x2=\""
      << fixed(px(l1), 2) << "\" y2=\"" << fixed(py(m0), 2) << "\"/>\n";
  out << "<line x1=\"" << fixed(px(l0), 2) << "\" y1=\"" << fixed(py(m0), 2) << "\" x2=\""
      << fixed(px(l0), 2) << "\" y2=\"" << fixed(py(m1), 2) << "\"/>\n";
  for (double t = std::ceil(l0); t <= l1 + 1e-9; t += 1.0) {
    out << "<line x1=\"" << fixed(px(t), 2) << "\" y1=\"" << fixed(py(m0), 2) << "\" x2=\""
        << fixed(px(t), 2) << "\" y2=\"" << fixed(py(m0) + 5, 2) << "\"/>\n"
        << "<text stroke=\"none\" text-anchor=\"middle\" x=\"" << fixed(px(t), 2) << "\" y=\""
        << fixed(py(m0) + 18, 2) << "\">" << fixed(t, 0) << "</text>\n";
  }
  for (double t = std::ceil(m0); t <= m1 + 1e-9; t += 1.0) {
    out << "<line x1=\"" << fixed(px(l0) - 5, 2) << "\" y1=\"" << fixed(py(t), 2) << "\" x2=\""
        << fixed(px(l0), 2) << "\" y2=\"" << fixed(py(t), 2) << "\"/>\n"
        << "<text stroke=\"none\" text-anchor=\"end\" x=\"" << fixed(px(l0) - 8, 2) << "\" y=\""
        << fixed(py(t) + 4, 2) << "\">" << fixed(t, 0) << "</text>\n";
  }
  out << "<text stroke=\"none\" x=\"" << fixed(px(l1) + 10, 2) << "\" y=\"" << fixed(py(m0) + 4, 2)
      << "\">&#955;</text>\n<text stroke=\"none\" x=\"" << fixed(px(l0) - 4, 2) << "\" y=\""
      << fixed(py(m1) - 10, 2) << "\">&#956;</text>\n</g>\n</svg>\n";
}

}  // namespace detthin
