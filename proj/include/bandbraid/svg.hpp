#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "bandbraid/errors.hpp"
#include "bandbraid/pipeline.hpp"

namespace bandbraid {

enum class SvgView { Disk, Braid };

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Base disk: locus A, projected double points, triple coincidences and the oriented loop.
inline std::string render_disk(const RunReport& r) {
  if (!r.loop || !r.locus) throw MissingData("disk view needs a built loop and a sampled locus");
  const auto& loop = *r.loop;
  double extent = 1.3 * loop.rho;
  for (const auto& dp : r.double_points) extent = std::max(extent, 1.25 * std::abs(dp.image.z1));
  const double size = 800.0;
  const double scale = size / (2.0 * extent);
  auto X = [&](cplx z) { return fmt(size / 2 + scale * z.real()); };
  auto Y = [&](cplx z) { return fmt(size / 2 - scale * z.imag()); };
  auto inside = [&](cplx z) { return std::abs(z.real()) <= extent && std::abs(z.imag()) <= extent; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  os << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"5\" refY=\"5\" markerWidth=\"6\" "
        "markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#1f5fbf\"/></marker></defs>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g class=\"locus\" stroke=\"#999\" stroke-width=\"1\" fill=\"none\">\n";
  for (const auto& pl : r.locus->polylines) {
    std::string d;
    bool pen = false;
    for (cplx z : pl.points) {
      if (!inside(z)) {
        pen = false;
        continue;
      }
      d += (pen ? " L" : " M") + X(z) + ',' + Y(z);
      pen = true;
    }
    if (!d.empty()) os << "<path d=\"" << d << "\"/>\n";
  }
  os << "</g>\n";

  os << "<g class=\"loop\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" fill=\"none\">\n";
  for (const auto& s : loop.segments) {
    const int pieces = s.is_arc ? std::max(8, static_cast<int>(std::abs(s.sweep) / 0.02)) : 1;
    std::string d = "M" + X(s.point(0)) + ',' + Y(s.point(0));
    for (int i = 1; i <= pieces; ++i) {
      const cplx z = s.point(static_cast<double>(i) / pieces);
      d += " L" + X(z) + ',' + Y(z);
    }
    os << "<path d=\"" << d << "\"/>\n";
    const cplx a = s.point(0.45), b = s.point(0.55);
    os << "<path class=\"arrow\" d=\"M" << X(a) << ',' << Y(a) << " L" << X(b) << ',' << Y(b)
       << "\" marker-end=\"url(#arrow)\"/>\n";
  }
  os << "</g>\n";
  for (const auto& d : loop.detours)
    os << "<circle class=\"detour\" cx=\"" << X(d.center) << "\" cy=\"" << Y(d.center) << "\" r=\""
       << fmt(std::max(2.0, scale * d.radius)) << "\" fill=\"none\" stroke=\"#1f5fbf\" stroke-dasharray=\"2,2\"/>\n";
  for (const auto& dp : r.double_points)
    os << "<circle class=\"double-point\" cx=\"" << X(dp.image.z1) << "\" cy=\"" << Y(dp.image.z1)
       << "\" r=\"4\" fill=\"" << (dp.sign > 0 ? "#c0392b" : "#27ae60") << "\"/>\n";
  for (const auto& t : r.triples) {
    if (!inside(t.image_z)) continue;
    const double x = size / 2 + scale * t.image_z.real(), y = size / 2 - scale * t.image_z.imag();
    os << "<path class=\"triple\" d=\"M" << fmt(x - 4) << ',' << fmt(y - 4) << " L" << fmt(x + 4) << ','
       << fmt(y + 4) << " M" << fmt(x - 4) << ',' << fmt(y + 4) << " L" << fmt(x + 4) << ',' << fmt(y - 4)
       << "\" stroke=\"#8e44ad\" stroke-width=\"2\"/>\n";
  }
  os << "<circle class=\"branch-point\" cx=\"" << X({}) << "\" cy=\"" << Y({}) << "\" r=\"3\" fill=\"black\"/>\n";
  os << "<circle class=\"base-point\" cx=\"" << X(loop.base_point) << "\" cy=\"" << Y(loop.base_point)
     << "\" r=\"3\" fill=\"#1f5fbf\"/>\n";
  os << "</svg>\n";
  return os.str();
}

/// Braid diagram of the cyclically reduced word: strands left to right, one row per letter.
inline std::string render_braid(const RunReport& r) {
  if (!r.traced) throw MissingData("braid view needs a traced braid");
  const BraidWord w = canonical_cyclic_form(r.traced->word);
  const int n = w.strand_count();
  const double dx = 40, dy = 40, margin = 30;
  const double width = 2 * margin + dx * (n - 1);
  const double height = 2 * margin + dy * static_cast<double>(std::max<std::size_t>(1, w.size()));
  auto x = [&](int pos) { return margin + dx * pos; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width) << "\" height=\""
     << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g stroke=\"black\" stroke-width=\"2\" fill=\"none\">\n";
  os << "<g class=\"strands\">\n";
  for (int p = 0; p < n; ++p)
    os << "<line class=\"strand-end\" x1=\"" << fmt(x(p)) << "\" y1=\"" << fmt(margin - 10) << "\" x2=\""
       << fmt(x(p)) << "\" y2=\"" << fmt(margin) << "\"/>\n";
  os << "</g>\n";
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double y0 = margin + dy * static_cast<double>(i), y1 = y0 + dy;
    const Letter l = w[i];
    os << "<g class=\"crossing\" data-generator=\"" << l.k << "\" data-sign=\"" << (l.exponent > 0 ? "+1" : "-1")
       << "\">\n";
    for (int p = 0; p < n; ++p)
      if (p != l.k - 1 && p != l.k)
        os << "<line x1=\"" << fmt(x(p)) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x(p)) << "\" y2=\""
           << fmt(y1) << "\"/>\n";
    // positive letter: the strand moving right passes over
    const double xl = x(l.k - 1), xr = x(l.k);
    const bool right_over = l.exponent > 0;
    const double mx = 0.5 * (xl + xr), my = 0.5 * (y0 + y1), gap = 6;
    auto under = [&](double xa, double xb) {
      const double ux = (xb - xa), uy = (y1 - y0), len = std::hypot(ux, uy);
      os << "<line x1=\"" << fmt(xa) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(mx - gap * ux / len) << "\" y2=\""
         << fmt(my - gap * uy / len) << "\"/>\n";
      os << "<line x1=\"" << fmt(mx + gap * ux / len) << "\" y1=\"" << fmt(my + gap * uy / len) << "\" x2=\""
         << fmt(xb) << "\" y2=\"" << fmt(y1) << "\"/>\n";
    };
    auto over = [&](double xa, double xb) {
      os << "<line x1=\"" << fmt(xa) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(xb) << "\" y2=\"" << fmt(y1)
         << "\"/>\n";
    };
    if (right_over) {
      under(xr, xl);
      over(xl, xr);
    } else {
      under(xl, xr);
      over(xr, xl);
    }
    os << "</g>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace detail

inline std::string render_svg(const RunReport& r, SvgView view) {
  return view == SvgView::Disk ? detail::render_disk(r) : detail::render_braid(r);
}

}  // namespace bandbraid
