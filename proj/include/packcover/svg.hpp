#pragma once

#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "packcover/geom.hpp"

namespace packcover {

struct RenderOptions {
    double lambda = 1.0;             // enlargement factor when outlines are on
    bool enlarged_outlines = false;  // dashed outline of each lambda-enlargement
    std::vector<Triangle> scaffolding;
    std::vector<ConvexPolygon> polygons;
};

namespace detail {

inline void svg_num(std::string& out, double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    out += buf;
}

inline void svg_ellipse(std::string& out, const Ellipse& e, const char* style) {
    // SVG y grows downward; render mirrored so the plane's y grows upward.
    out += "<ellipse cx=\"";
    svg_num(out, e.center().x);
    out += "\" cy=\"";
    svg_num(out, -e.center().y);
    out += "\" rx=\"";
    svg_num(out, e.semi_major());
    out += "\" ry=\"";
    svg_num(out, e.semi_minor());
    out += "\" transform=\"rotate(";
    svg_num(out, -e.angle() * 180.0 / kPi);
    out += " ";
    svg_num(out, e.center().x);
    out += " ";
    svg_num(out, -e.center().y);
    out += ")\" ";
    out += style;
    out += "/>\n";
}

inline void svg_path(std::string& out, std::span<const Point2> pts, const char* style) {
    out += "<path d=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out += i == 0 ? "M " : "L ";
        svg_num(out, pts[i].x);
        out += " ";
        svg_num(out, -pts[i].y);
        out += " ";
    }
    out += "Z\" ";
    out += style;
    out += "/>\n";
}

}  // namespace detail

/// Deterministic standalone SVG for a set of ellipses, with optional
/// lambda-enlargement outlines and triangle/polygon scaffolding.
inline std::string render_svg(std::span<const Ellipse> ellipses, const RenderOptions& opt = {}) {
    Box2 view{{0.0, 0.0}, {1.0, 1.0}};
    bool seen = false;
    const auto grow = [&](Point2 p) {
        if (!seen) {
            view = {p, p};
            seen = true;
            return;
        }
        view.lo.x = std::min(view.lo.x, p.x);
        view.lo.y = std::min(view.lo.y, p.y);
        view.hi.x = std::max(view.hi.x, p.x);
        view.hi.y = std::max(view.hi.y, p.y);
    };
    for (const Ellipse& e : ellipses) {
        const Box2 b = bounding_box(opt.enlarged_outlines ? enlarge(e, opt.lambda) : e);
        grow(b.lo);
        grow(b.hi);
    }
    for (const Triangle& t : opt.scaffolding)
        for (const Point2& p : t.vertices()) grow(p);
    for (const ConvexPolygon& q : opt.polygons)
        for (const Point2& p : q.vertices()) grow(p);

    const double w = view.hi.x - view.lo.x, h = view.hi.y - view.lo.y;
    const double pad = 0.03 * std::max({w, h, 1e-9});
    const double stroke = 0.0015 * std::max({w, h, 1e-9});

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"";
    detail::svg_num(out, view.lo.x - pad);
    out += " ";
    detail::svg_num(out, -(view.hi.y + pad));
    out += " ";
    detail::svg_num(out, w + 2 * pad);
    out += " ";
    detail::svg_num(out, h + 2 * pad);
    out += "\">\n";

    std::string style;
    style = "fill=\"none\" stroke=\"#546e7a\" stroke-width=\"";
    detail::svg_num(style, stroke);
    style += "\"";
    for (const Triangle& t : opt.scaffolding) {
        const auto vs = t.vertices();
        detail::svg_path(out, vs, style.c_str());
    }

    style = "fill=\"none\" stroke=\"#263238\" stroke-width=\"";
    detail::svg_num(style, stroke);
    style += "\"";
    for (const ConvexPolygon& q : opt.polygons)
        detail::svg_path(out, std::span<const Point2>{q.vertices()}, style.c_str());

    for (const Ellipse& e : ellipses)
        detail::svg_ellipse(out, e, "fill=\"#74a8dc\" fill-opacity=\"0.85\" stroke=\"none\"");

    if (opt.enlarged_outlines) {
        style = "fill=\"none\" stroke=\"#c0392b\" stroke-dasharray=\"";
        detail::svg_num(style, 4 * stroke);
        style += "\" stroke-width=\"";
        detail::svg_num(style, 0.6 * stroke);
        style += "\"";
        for (const Ellipse& e : ellipses) detail::svg_ellipse(out, enlarge(e, opt.lambda), style.c_str());
    }

    out += "</svg>\n";
    return out;
}

}  // namespace packcover
