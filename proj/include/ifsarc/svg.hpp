#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "ifs_path.hpp"

namespace ifsarc {

struct SvgOptions {
    double width = 800;          // pixels; the height follows the aspect ratio
    bool color_copies = false;   // one stroke colour per generation-1 copy
    bool junction_markers = false;
    std::string stroke = "#1f3a93";
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v == 0 ? 0.0 : v);  // no "-0"
    return buf;
}

inline const char* copy_color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};
    return palette[i % (sizeof palette / sizeof *palette)];
}

}  // namespace detail

/// Deterministic SVG of a planar curve. The view box is the curve's bounding box padded by 5% of its larger
/// side; y points up. A two-point curve is drawn as a single line element, anything longer as path elements.
inline std::string render_svg(const ApproxCurve& curve, const SvgOptions& opt = {}) {
    const Polyline& p = curve.polyline;
    if (p.dim != 2) throw DimensionError("SVG rendering needs a planar curve");
    if (p.size() < 2) throw InvalidInput("nothing to render");
    const Box b = bounds(p);
    const double w = b.hi[0] - b.lo[0], h = b.hi[1] - b.lo[1];
    const double pad = 0.05 * std::max({w, h, 1e-12});
    const double x0 = b.lo[0] - pad, y0 = -(b.hi[1] + pad), vw = w + 2 * pad, vh = h + 2 * pad;
    const double stroke = 0.002 * std::max(vw, vh);
    using detail::svg_num;
    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_num(opt.width) + "\" height=\"" + svg_num(opt.width * vh / vw) +
         "\" viewBox=\"" + svg_num(x0) + " " + svg_num(y0) + " " + svg_num(vw) + " " + svg_num(vh) + "\">\n";
    auto pt = [&](std::size_t i) { return svg_num(p.point(i)[0]) + "," + svg_num(-p.point(i)[1]); };
    const std::string style = "fill=\"none\" stroke-width=\"" + svg_num(stroke) + "\" stroke-linejoin=\"round\"";
    if (p.size() == 2) {
        s += "<line x1=\"" + svg_num(p.point(0)[0]) + "\" y1=\"" + svg_num(-p.point(0)[1]) + "\" x2=\"" + svg_num(p.point(1)[0]) + "\" y2=\"" +
             svg_num(-p.point(1)[1]) + "\" stroke=\"" + opt.stroke + "\" stroke-width=\"" + svg_num(stroke) + "\"/>\n";
    } else {
        const std::size_t copies = opt.color_copies && curve.maps > 0 ? curve.maps : 1;
        const std::size_t per = p.segments() / copies;
        for (std::size_t c = 0; c < copies; ++c) {
            const std::size_t first = c * per, last = c + 1 == copies ? p.segments() : (c + 1) * per;
            s += "<path d=\"M" + pt(first);
            for (std::size_t i = first + 1; i <= last; ++i) s += " L" + pt(i);
            s += "\" stroke=\"" + std::string(copies > 1 ? detail::copy_color(c) : opt.stroke.c_str()) + "\" " + style + "/>\n";
        }
    }
    if (opt.junction_markers && curve.maps > 1 && p.segments() % curve.maps == 0) {
        const std::size_t per = p.segments() / curve.maps;
        for (std::size_t c = 1; c < curve.maps; ++c)
            s += "<circle cx=\"" + svg_num(p.point(c * per)[0]) + "\" cy=\"" + svg_num(-p.point(c * per)[1]) + "\" r=\"" + svg_num(3 * stroke) +
                 "\" fill=\"#000000\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace ifsarc
