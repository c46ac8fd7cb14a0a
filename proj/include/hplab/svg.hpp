#ifndef HPLAB_SVG_HPP
#define HPLAB_SVG_HPP

// Square SVG scatter plots of root clouds.

#include "analysis.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace hplab
{

class ViewportError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct Annotation
{
    Point point;
    std::string label;
};

struct PlotSpec
{
    double re_min = -2.0;
    double re_max = 2.0;
    double im_min = -2.0;
    double im_max = 2.0;
    std::vector<int> families{0, 1, 2}; ///< families drawn, in this order
    double marker_radius = 2.0;
    int size = 600;
    std::string title;
    std::vector<Annotation> annotations;
    bool allow_empty = false;

    void validate() const
    {
        const bool finite = std::isfinite(re_min) && std::isfinite(re_max) && std::isfinite(im_min)
                            && std::isfinite(im_max);
        if (!finite || !(re_max > re_min) || !(im_max > im_min)) {
            throw ViewportError("plot: degenerate viewport");
        }
        if (size < 100 || !(marker_radius > 0.0)) {
            throw ViewportError("plot: bad size or marker radius");
        }
    }
};

/// family 0 blue, 1 red, 2 black (Padé: zeros blue, poles red).
inline const char *family_color(int family)
{
    switch (family) {
        case 0:
            return "#1f3fbf";
        case 1:
            return "#d01c1c";
        case 2:
            return "#000000";
        default:
            return "#808080";
    }
}

/// "{label}_{n}_{families}.svg", families written as digits in draw order.
inline std::string plot_filename(const std::string &label, int n, const std::vector<int> &families)
{
    std::string f;
    for (int k : families) {
        f += std::to_string(k);
    }
    return label + "_" + std::to_string(n) + "_" + f + ".svg";
}

namespace detail
{

inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf);
    return s == "-0.000" ? "0.000" : s;
}

inline std::string fmt_tick(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline std::string xml_escape(const std::string &s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

} // namespace detail

/// One cloud per entry; `family` of each cloud selects its colour.
struct PlotCloud
{
    int family = 0;
    std::vector<Point> points;
};

inline std::string scatter(const std::vector<PlotCloud> &clouds, const PlotSpec &spec)
{
    using detail::fmt;
    spec.validate();
    if (clouds.empty() && !spec.allow_empty) {
        throw std::invalid_argument("scatter: no clouds");
    }
    const double W = spec.size;
    const double m = 40.0;
    const double span = W - 2.0 * m;
    auto X = [&](double re) { return m + (re - spec.re_min) / (spec.re_max - spec.re_min) * span; };
    auto Y = [&](double im) { return m + (spec.im_max - im) / (spec.im_max - spec.im_min) * span; };
    auto inside = [&](const Point &p) {
        return p.real() >= spec.re_min && p.real() <= spec.re_max && p.imag() >= spec.im_min && p.imag() <= spec.im_max;
    };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" + fmt(W) + "\" viewBox=\"0 0 "
         + fmt(W) + " " + fmt(W) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + fmt(W) + "\" height=\"" + fmt(W) + "\" fill=\"#ffffff\"/>\n";
    if (!spec.title.empty()) {
        s += "<text x=\"" + fmt(W / 2) + "\" y=\"24.000\" font-family=\"sans-serif\" font-size=\"14\" "
             "text-anchor=\"middle\">" + detail::xml_escape(spec.title) + "</text>\n";
    }
    s += "<g class=\"axes\" stroke=\"#999999\" stroke-width=\"0.8\" fill=\"none\">\n";
    s += "<rect x=\"" + fmt(m) + "\" y=\"" + fmt(m) + "\" width=\"" + fmt(span) + "\" height=\"" + fmt(span) + "\"/>\n";
    if (spec.re_min < 0.0 && spec.re_max > 0.0) {
        s += "<line x1=\"" + fmt(X(0)) + "\" y1=\"" + fmt(m) + "\" x2=\"" + fmt(X(0)) + "\" y2=\"" + fmt(m + span) + "\"/>\n";
    }
    if (spec.im_min < 0.0 && spec.im_max > 0.0) {
        s += "<line x1=\"" + fmt(m) + "\" y1=\"" + fmt(Y(0)) + "\" x2=\"" + fmt(m + span) + "\" y2=\"" + fmt(Y(0)) + "\"/>\n";
    }
    s += "</g>\n";
    s += "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555555\">\n";
    s += "<text x=\"" + fmt(m) + "\" y=\"" + fmt(m + span + 16) + "\" text-anchor=\"start\">"
         + detail::fmt_tick(spec.re_min) + "</text>\n";
    s += "<text x=\"" + fmt(m + span) + "\" y=\"" + fmt(m + span + 16) + "\" text-anchor=\"end\">"
         + detail::fmt_tick(spec.re_max) + "</text>\n";
    s += "<text x=\"" + fmt(m - 4) + "\" y=\"" + fmt(m + span) + "\" text-anchor=\"end\">"
         + detail::fmt_tick(spec.im_min) + "</text>\n";
    s += "<text x=\"" + fmt(m - 4) + "\" y=\"" + fmt(m + 10) + "\" text-anchor=\"end\">"
         + detail::fmt_tick(spec.im_max) + "</text>\n";
    s += "</g>\n";

    for (int fam : spec.families) {
        for (const auto &c : clouds) {
            if (c.family != fam) {
                continue;
            }
            s += "<g class=\"family-" + std::to_string(fam) + "\" fill=\"" + family_color(fam) + "\">\n";
            for (const auto &p : c.points) {
                if (inside(p)) {
                    s += "<circle class=\"pt\" cx=\"" + fmt(X(p.real())) + "\" cy=\"" + fmt(Y(p.imag())) + "\" r=\""
                         + fmt(spec.marker_radius) + "\"/>\n";
                }
            }
            s += "</g>\n";
        }
    }

    if (!spec.annotations.empty()) {
        s += "<g class=\"annotations\" stroke=\"#228b22\" stroke-width=\"1.2\" font-family=\"sans-serif\" "
             "font-size=\"11\">\n";
        const double arm = 5.0;
        for (const auto &a : spec.annotations) {
            if (!inside(a.point)) {
                continue;
            }
            const double x = X(a.point.real());
            const double y = Y(a.point.imag());
            s += "<line x1=\"" + fmt(x - arm) + "\" y1=\"" + fmt(y - arm) + "\" x2=\"" + fmt(x + arm) + "\" y2=\""
                 + fmt(y + arm) + "\"/>\n";
            s += "<line x1=\"" + fmt(x - arm) + "\" y1=\"" + fmt(y + arm) + "\" x2=\"" + fmt(x + arm) + "\" y2=\""
                 + fmt(y - arm) + "\"/>\n";
            if (!a.label.empty()) {
                s += "<text x=\"" + fmt(x + arm + 2) + "\" y=\"" + fmt(y - arm) + "\" stroke=\"none\" fill=\"#228b22\">"
                     + detail::xml_escape(a.label) + "</text>\n";
            }
        }
        s += "</g>\n";
    }
    s += "</svg>\n";
    return s;
}

} // namespace hplab

#endif
