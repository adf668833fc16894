#include "sps/plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sps/errors.hpp"

namespace sps {
namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

const char* colors[] = {"#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400"};

}  // namespace

std::string svg_line_chart(const std::vector<Series>& series, const ChartOptions& o) {
    if (series.empty()) throw InvalidArgument("plot: no series");
    auto tx = [&](double x) { return o.log_x ? std::log10(x) : x; };
    auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!o.log_x || x > 0.0); };
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw InvalidArgument("plot: x and y lengths differ in '" + s.name + "'");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!(x0 <= x1)) throw InvalidArgument("plot: no finite points");
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    const double ml = 80, mr = 20, mt = 40, mb = 55;
    const double pw = o.width - ml - mr, ph = o.height - mt - mb;
    auto px = [&](double x) { return ml + (tx(x) - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return mt + (y1 - y) / (y1 - y0) * ph; };

    std::ostringstream os;
    os.precision(6);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << o.width << "\" height=\""
       << o.height << "\" viewBox=\"0 0 " << o.width << ' ' << o.height << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << o.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"15\">" << escape(o.title) << "</text>\n"
       << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
        const double gx = ml + pw * k / 4.0, gy = mt + ph - ph * k / 4.0;
        std::ostringstream lx, ly;
        lx.precision(4);
        ly.precision(4);
        lx << (o.log_x ? std::pow(10.0, fx) : fx);
        ly << fy;
        os << "<text x=\"" << gx << "\" y=\"" << mt + ph + 16 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           << "font-size=\"11\">" << lx.str() << "</text>\n"
           << "<text x=\"" << ml - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           << "font-size=\"11\">" << ly.str() << "</text>\n";
    }
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << o.height - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(o.x_label) << "</text>\n"
       << "<text x=\"16\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"13\" transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">" << escape(o.y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* col = colors[k % 5];
        os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (usable(s.x[i], s.y[i])) os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << ml + pw - 8 << "\" y=\"" << mt + 16 + 16 * k << "\" text-anchor=\"end\" "
           << "font-family=\"sans-serif\" font-size=\"12\" fill=\"" << col << "\">" << escape(s.name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace sps
