#include "dmc/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string_view>

#include "dmc/error.hpp"

namespace dmc {

namespace {

// Fixed canvas and plot rectangle shared by every figure.
constexpr double kW = 800.0, kH = 600.0;
constexpr double kX0 = 70.0, kX1 = 775.0; // plot left/right
constexpr double kY0 = 45.0, kY1 = 545.0; // plot top/bottom

constexpr const char* kClusterColor[5] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b"};
constexpr const char* kSeriesColor[5] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b"};

std::string fmt(double v, int precision = 2) {
    v += 0.0; // -0.0 -> 0.0
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
    return std::string(buf, p);
}

std::string fmt_g(double v) {
    v += 0.0;
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
    return std::string(buf, p);
}

std::string esc(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

//! Affine data->pixel map over a padded range; p0 maps lo, p1 maps hi.
struct Scale {
    double lo, hi, p0, p1;
    double operator()(double v) const { return p0 + (v - lo) / (hi - lo) * (p1 - p0); }
};

Scale make_scale(double lo, double hi, double p0, double p1, double pad_frac = 0.05) {
    if (lo > hi) std::swap(lo, hi);
    const double span = hi - lo;
    if (span == 0.0) {
        const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.5;
        lo -= pad;
        hi += pad;
    } else {
        lo -= span * pad_frac;
        hi += span * pad_frac;
    }
    return {lo, hi, p0, p1};
}

std::vector<double> nice_ticks(double lo, double hi) {
    const double range = hi - lo;
    const double mag = std::pow(10.0, std::floor(std::log10(range / 5.0)));
    double step = mag * 10.0;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (range / (mag * m) <= 7.0) {
            step = mag * m;
            break;
        }
    }
    std::vector<double> ticks;
    for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step)
        ticks.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
    return ticks;
}

void text(std::string& s, double x, double y, const std::string& body, int size = 12,
          const char* anchor = "start", const char* fill = "#111111",
          const char* extra = "") {
    s += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-family=\"monospace\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + anchor + "\" fill=\"" + fill + "\"" + extra +
         ">" + esc(body) + "</text>\n";
}

void line(std::string& s, double x1, double y1, double x2, double y2, const char* stroke,
          double width = 1.0, const char* dash = nullptr) {
    s += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" +
         fmt(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width, 1) + "\"";
    if (dash) s += std::string(" stroke-dasharray=\"") + dash + "\"";
    s += "/>\n";
}

std::string head() {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n<rect width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
}

void border(std::string& s) {
    s += "<rect x=\"" + fmt(kX0) + "\" y=\"" + fmt(kY0) + "\" width=\"" + fmt(kX1 - kX0) +
         "\" height=\"" + fmt(kY1 - kY0) + "\" fill=\"none\" stroke=\"#444444\"/>\n";
}

void x_ticks(std::string& s, const Scale& xs) {
    for (double v : nice_ticks(xs.lo, xs.hi)) {
        const double px = xs(v);
        line(s, px, kY0, px, kY1, "#dddddd", 0.6);
        line(s, px, kY1, px, kY1 + 5, "#444444");
        text(s, px, kY1 + 18, fmt_g(v), 11, "middle");
    }
}

void y_ticks(std::string& s, const Scale& ys) {
    for (double v : nice_ticks(std::min(ys.lo, ys.hi), std::max(ys.lo, ys.hi))) {
        const double py = ys(v);
        line(s, kX0, py, kX1, py, "#dddddd", 0.6);
        line(s, kX0 - 5, py, kX0, py, "#444444");
        text(s, kX0 - 8, py + 4, fmt_g(v), 11, "end");
    }
}

void titles(std::string& s, const std::string& title, const std::string& xlabel,
            const std::string& ylabel) {
    text(s, kW / 2, 26, title, 16, "middle");
    text(s, (kX0 + kX1) / 2, kH - 14, xlabel, 12, "middle");
    text(s, 20, (kY0 + kY1) / 2, ylabel, 12, "middle", "#111111",
         (" transform=\"rotate(-90 20 " + fmt((kY0 + kY1) / 2) + ")\"").c_str());
}

//! Symbol per cluster id: cross, circle, square, triangle, diamond.
void marker(std::string& s, int label, double x, double y, const char* color) {
    const double r = 4.5;
    switch (((label % 5) + 5) % 5) {
    case 0:
        s += "<path d=\"M" + fmt(x - r) + " " + fmt(y - r) + " L" + fmt(x + r) + " " + fmt(y + r) +
             " M" + fmt(x - r) + " " + fmt(y + r) + " L" + fmt(x + r) + " " + fmt(y - r) +
             "\" stroke=\"" + color + "\" stroke-width=\"1.6\" fill=\"none\"/>\n";
        break;
    case 1:
        s += "<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"" + fmt(r - 0.5) +
             "\" stroke=\"" + color + "\" stroke-width=\"1.6\" fill=\"none\"/>\n";
        break;
    case 2:
        s += "<rect x=\"" + fmt(x - r + 0.5) + "\" y=\"" + fmt(y - r + 0.5) + "\" width=\"" +
             fmt(2 * r - 1) + "\" height=\"" + fmt(2 * r - 1) + "\" stroke=\"" + color +
             "\" stroke-width=\"1.6\" fill=\"none\"/>\n";
        break;
    case 3:
        s += "<path d=\"M" + fmt(x) + " " + fmt(y - r) + " L" + fmt(x + r) + " " + fmt(y + r) +
             " L" + fmt(x - r) + " " + fmt(y + r) + " Z\" stroke=\"" + color +
             "\" stroke-width=\"1.6\" fill=\"none\"/>\n";
        break;
    default:
        s += "<path d=\"M" + fmt(x) + " " + fmt(y - r) + " L" + fmt(x + r) + " " + fmt(y) + " L" +
             fmt(x) + " " + fmt(y + r) + " L" + fmt(x - r) + " " + fmt(y) + " Z\" stroke=\"" +
             color + "\" stroke-width=\"1.6\" fill=\"none\"/>\n";
        break;
    }
}

const char* hex_digits = "0123456789abcdef";

std::string ramp_color(double v) {
    v = std::clamp(v, 0.0, 1.0);
    // white (255,255,255) -> dark blue (8,48,107)
    const int rgb[3] = {static_cast<int>(std::lround(255.0 + (8.0 - 255.0) * v)),
                        static_cast<int>(std::lround(255.0 + (48.0 - 255.0) * v)),
                        static_cast<int>(std::lround(255.0 + (107.0 - 255.0) * v))};
    std::string c = "#";
    for (int ch : rgb) {
        c += hex_digits[(ch >> 4) & 0xf];
        c += hex_digits[ch & 0xf];
    }
    return c;
}

} // namespace

std::string svg_embedding(const Matrix& coords, std::span<const int> labels) {
    const std::size_t n = coords.rows();
    if (n == 0 || coords.cols() == 0)
        throw validation_error("svg_embedding: empty embedding");
    if (labels.size() != n)
        throw validation_error("svg_embedding: " + std::to_string(labels.size()) +
                               " labels for " + std::to_string(n) + " samples");

    std::vector<double> xv(n), yv(n);
    for (std::size_t i = 0; i < n; ++i) {
        xv[i] = coords(i, 0);
        yv[i] = coords.cols() >= 2 ? coords(i, 1) : 0.0;
    }
    // Force the x range to include 0 so the threshold line is always visible.
    const auto [xmin_it, xmax_it] = std::minmax_element(xv.begin(), xv.end());
    const auto [ymin_it, ymax_it] = std::minmax_element(yv.begin(), yv.end());
    const Scale xs = make_scale(std::min(*xmin_it, 0.0), std::max(*xmax_it, 0.0), kX0, kX1);
    const Scale ys = make_scale(*ymin_it, *ymax_it, kY1, kY0);

    std::string s = head();
    x_ticks(s, xs);
    y_ticks(s, ys);
    border(s);
    titles(s, "diffusion embedding", "diffusion coordinate 1", "diffusion coordinate 2");

    line(s, xs(0.0), kY0, xs(0.0), kY1, "#555555", 1.2, "5 4");
    text(s, xs(0.0) + 5, kY0 + 14, "threshold 0", 11, "start", "#555555");

    for (std::size_t i = 0; i < n; ++i) {
        const double px = xs(xv[i]), py = ys(yv[i]);
        marker(s, labels[i], px, py, kClusterColor[((labels[i] % 5) + 5) % 5]);
        text(s, px + 6, py - 6, std::to_string(i), 10, "start", "#333333");
    }
    s += "</svg>\n";
    return s;
}

std::string svg_epsilon_scan(const EpsilonScan& scan) {
    const std::size_t m = scan.grid.size();
    if (m < 2 || scan.weight_sums.size() != m)
        throw validation_error("svg_epsilon_scan: empty or inconsistent scan");
    if (scan.n < 2) throw validation_error("svg_epsilon_scan: scan lacks a sample count");

    std::vector<double> lx(m), ly(m);
    for (std::size_t i = 0; i < m; ++i) {
        lx[i] = std::log10(scan.grid[i]);
        ly[i] = std::log10(scan.weight_sums[i]);
    }
    const double log_n = std::log10(static_cast<double>(scan.n));
    const double log_n2 = 2.0 * log_n;
    const Scale xs = make_scale(lx.front(), lx.back(), kX0, kX1);
    const Scale ys = make_scale(std::min(ly.front(), log_n), std::max(ly.back(), log_n2), kY1, kY0);

    std::string s = head();
    x_ticks(s, xs);
    y_ticks(s, ys);
    border(s);
    titles(s, "weight sum vs bandwidth", "log10(epsilon)", "log10(L)");

    line(s, kX0, ys(log_n), kX1, ys(log_n), "#999999", 1.0, "3 3");
    text(s, kX1 - 6, ys(log_n) - 5, "L = n", 11, "end", "#777777");
    line(s, kX0, ys(log_n2), kX1, ys(log_n2), "#999999", 1.0, "3 3");
    text(s, kX1 - 6, ys(log_n2) - 5, "L = n^2", 11, "end", "#777777");

    if (scan.selected) {
        const double px = xs(std::log10(*scan.selected));
        line(s, px, kY0, px, kY1, "#d62728", 1.2, "5 4");
        text(s, px + 5, kY0 + 14, "epsilon = " + fmt_g(*scan.selected), 11, "start", "#d62728");
    }

    std::string path = "M";
    for (std::size_t i = 0; i < m; ++i) {
        if (i) path += " L";
        path += fmt(xs(lx[i])) + " " + fmt(ys(ly[i]));
    }
    s += "<path d=\"" + path + "\" stroke=\"#1f77b4\" stroke-width=\"1.6\" fill=\"none\"/>\n";
    for (std::size_t i = 0; i < m; ++i)
        s += "<circle cx=\"" + fmt(xs(lx[i])) + "\" cy=\"" + fmt(ys(ly[i])) +
             "\" r=\"2\" fill=\"#1f77b4\"/>\n";
    s += "</svg>\n";
    return s;
}

std::string svg_dendrogram(const Dendrogram& tree, Linkage linkage) {
    const std::size_t n = tree.n_leaves;
    if (n < 2 || tree.merges.size() != n - 1)
        throw validation_error("svg_dendrogram: tree is empty or incomplete");

    const std::size_t total = 2 * n - 1;
    std::vector<std::pair<std::size_t, std::size_t>> child(total, {0, 0});
    for (const auto& mg : tree.merges) child[mg.id] = {mg.left, mg.right};

    // Leaf order by depth-first traversal, left child first: no crossing links.
    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<std::size_t> stack{tree.merges.back().id};
    while (!stack.empty()) {
        const std::size_t node = stack.back();
        stack.pop_back();
        if (node < n) {
            order.push_back(node);
        } else {
            stack.push_back(child[node].second);
            stack.push_back(child[node].first);
        }
    }

    std::vector<double> xpos(total, 0.0), ypos(total, 0.0);
    for (std::size_t slot = 0; slot < n; ++slot) xpos[order[slot]] = static_cast<double>(slot);
    double max_h = 0.0;
    for (const auto& mg : tree.merges) {
        xpos[mg.id] = 0.5 * (xpos[mg.left] + xpos[mg.right]);
        ypos[mg.id] = mg.height;
        max_h = std::max(max_h, mg.height);
    }
    if (max_h == 0.0) max_h = 1.0;

    const Scale xs{-0.8, static_cast<double>(n - 1) + 0.8, kX0, kX1};
    const Scale ys{0.0, max_h * 1.06, kY1, kY0};

    std::string s = head();
    y_ticks(s, ys);
    border(s);
    titles(s, "agglomerative dendrogram (" + to_string(linkage) + " linkage)", "sample",
           "merge distance");

    for (const auto& mg : tree.merges) {
        const double pl = xs(xpos[mg.left]), pr = xs(xpos[mg.right]);
        const double py = ys(mg.height);
        s += "<path d=\"M" + fmt(pl) + " " + fmt(ys(ypos[mg.left])) + " L" + fmt(pl) + " " +
             fmt(py) + " L" + fmt(pr) + " " + fmt(py) + " L" + fmt(pr) + " " +
             fmt(ys(ypos[mg.right])) + "\" stroke=\"#1f77b4\" stroke-width=\"1.4\" fill=\"none\"/>\n";
    }
    for (std::size_t slot = 0; slot < n; ++slot)
        text(s, xs(static_cast<double>(slot)), kY1 + 16, std::to_string(order[slot]), 10, "middle");
    s += "</svg>\n";
    return s;
}

std::string svg_correlation(std::span<const CorrelationPanel> panels) {
    if (panels.empty()) throw validation_error("svg_correlation: no panels");
    for (const auto& p : panels)
        if (p.values.order() == 0)
            throw validation_error("svg_correlation: empty panel '" + p.title + "'");

    const std::size_t count = panels.size();
    const std::size_t ncols = std::min<std::size_t>(count, 3);
    const std::size_t nrows = (count + ncols - 1) / ncols;

    const double region_x = 50.0, region_y = 70.0, region_w = 730.0, region_h = 440.0;
    const double gap = 34.0;
    const double cell_w = (region_w - gap * (ncols - 1)) / ncols;
    const double cell_h = (region_h - gap * (nrows - 1)) / nrows - 18.0; // room for panel title
    const double side = std::min(cell_w, cell_h);

    std::string s = head();
    text(s, kW / 2, 26, "absolute correlations", 16, "middle");

    for (std::size_t pidx = 0; pidx < count; ++pidx) {
        const auto& panel = panels[pidx];
        const std::size_t row = pidx / ncols, col = pidx % ncols;
        const double px0 = region_x + col * (cell_w + gap) + (cell_w - side) / 2;
        const double py0 = region_y + row * (cell_h + 18.0 + gap) + 18.0;
        const std::size_t n = panel.values.order();
        const double cell = side / static_cast<double>(n);

        text(s, px0 + side / 2, py0 - 6, panel.title, 12, "middle");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                s += "<rect x=\"" + fmt(px0 + j * cell) + "\" y=\"" + fmt(py0 + i * cell) +
                     "\" width=\"" + fmt(cell + 0.05) + "\" height=\"" + fmt(cell + 0.05) +
                     "\" fill=\"" + ramp_color(panel.values(i, j)) + "\"/>\n";
        s += "<rect x=\"" + fmt(px0) + "\" y=\"" + fmt(py0) + "\" width=\"" + fmt(side) +
             "\" height=\"" + fmt(side) + "\" fill=\"none\" stroke=\"#444444\"/>\n";

        const std::size_t stride = (n + 7) / 8;
        for (std::size_t i = 0; i < n; i += stride) {
            text(s, px0 - 4, py0 + (i + 0.5) * cell + 3, std::to_string(i), 8, "end", "#555555");
            text(s, px0 + (i + 0.5) * cell, py0 + side + 10, std::to_string(i), 8, "middle",
                 "#555555");
        }
    }

    // Shared color ramp legend.
    const double lx0 = kW / 2 - 128.0, ly0 = 560.0;
    for (int i = 0; i < 64; ++i)
        s += "<rect x=\"" + fmt(lx0 + i * 4.0) + "\" y=\"" + fmt(ly0) +
             "\" width=\"4.05\" height=\"12\" fill=\"" + ramp_color(i / 63.0) + "\"/>\n";
    s += "<rect x=\"" + fmt(lx0) + "\" y=\"" + fmt(ly0) +
         "\" width=\"256\" height=\"12\" fill=\"none\" stroke=\"#444444\"/>\n";
    text(s, lx0 - 8, ly0 + 10, "0", 11, "end");
    text(s, lx0 + 264, ly0 + 10, "1", 11, "start");
    s += "</svg>\n";
    return s;
}

std::string svg_comparison(std::span<const ComparisonSeries> series, std::span<const int> labels) {
    if (series.empty()) throw validation_error("svg_comparison: no series");
    const std::size_t n = labels.size();
    if (n == 0) throw validation_error("svg_comparison: no samples");
    for (const auto& sr : series) {
        if (sr.coords.rows() != n)
            throw validation_error("svg_comparison: series '" + sr.name + "' has " +
                                   std::to_string(sr.coords.rows()) + " rows, expected " +
                                   std::to_string(n));
        if (sr.coords.cols() == 0)
            throw validation_error("svg_comparison: series '" + sr.name + "' has no columns");
    }

    const Scale xs{-1.1, 1.1, kX0, kX1};
    const Scale ys{-1.1, 1.1, kY1, kY0};

    std::string s = head();
    x_ticks(s, xs);
    y_ticks(s, ys);
    border(s);
    titles(s, "embedding comparison (per-axis max-abs scaled)", "coordinate 1 (scaled)",
           "coordinate 2 (scaled)");
    line(s, xs(0.0), kY0, xs(0.0), kY1, "#bbbbbb", 0.8, "5 4");
    line(s, kX0, ys(0.0), kX1, ys(0.0), "#bbbbbb", 0.8, "5 4");

    for (std::size_t sidx = 0; sidx < series.size(); ++sidx) {
        const auto& sr = series[sidx];
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mx = std::max(mx, std::abs(sr.coords(i, 0)));
            if (sr.coords.cols() >= 2) my = std::max(my, std::abs(sr.coords(i, 1)));
        }
        const char* color = kSeriesColor[sidx % 5];
        for (std::size_t i = 0; i < n; ++i) {
            const double vx = mx > 0.0 ? sr.coords(i, 0) / mx : 0.0;
            const double vy = sr.coords.cols() >= 2 && my > 0.0 ? sr.coords(i, 1) / my : 0.0;
            marker(s, labels[i], xs(vx), ys(vy), color);
        }
    }

    for (std::size_t sidx = 0; sidx < series.size(); ++sidx) {
        const double ly = kY0 + 16 + 18.0 * sidx;
        line(s, kX1 - 150, ly - 4, kX1 - 130, ly - 4, kSeriesColor[sidx % 5], 3.0);
        text(s, kX1 - 124, ly, series[sidx].name, 11);
    }
    s += "</svg>\n";
    return s;
}

} // namespace dmc
