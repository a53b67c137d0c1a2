#include "mirviz/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mirviz/error.hpp"

namespace mirviz {

namespace {

constexpr const char* kSvgHeader = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";

std::string svg_open(int width, int height) {
    std::ostringstream out;
    out << kSvgHeader << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    return out.str();
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::uint8_t to_byte(double v) { return std::uint8_t(std::lround(std::clamp(v, 0.0, 255.0))); }

}  // namespace

Rgb Image::at(int x, int y) const {
    const std::size_t i = (std::size_t(y) * std::size_t(width) + std::size_t(x)) * 3;
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void Image::set(int x, int y, const Rgb& c) {
    const std::size_t i = (std::size_t(y) * std::size_t(width) + std::size_t(x)) * 3;
    pixels[i] = c[0];
    pixels[i + 1] = c[1];
    pixels[i + 2] = c[2];
}

std::vector<std::uint8_t> encode_ppm(const Image& image) {
    const std::string header = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), image.pixels.begin(), image.pixels.end());
    return out;
}

void write_ppm(const std::string& path, const Image& image) {
    const auto bytes = encode_ppm(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

ColorMap::ColorMap(std::vector<Rgb> anchors) : anchors_(std::move(anchors)) {
    if (anchors_.size() < 2) throw Error(Errc::InvalidArgument, "color map needs at least 2 anchors");
}

ColorMap ColorMap::grayscale() { return ColorMap({Rgb{0, 0, 0}, Rgb{255, 255, 255}}); }

ColorMap ColorMap::heat() { return ColorMap({Rgb{0, 0, 0}, Rgb{255, 0, 0}, Rgb{255, 255, 0}}); }

ColorMap ColorMap::by_name(const std::string& name) {
    if (name == "gray" || name == "grayscale") return grayscale();
    if (name == "heat") return heat();
    throw Error(Errc::InvalidArgument, "unknown colormap '" + name + "'");
}

Rgb ColorMap::operator()(double v) const {
    const double x = std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0) * double(anchors_.size() - 1);
    const std::size_t i = std::min(std::size_t(x), anchors_.size() - 2);
    const double t = x - double(i);
    const Rgb& a = anchors_[i];
    const Rgb& b = anchors_[i + 1];
    Rgb out;
    for (int c = 0; c < 3; ++c) out[std::size_t(c)] = to_byte(a[std::size_t(c)] + t * (b[std::size_t(c)] - a[std::size_t(c)]));
    return out;
}

Image render_heatmap(const Eigen::MatrixXd& matrix, const ColorMap& cmap, bool invert) {
    if (!matrix.allFinite()) throw Error(Errc::NonFinite);
    if (matrix.size() == 0) throw Error(Errc::InvalidArgument, "empty matrix");
    const double lo = matrix.minCoeff(), hi = matrix.maxCoeff();
    const double range = hi - lo;
    Image img(int(matrix.cols()), int(matrix.rows()));
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
        const int y = int(matrix.rows() - 1 - r);
        for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
            double v = range > 0 ? (matrix(r, c) - lo) / range : 0.0;
            if (invert) v = 1.0 - v;
            img.set(int(c), y, cmap(v));
        }
    }
    return img;
}

Image render_color_strip(const Eigen::MatrixXd& points, int column_width, int height) {
    if (points.cols() != 3) throw Error(Errc::WrongDimensionality, std::to_string(points.cols()) + " dimensions");
    if (points.rows() == 0) throw Error(Errc::EmptyEmbedding);
    if (column_width < 1 || height < 1) throw Error(Errc::InvalidArgument, "strip dimensions must be positive");
    if (!points.allFinite()) throw Error(Errc::NonFinite);

    const Eigen::RowVector3d lo = points.colwise().minCoeff();
    const Eigen::RowVector3d hi = points.colwise().maxCoeff();
    Image img(int(points.rows()) * column_width, height);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        Rgb color;
        for (int d = 0; d < 3; ++d) {
            const double range = hi[d] - lo[d];
            color[std::size_t(d)] = range > 0 ? to_byte((points(i, d) - lo[d]) / range * 255.0) : 0;
        }
        for (int x = int(i) * column_width; x < int(i + 1) * column_width; ++x)
            for (int y = 0; y < height; ++y) img.set(x, y, color);
    }
    return img;
}

std::string svg_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    std::string s = buf;
    if (s == "-0") s = "0";
    return s;
}

std::string render_trajectory(const Eigen::MatrixXd& points, int label_stride) {
    if (points.rows() == 0) throw Error(Errc::EmptyEmbedding);
    if (points.cols() != 3) throw Error(Errc::WrongDimensionality, std::to_string(points.cols()) + " dimensions");
    if (label_stride < 0) throw Error(Errc::InvalidArgument, "label stride must be >= 0");
    if (!points.allFinite()) throw Error(Errc::NonFinite);

    constexpr int width = 640, height = 480;
    constexpr double margin = 0.05;
    const double cos30 = std::cos(std::numbers::pi / 6), sin30 = std::sin(std::numbers::pi / 6);
    Eigen::MatrixX2d flat(points.rows(), 2);
    flat.col(0) = points.col(0) - points.col(2) * cos30;
    flat.col(1) = points.col(1) - points.col(2) * sin30;

    const Eigen::RowVector2d lo = flat.colwise().minCoeff(), hi = flat.colwise().maxCoeff();
    const Eigen::RowVector2d span = (hi - lo).cwiseMax(1e-12);
    const Eigen::RowVector2d mid = 0.5 * (lo + hi);
    const double scale = std::min(width * (1 - 2 * margin) / span[0], height * (1 - 2 * margin) / span[1]);
    auto sx = [&](Eigen::Index i) { return svg_number(width / 2.0 + (flat(i, 0) - mid[0]) * scale); };
    auto sy = [&](Eigen::Index i) { return svg_number(height / 2.0 - (flat(i, 1) - mid[1]) * scale); };

    std::ostringstream out;
    out << svg_open(width, height);
    out << "<g class=\"trajectory\" stroke=\"#1f3b73\" stroke-width=\"1\" fill=\"none\">\n";
    for (Eigen::Index i = 1; i < points.rows(); ++i)
        out << "<line x1=\"" << sx(i - 1) << "\" y1=\"" << sy(i - 1) << "\" x2=\"" << sx(i) << "\" y2=\"" << sy(i)
            << "\"/>\n";
    out << "</g>\n<g class=\"points\" fill=\"#c0392b\">\n";
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        out << "<circle cx=\"" << sx(i) << "\" cy=\"" << sy(i) << "\" r=\"2\"/>\n";
    out << "</g>\n";
    if (label_stride > 0) {
        out << "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"10\" fill=\"black\">\n";
        for (Eigen::Index i = 0; i < points.rows(); i += label_stride)
            out << "<text x=\"" << sx(i) << "\" y=\"" << sy(i) << "\" dx=\"3\" dy=\"-3\">" << i << "</text>\n";
        out << "</g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

double nice_tick_step(double top, int max_ticks) {
    if (!(top > 0)) return 1.0 / max_ticks;
    const double raw = top / max_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw * (1 - 1e-12)) return m * mag;
    return 10.0 * mag;
}

std::string render_bar_chart(const std::vector<std::string>& labels, const std::vector<double>& heights) {
    if (labels.size() != heights.size())
        throw Error(Errc::LengthMismatch, std::to_string(labels.size()) + " labels, " + std::to_string(heights.size()) + " heights");
    if (heights.empty()) throw Error(Errc::EmptyInput, "no bars");
    for (double h : heights) {
        if (!std::isfinite(h)) throw Error(Errc::NonFinite);
        if (h < 0) throw Error(Errc::NegativeHeight);
    }

    constexpr int width = 640, height = 400;
    constexpr double left = 60, right = 20, top_margin = 20, bottom = 40;
    const double plot_w = width - left - right, plot_h = height - top_margin - bottom;
    const double base_y = top_margin + plot_h;

    const double max_h = *std::max_element(heights.begin(), heights.end());
    const double step = nice_tick_step(max_h > 0 ? max_h : 1.0);
    const long n_ticks = std::max(1L, long(std::ceil((max_h > 0 ? max_h : 1.0) / step - 1e-9)));
    const double axis_top = double(n_ticks) * step;

    std::ostringstream out;
    out << svg_open(width, height);
    out << "<g class=\"axis\" stroke=\"black\" stroke-width=\"1\">\n";
    out << "<line x1=\"" << svg_number(left) << "\" y1=\"" << svg_number(top_margin) << "\" x2=\"" << svg_number(left)
        << "\" y2=\"" << svg_number(base_y) << "\"/>\n";
    out << "<line x1=\"" << svg_number(left) << "\" y1=\"" << svg_number(base_y) << "\" x2=\"" << svg_number(left + plot_w)
        << "\" y2=\"" << svg_number(base_y) << "\"/>\n";
    for (long t = 0; t <= n_ticks; ++t) {
        const double y = base_y - double(t) / double(n_ticks) * plot_h;
        out << "<line x1=\"" << svg_number(left - 5) << "\" y1=\"" << svg_number(y) << "\" x2=\"" << svg_number(left)
            << "\" y2=\"" << svg_number(y) << "\"/>\n";
    }
    out << "</g>\n<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">\n";
    for (long t = 0; t <= n_ticks; ++t) {
        const double y = base_y - double(t) / double(n_ticks) * plot_h;
        out << "<text x=\"" << svg_number(left - 8) << "\" y=\"" << svg_number(y + 3) << "\">"
            << svg_number(double(t) * step) << "</text>\n";
    }
    out << "</g>\n<g class=\"bars\" fill=\"#4c72b0\">\n";
    const double slot = plot_w / double(heights.size());
    for (std::size_t i = 0; i < heights.size(); ++i) {
        const double h = heights[i] / axis_top * plot_h;
        out << "<rect x=\"" << svg_number(left + slot * (double(i) + 0.1)) << "\" y=\"" << svg_number(base_y - h)
            << "\" width=\"" << svg_number(slot * 0.8) << "\" height=\"" << svg_number(h) << "\"/>\n";
    }
    out << "</g>\n<g class=\"labels\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">\n";
    for (std::size_t i = 0; i < labels.size(); ++i)
        out << "<text x=\"" << svg_number(left + slot * (double(i) + 0.5)) << "\" y=\"" << svg_number(base_y + 15)
            << "\">" << xml_escape(labels[i]) << "</text>\n";
    out << "</g>\n</svg>\n";
    return out.str();
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double h = double(sorted.size() - 1) * q;
    const auto lo = std::size_t(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - double(lo)) * (sorted[lo + 1] - sorted[lo]);
}

BoxplotStats boxplot_stats(std::vector<double> values) {
    if (values.empty()) throw Error(Errc::EmptyInput, "no values");
    for (double v : values)
        if (!std::isfinite(v)) throw Error(Errc::NonFinite);
    std::sort(values.begin(), values.end());

    BoxplotStats s;
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile_sorted(values, 0.25);
    s.median = quantile_sorted(values, 0.5);
    s.q3 = quantile_sorted(values, 0.75);
    const double iqr = s.q3 - s.q1;
    const double low_fence = s.q1 - 1.5 * iqr, high_fence = s.q3 + 1.5 * iqr;
    s.whisker_low = s.max;
    s.whisker_high = s.min;
    for (double v : values) {
        if (v < low_fence || v > high_fence) {
            s.outliers.push_back(v);
            continue;
        }
        s.whisker_low = std::min(s.whisker_low, v);
        s.whisker_high = std::max(s.whisker_high, v);
    }
    return s;
}

std::string render_boxplots(const std::vector<std::pair<std::string, BoxplotStats>>& groups) {
    if (groups.empty()) throw Error(Errc::EmptyInput, "no groups");

    constexpr int width = 640, height = 400;
    constexpr double left = 60, right = 20, top_margin = 20, bottom = 40;
    const double plot_w = width - left - right, plot_h = height - top_margin - bottom;

    double lo = groups.front().second.min, hi = groups.front().second.max;
    for (const auto& [label, s] : groups) {
        lo = std::min(lo, s.min);
        hi = std::max(hi, s.max);
    }
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto y_of = [&](double v) { return svg_number(top_margin + (hi - v) / (hi - lo) * plot_h); };

    std::ostringstream out;
    out << svg_open(width, height);
    out << "<g class=\"axis\" stroke=\"black\" stroke-width=\"1\">\n";
    out << "<line x1=\"" << svg_number(left) << "\" y1=\"" << svg_number(top_margin) << "\" x2=\"" << svg_number(left)
        << "\" y2=\"" << svg_number(top_margin + plot_h) << "\"/>\n</g>\n";
    out << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">\n";
    const double step = nice_tick_step(hi - lo);
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * std::abs(hi); t += step)
        out << "<text x=\"" << svg_number(left - 8) << "\" y=\"" << y_of(t) << "\">" << svg_number(t) << "</text>\n";
    out << "</g>\n";

    const double slot = plot_w / double(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& [label, s] = groups[g];
        const double cx = left + slot * (double(g) + 0.5);
        const double half = slot * 0.25;
        const std::string x0 = svg_number(cx - half), x1 = svg_number(cx + half), xc = svg_number(cx);
        out << "<g class=\"box\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
        out << "<rect x=\"" << x0 << "\" y=\"" << y_of(s.q3) << "\" width=\"" << svg_number(2 * half)
            << "\" height=\"" << svg_number((s.q3 - s.q1) / (hi - lo) * plot_h) << "\" fill=\"#dde6f3\"/>\n";
        out << "<line class=\"median\" x1=\"" << x0 << "\" y1=\"" << y_of(s.median) << "\" x2=\"" << x1 << "\" y2=\""
            << y_of(s.median) << "\" stroke-width=\"2\"/>\n";
        out << "<line x1=\"" << xc << "\" y1=\"" << y_of(s.q3) << "\" x2=\"" << xc << "\" y2=\"" << y_of(s.whisker_high)
            << "\"/>\n";
        out << "<line x1=\"" << xc << "\" y1=\"" << y_of(s.q1) << "\" x2=\"" << xc << "\" y2=\"" << y_of(s.whisker_low)
            << "\"/>\n";
        for (double w : {s.whisker_low, s.whisker_high})
            out << "<line x1=\"" << svg_number(cx - half / 2) << "\" y1=\"" << y_of(w) << "\" x2=\""
                << svg_number(cx + half / 2) << "\" y2=\"" << y_of(w) << "\"/>\n";
        for (double o : s.outliers)
            out << "<circle class=\"outlier\" cx=\"" << xc << "\" cy=\"" << y_of(o) << "\" r=\"3\"/>\n";
        out << "</g>\n";
        out << "<text x=\"" << xc << "\" y=\"" << svg_number(top_margin + plot_h + 15)
            << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << xml_escape(label)
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

PolarLayout polar_layout(const ValidityReport& report, double tol) {
    const Eigen::Index n = report.angles.rows();
    if (n > 12) throw Error(Errc::TooManyVariables, std::to_string(n) + " variables");
    PolarLayout layout;
    double acc = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i > 0) acc += report.angles(i - 1, i);
        layout.positions.push_back(acc);
    }
    const double two_pi = 2 * std::numbers::pi;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double sep = std::fmod(std::abs(layout.positions[std::size_t(j)] - layout.positions[std::size_t(i)]), two_pi);
            sep = std::min(sep, two_pi - sep);
            const double required = report.angles(i, j);
            layout.chords.push_back({i, j, required, sep, std::abs(sep - required) > tol});
        }
    return layout;
}

std::string render_polar_correlation(const ValidityReport& report) {
    const PolarLayout layout = polar_layout(report);
    constexpr int size = 400;
    constexpr double c = size / 2.0, radius = 150;
    auto px = [&](double a, double r) { return svg_number(c + r * std::cos(a)); };
    auto py = [&](double a, double r) { return svg_number(c - r * std::sin(a)); };

    std::ostringstream out;
    out << svg_open(size, size);
    out << "<circle cx=\"" << svg_number(c) << "\" cy=\"" << svg_number(c) << "\" r=\"" << svg_number(radius)
        << "\" stroke=\"#888888\" fill=\"none\"/>\n";
    out << "<g class=\"spokes\" stroke=\"black\" stroke-width=\"1\">\n";
    for (double a : layout.positions)
        out << "<line x1=\"" << svg_number(c) << "\" y1=\"" << svg_number(c) << "\" x2=\"" << px(a, radius)
            << "\" y2=\"" << py(a, radius) << "\"/>\n";
    out << "</g>\n<g class=\"chords\" font-family=\"sans-serif\" font-size=\"10\">\n";
    for (const auto& ch : layout.chords) {
        const double a = layout.positions[std::size_t(ch.i)], b = layout.positions[std::size_t(ch.j)];
        out << "<line class=\"" << (ch.invalid ? "invalid" : "valid") << "\" x1=\"" << px(a, radius) << "\" y1=\""
            << py(a, radius) << "\" x2=\"" << px(b, radius) << "\" y2=\"" << py(b, radius) << "\" stroke=\""
            << (ch.invalid ? "#d62728\" stroke-dasharray=\"4,3" : "#2ca02c") << "\"/>\n";
        const double mid = 0.5 * (a + b);
        out << "<text x=\"" << px(mid, radius * 0.6) << "\" y=\"" << py(mid, radius * 0.6) << "\">" << ch.i << "-"
            << ch.j << ": " << svg_number(ch.required) << "</text>\n";
    }
    out << "</g>\n<g class=\"variables\" font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t i = 0; i < layout.positions.size(); ++i)
        out << "<text x=\"" << px(layout.positions[i], radius + 12) << "\" y=\"" << py(layout.positions[i], radius + 12)
            << "\">" << i << "</text>\n";
    out << "</g>\n</svg>\n";
    return out.str();
}

}  // namespace mirviz
