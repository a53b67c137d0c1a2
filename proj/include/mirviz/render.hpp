#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mirviz/reduce.hpp"
#include "mirviz/similarity.hpp"

namespace mirviz {

using Rgb = std::array<std::uint8_t, 3>;

/// Row-major RGB8 raster; row 0 is the top of the picture.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(int w, int h) : width(w), height(h), pixels(std::size_t(w) * std::size_t(h) * 3, 0) {}

    Rgb at(int x, int y) const;
    void set(int x, int y, const Rgb& c);
};

/// Binary PPM: "P6\n<w> <h>\n255\n" followed by raw RGB triples.
std::vector<std::uint8_t> encode_ppm(const Image& image);
void write_ppm(const std::string& path, const Image& image);

class ColorMap {
public:
    explicit ColorMap(std::vector<Rgb> anchors);
    static ColorMap grayscale();
    static ColorMap heat();  // black -> red -> yellow
    static ColorMap by_name(const std::string& name);

    /// Linear interpolation between neighbouring anchors; v is clamped to [0, 1].
    Rgb operator()(double v) const;
    const std::vector<Rgb>& anchors() const { return anchors_; }

private:
    std::vector<Rgb> anchors_;
};

/// One pixel per cell, min-max normalized (a constant matrix maps to 0).
/// Matrix row 0 lands on the bottom image row. invert maps v to 1 - v.
Image render_heatmap(const Eigen::MatrixXd& matrix, const ColorMap& cmap, bool invert = false);

/// Each dimension is min-max scaled to [0, 255]; point i fills columns
/// [i * column_width, (i + 1) * column_width) with (R, G, B) = dims (0, 1, 2).
Image render_color_strip(const Eigen::MatrixXd& points, int column_width, int height);

/// Fixed-precision number formatting used by all SVG output (6 significant digits).
std::string svg_number(double v);

/// Isometric 3D polyline in temporal order with every label_stride-th point
/// labeled by its index (0 disables labels).
std::string render_trajectory(const Eigen::MatrixXd& points, int label_stride);

std::string render_bar_chart(const std::vector<std::string>& labels, const std::vector<double>& heights);

/// Smallest 1-2-5 step giving at most `max_ticks` intervals over [0, top].
double nice_tick_step(double top, int max_ticks = 5);

struct BoxplotStats {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    double whisker_low = 0, whisker_high = 0;
    std::vector<double> outliers;  // ascending
};

/// Linear-interpolation quantile at position (n - 1) * q of the sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q);

BoxplotStats boxplot_stats(std::vector<double> values);

std::string render_boxplots(const std::vector<std::pair<std::string, BoxplotStats>>& groups);

/// Variables placed on the unit circle at cumulative angles sum_{j<i} theta_{j,j+1}.
struct PolarLayout {
    std::vector<double> positions;  // radians
    struct Chord {
        Eigen::Index i, j;
        double required;  // theta_ij
        double drawn;     // angular separation on the circle, in [0, pi]
        bool invalid;
    };
    std::vector<Chord> chords;
};

PolarLayout polar_layout(const ValidityReport& report, double tol = 1e-6);

std::string render_polar_correlation(const ValidityReport& report);

}  // namespace mirviz
