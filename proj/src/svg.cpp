#include "qae3d/svg.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qae3d {

namespace {

constexpr int kWidth = 900;
constexpr int kHeight = 420;
constexpr int kMargin = 50;

struct Series {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;  // (step, value)
};

std::string polyline(const Series& s, double x0, double x1, double y0, double y1) {
    std::ostringstream out;
    out.precision(6);
    out << "  <polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    const double xr = x1 > x0 ? x1 - x0 : 1.0;
    const double yr = y1 > y0 ? y1 - y0 : 1.0;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        const double px =
            kMargin + (s.points[i].first - x0) / xr * (kWidth - 2 * kMargin);
        const double py =
            kHeight - kMargin - (s.points[i].second - y0) / yr * (kHeight - 2 * kMargin);
        if (i) out << " ";
        out << px << "," << py;
    }
    out << "\"/>\n";
    return out.str();
}

}  // namespace

std::string render_training_svg(const TrainLog& log) {
    if (log.steps.empty() && log.evals.empty())
        throw std::invalid_argument("empty training log");

    std::vector<Series> series;
    Series loss{"loss", "#1f77b4", {}};
    for (const TrainRecord& r : log.steps)
        loss.points.push_back({static_cast<double>(r.step), r.loss});
    if (!loss.points.empty()) series.push_back(std::move(loss));
    Series train_cm{"train cm", "#2ca02c", {}};
    Series test_cm{"test cm", "#d62728", {}};
    for (const EvalRecord& e : log.evals)
        (e.split == "train" ? train_cm : test_cm)
            .points.push_back({static_cast<double>(e.step), e.metric_cm});
    if (!train_cm.points.empty()) series.push_back(std::move(train_cm));
    if (!test_cm.points.empty()) series.push_back(std::move(test_cm));

    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const Series& s : series)
        for (const auto& [x, y] : s.points) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }

    std::ostringstream out;
    out.precision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
        << "\">\n";
    out << "  <rect width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    out << "  <line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
        << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
        << "\" stroke=\"black\"/>\n";
    out << "  <line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
        << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
        << "\" font-size=\"12\" text-anchor=\"middle\">step (" << x0 << " .. " << x1
        << ")</text>\n";
    out << "  <text x=\"14\" y=\"" << kHeight / 2
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << kHeight / 2 << ")\">value (" << y0 << " .. " << y1 << ")</text>\n";
    int legend_y = kMargin;
    for (const Series& s : series) {
        out << polyline(s, x0, x1, y0, y1);
        out << "  <text x=\"" << kWidth - kMargin - 80 << "\" y=\"" << legend_y
            << "\" font-size=\"12\" fill=\"" << s.color << "\">" << s.label
            << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
    return out.str();
}

void write_training_svg(const TrainLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write SVG: " + path);
    out << render_training_svg(log);
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace qae3d
