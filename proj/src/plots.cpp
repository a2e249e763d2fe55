#include "uavrl/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace uavrl {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 480;
constexpr double kLeft = 60;
constexpr double kRight = 620;
constexpr double kTop = 20;
constexpr double kBottom = 440;
constexpr int kSmoothingWindow = 5;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr int kPaletteSize = 8;

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    static Range of(const std::vector<double>& values) {
        Range r{values.front(), values.front()};
        for (double v : values) r.include(v);
        if (r.lo == r.hi) {  // degenerate span: pad so the point sits mid-axis
            r.lo -= 1.0;
            r.hi += 1.0;
        }
        return r;
    }
    double map(double v, double out_lo, double out_hi) const {
        return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
    }
};

std::vector<double> moving_average(const std::vector<double>& y, int window) {
    std::vector<double> smoothed(y.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sum += y[i];
        if (i >= static_cast<std::size_t>(window)) sum -= y[i - window];
        const std::size_t n = std::min<std::size_t>(i + 1, window);
        smoothed[i] = sum / static_cast<double>(n);
    }
    return smoothed;
}

class SvgCanvas {
public:
    SvgCanvas(const std::string& description, const std::string& x_label,
              const std::string& y_label) {
        body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
              << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
        body_ << "  <desc>" << description << "</desc>\n";
        body_ << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
              << "\" fill=\"white\"/>\n";
        body_ << "  <line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
              << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
        body_ << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
              << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
        body_ << "  <text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 8
              << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label << "</text>\n";
        body_ << "  <text x=\"14\" y=\"" << (kTop + kBottom) / 2
              << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
              << (kTop + kBottom) / 2 << ")\">" << y_label << "</text>\n";
    }

    void axis_ticks(const Range& x, const Range& y) {
        body_ << "  <text x=\"" << kLeft << "\" y=\"" << kBottom + 16
              << "\" font-size=\"11\" text-anchor=\"middle\">" << format_double(x.lo)
              << "</text>\n";
        body_ << "  <text x=\"" << kRight << "\" y=\"" << kBottom + 16
              << "\" font-size=\"11\" text-anchor=\"middle\">" << format_double(x.hi)
              << "</text>\n";
        body_ << "  <text x=\"" << kLeft - 6 << "\" y=\"" << kBottom + 4
              << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(y.lo)
              << "</text>\n";
        body_ << "  <text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 4
              << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(y.hi)
              << "</text>\n";
    }

    void polyline(const std::vector<double>& px, const std::vector<double>& py, const Range& x,
                  const Range& y, const char* color) {
        body_ << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
              << " points=\"";
        for (std::size_t i = 0; i < px.size(); ++i) {
            if (i > 0) body_ << ' ';
            body_ << format_double(x.map(px[i], kLeft, kRight)) << ','
                  << format_double(y.map(py[i], kBottom, kTop));
        }
        body_ << "\"/>\n";
    }

    void scatter(const std::vector<double>& px, const std::vector<double>& py, const Range& x,
                 const Range& y, const char* color) {
        for (std::size_t i = 0; i < px.size(); ++i)
            body_ << "  <circle cx=\"" << format_double(x.map(px[i], kLeft, kRight)) << "\" cy=\""
                  << format_double(y.map(py[i], kBottom, kTop)) << "\" r=\"4\" fill=\"" << color
                  << "\"/>\n";
    }

    void legend_entry(int slot, const std::string& label, const char* color) {
        const double ty = kTop + 14 + 16 * slot;
        body_ << "  <text x=\"" << kRight - 4 << "\" y=\"" << ty
              << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << color << "\">" << label
              << "</text>\n";
    }

    void warning(const std::string& message) {
        body_ << "  <text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << (kTop + kBottom) / 2
              << "\" font-size=\"16\" text-anchor=\"middle\" fill=\"#d62728\">" << message
              << "</text>\n";
    }

    void save(const std::filesystem::path& path) {
        body_ << "</svg>\n";
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw std::runtime_error("plots: cannot open for writing: " + path.string());
        out << body_.str();
        if (!out) throw std::runtime_error("plots: write failed: " + path.string());
    }

private:
    std::ostringstream body_;
};

}  // namespace

std::vector<std::filesystem::path> emit_plots(const std::vector<std::filesystem::path>& csv_paths,
                                              const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;

    for (const auto& csv_path : csv_paths) {
        const auto records = read_metrics_csv(csv_path);
        const std::filesystem::path out = out_dir / (csv_path.stem().string() + ".svg");

        if (records.empty()) {
            SvgCanvas svg("uavrl empty plot; no data rows in " + csv_path.filename().string(),
                          "index", "value");
            svg.warning("warning: no data rows");
            svg.save(out);
            written.push_back(out);
            continue;
        }

        const std::string& phase = records.front().phase;
        if (phase == "sweep") {
            std::vector<double> xs, ys;
            for (const auto& r : records) {
                xs.push_back(r.mean_aoi);
                ys.push_back(r.mean_power_w);
            }
            const Range x = Range::of(xs), y = Range::of(ys);
            SvgCanvas svg("uavrl lambda-sweep scatter; x: mean_aoi, y: mean_power_w; no smoothing",
                          "mean AoI", "mean power (W)");
            svg.axis_ticks(x, y);
            svg.scatter(xs, ys, x, y, kPalette[0]);
            svg.save(out);
        } else if (phase == "adapt") {
            // One polyline per run_id, in first-appearance order.
            std::vector<std::string> order;
            std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> series;
            for (const auto& r : records) {
                auto [it, inserted] = series.try_emplace(r.run_id);
                if (inserted) order.push_back(r.run_id);
                it->second.first.push_back(static_cast<double>(r.index));
                it->second.second.push_back(r.reward);
            }
            std::vector<double> all_x, all_y;
            for (const auto& [_, s] : series) {
                all_x.insert(all_x.end(), s.first.begin(), s.first.end());
                all_y.insert(all_y.end(), s.second.begin(), s.second.end());
            }
            const Range x = Range::of(all_x), y = Range::of(all_y);
            SvgCanvas svg(
                "uavrl adaptation curves; y: reward; smoothing: trailing moving average, window " +
                    std::to_string(kSmoothingWindow),
                "fine-tuning episode", "greedy reward");
            svg.axis_ticks(x, y);
            for (std::size_t i = 0; i < order.size(); ++i) {
                const auto& s = series[order[i]];
                const char* color = kPalette[i % kPaletteSize];
                svg.polyline(s.first, moving_average(s.second, kSmoothingWindow), x, y, color);
                if (i < 12) svg.legend_entry(static_cast<int>(i), order[i], color);
            }
            svg.save(out);
        } else {
            // Learning curve: meta-loss when every row carries one, else reward.
            const bool use_meta_loss =
                std::all_of(records.begin(), records.end(),
                            [](const MetricsRecord& r) { return r.meta_loss.has_value(); });
            std::vector<double> xs, ys;
            for (const auto& r : records) {
                xs.push_back(static_cast<double>(r.index));
                ys.push_back(use_meta_loss ? *r.meta_loss : r.reward);
            }
            const Range x = Range::of(xs), y = Range::of(ys);
            const std::string field = use_meta_loss ? "meta_loss" : "reward";
            SvgCanvas svg("uavrl learning curve; y: " + field +
                              "; smoothing: trailing moving average, window " +
                              std::to_string(kSmoothingWindow),
                          "index", field);
            svg.axis_ticks(x, y);
            svg.polyline(xs, moving_average(ys, kSmoothingWindow), x, y, kPalette[0]);
            svg.save(out);
        }
        written.push_back(out);
    }
    return written;
}

}  // namespace uavrl
