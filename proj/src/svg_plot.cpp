#include "geoadapt/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>

#include "geoadapt/errors.hpp"

namespace geoadapt::plot {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 400;
constexpr int kMarginLeft = 60;
constexpr int kMarginBottom = 48;
constexpr int kMarginTop = 40;
constexpr int kMarginRight = 20;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

void append(std::string& out, const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    out += buf;
}

std::string header(const std::string& title) {
    std::string out;
    append(out,
           "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
           "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
           kWidth, kHeight, kWidth, kHeight);
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    append(out,
           "<text x=\"%d\" y=\"24\" font-family=\"sans-serif\" "
           "font-size=\"16\" text-anchor=\"middle\">%s</text>\n",
           kWidth / 2, title.c_str());
    return out;
}

}  // namespace

std::string histogram_svg(const std::vector<std::size_t>& bins,
                          const std::string& title) {
    if (bins.empty()) throw ValidationError("histogram needs at least one bin");
    std::string out = header(title);
    const std::size_t max_count =
        std::max<std::size_t>(1, *std::max_element(bins.begin(), bins.end()));
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const double bar_w = plot_w / static_cast<double>(bins.size());

    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double h =
            plot_h * static_cast<double>(bins[i]) / static_cast<double>(max_count);
        const double x = kMarginLeft + bar_w * static_cast<double>(i);
        const double y = kMarginTop + (plot_h - h);
        append(out,
               "<rect x=\"%s\" y=\"%s\" width=\"%s\" height=\"%s\" "
               "fill=\"#4878b0\" stroke=\"white\"/>\n",
               num(x).c_str(), num(y).c_str(), num(bar_w).c_str(),
               num(h).c_str());
        append(out,
               "<text x=\"%s\" y=\"%d\" font-family=\"sans-serif\" "
               "font-size=\"11\" text-anchor=\"middle\">%s</text>\n",
               num(x + bar_w / 2).c_str(), kHeight - kMarginBottom + 16,
               num(static_cast<double>(i) / static_cast<double>(bins.size()))
                   .c_str());
        append(out,
               "<text x=\"%s\" y=\"%s\" font-family=\"sans-serif\" "
               "font-size=\"11\" text-anchor=\"middle\">%zu</text>\n",
               num(x + bar_w / 2).c_str(), num(y - 4).c_str(), bins[i]);
    }
    append(out,
           "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
           kMarginLeft, kHeight - kMarginBottom, kWidth - kMarginRight,
           kHeight - kMarginBottom);
    out += "</svg>\n";
    return out;
}

std::string reward_surface_svg(const rewards::RewardParams& params) {
    rewards::validate(params);
    std::string out = header("hierarchical geo reward vs distance");
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const double d_max = 5.0 * params.sigma_km;

    struct Tier {
        const char* color;
        const char* label;
        double base;
        double scale;
    };
    const Tier tiers[3] = {
        {"#2ca02c", "country+city match", params.lambda1, params.lambda2},
        {"#ff7f0e", "country only", 0.0, params.lambda1},
        {"#d62728", "country mismatch", 0.0, 0.0},
    };

    for (const auto& tier : tiers) {
        std::string points;
        for (int i = 0; i <= 100; ++i) {
            const double d = d_max * static_cast<double>(i) / 100.0;
            const double r =
                tier.base + tier.scale * rewards::coord_reward(d, params.sigma_km);
            const double x = kMarginLeft + plot_w * d / d_max;
            const double y = kMarginTop + plot_h * (1.0 - r);
            if (!points.empty()) points += ' ';
            points += num(x) + "," + num(y);
        }
        append(out,
               "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"2\" "
               "points=\"%s\"/>\n",
               tier.color, points.c_str());
    }
    int ly = kMarginTop + 12;
    for (const auto& tier : tiers) {
        append(out,
               "<rect x=\"%d\" y=\"%d\" width=\"12\" height=\"12\" "
               "fill=\"%s\"/>\n",
               kWidth - 220, ly - 10, tier.color);
        append(out,
               "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" "
               "font-size=\"12\">%s</text>\n",
               kWidth - 202, ly, tier.label);
        ly += 18;
    }
    append(out,
           "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
           kMarginLeft, kHeight - kMarginBottom, kWidth - kMarginRight,
           kHeight - kMarginBottom);
    append(out,
           "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" "
           "font-size=\"12\" text-anchor=\"middle\">distance (km), 0 to "
           "%s</text>\n",
           kWidth / 2, kHeight - 12, num(d_max).c_str());
    out += "</svg>\n";
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open output file: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace geoadapt::plot
