#include "tsqa/svgplot.hpp"

#include "tsqa/synth.hpp"
#include "tsqa/util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tsqa::plot {

namespace {

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

std::string render_record_svg(const datasets::Record& record) {
    const double width = 920.0, height = 320.0;
    const double margin_l = 60.0, margin_r = 20.0, margin_t = 20.0, margin_b = 30.0;
    const double plot_w = width - margin_l - margin_r;
    const double plot_h = height - margin_t - margin_b;

    double vmin = 1e300, vmax = -1e300;
    std::size_t max_len = 1;
    std::vector<std::vector<double>> raw;
    for (const auto& e : record.series) {
        synth::NormalizedSeries n{e.name, e.values, e.value_scaling, e.value_offset};
        raw.push_back(synth::denormalize(n).values);
        for (double v : raw.back()) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
        max_len = std::max(max_len, raw.back().size());
    }
    if (raw.empty() || vmax <= vmin) {
        vmin = 0.0;
        vmax = 1.0;
    }
    double pad = 0.05 * (vmax - vmin);
    vmin -= pad;
    vmax += pad;

    auto x_of = [&](std::size_t t, std::size_t len) {
        return margin_l + plot_w * static_cast<double>(t) / static_cast<double>(std::max<std::size_t>(len - 1, 1));
    };
    auto y_of = [&](double v) { return margin_t + plot_h * (1.0 - (v - vmin) / (vmax - vmin)); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";

    // Shaded fluctuation windows, from pool truth.
    for (std::size_t si = 0; si < record.series.size(); ++si) {
        const auto& pool = record.series[si].pool;
        for (const auto& f : pool.fluctuations) {
            double x0 = x_of(f.position, pool.length);
            double x1 = x_of(std::min(f.end(), pool.length - 1), pool.length);
            if (x1 - x0 < 2.0) x1 = x0 + 2.0;
            svg << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(margin_t) << "\" width=\""
                << fmt(x1 - x0) << "\" height=\"" << fmt(plot_h)
                << "\" fill=\"#fdd\" fill-opacity=\"0.5\">"
                << "<title>" << taxonomy::id(f.kind) << " @ " << f.position << "</title></rect>\n";
        }
    }

    // Axes.
    svg << "<line x1=\"" << fmt(margin_l) << "\" y1=\"" << fmt(margin_t + plot_h) << "\" x2=\""
        << fmt(margin_l + plot_w) << "\" y2=\"" << fmt(margin_t + plot_h)
        << "\" stroke=\"#333\"/>\n";
    svg << "<line x1=\"" << fmt(margin_l) << "\" y1=\"" << fmt(margin_t) << "\" x2=\""
        << fmt(margin_l) << "\" y2=\"" << fmt(margin_t + plot_h) << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << fmt(margin_l - 6) << "\" y=\"" << fmt(y_of(vmax - pad))
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_sig4(vmax - pad) << "</text>\n";
    svg << "<text x=\"" << fmt(margin_l - 6) << "\" y=\"" << fmt(y_of(vmin + pad))
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_sig4(vmin + pad) << "</text>\n";

    // One polyline per series.
    for (std::size_t si = 0; si < raw.size(); ++si) {
        const auto& values = raw[si];
        svg << "<polyline fill=\"none\" stroke=\"" << kSeriesColors[si % 8]
            << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t t = 0; t < values.size(); ++t) {
            if (t) svg << " ";
            svg << fmt(x_of(t, values.size())) << "," << fmt(y_of(values[t]));
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << fmt(margin_l + 8) << "\" y=\"" << fmt(margin_t + 14 + 14.0 * si)
            << "\" font-size=\"12\" fill=\"" << kSeriesColors[si % 8] << "\">"
            << record.series[si].name << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string write_record_plot(const datasets::Record& record, const std::string& out_dir) {
    std::string svg_path = out_dir + "/" + record.qa.id + ".svg";
    std::ofstream svg(svg_path, std::ios::binary);
    if (!svg) throw std::runtime_error("cannot write " + svg_path);
    svg << render_record_svg(record);

    for (const auto& e : record.series) {
        synth::NormalizedSeries n{e.name, e.values, e.value_scaling, e.value_offset};
        synth::TimeSeries raw = synth::denormalize(n);
        synth::write_csv(raw, out_dir + "/" + record.qa.id + "-" + e.name + ".csv");
    }
    return svg_path;
}

} // namespace tsqa::plot
