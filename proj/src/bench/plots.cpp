#include "eqf/bench/plots.hpp"

#include "eqf/bench/report.hpp"
#include "eqf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace eqf::bench::plots {

namespace {

constexpr double kWidth = 800, kHeight = 450;
constexpr double kLeft = 80, kRight = 150, kTop = 40, kBottom = 50;
const std::vector<std::string> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '"') out += "&quot;";
        else out += c;
    }
    return out;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

struct Frame {
    Range x, y;
    double px(double v) const { return kLeft + (v - x.lo) / (x.hi - x.lo) * (kWidth - kLeft - kRight); }
    double py(double v) const { return kHeight - kBottom - (v - y.lo) / (y.hi - y.lo) * (kHeight - kTop - kBottom); }
};

void open_svg(std::ostringstream& os, const std::string& title) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title) << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& f, const std::string& x_label, const std::string& y_label) {
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    os << "<g class=\"axes\" stroke=\"#333\" fill=\"none\">"
       << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\"/>"
       << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\"/></g>\n";
    for (int i = 0; i <= 4; ++i) {
        const double vy = f.y.lo + (f.y.hi - f.y.lo) * i / 4.0;
        const double vx = f.x.lo + (f.x.hi - f.x.lo) * i / 4.0;
        os << "<text x=\"" << x0 - 6 << "\" y=\"" << f.py(vy) + 4 << "\" text-anchor=\"end\">" << num(vy) << "</text>";
        os << "<text x=\"" << f.px(vx) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">" << num(vx) << "</text>\n";
    }
    os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">" << esc(x_label)
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << (y0 + y1) / 2 << ")\">" << esc(y_label) << "</text>\n";
    // Machine-readable extent, used by tests.
    os << "<desc>y-range " << num(f.y.lo) << ' ' << num(f.y.hi) << "</desc>\n";
}

void legend(std::ostringstream& os, std::size_t i, const std::string& label, const std::string& color) {
    const double y = kTop + 14.0 * static_cast<double>(i) + 6.0;
    const double x = kWidth - kRight + 10;
    os << "<rect x=\"" << x << "\" y=\"" << y - 8 << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>"
       << "<text x=\"" << x + 14 << "\" y=\"" << y << "\">" << esc(label) << "</text>\n";
}

Range widen(Range r) {
    if (r.hi == r.lo) {
        const double pad = r.lo == 0.0 ? 1.0 : std::abs(r.lo) * 0.05;
        return {r.lo - pad, r.hi + pad};
    }
    return r;
}

}  // namespace

Range padded_range(const std::vector<std::vector<double>>& series, double margin) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : series)
        for (double v : s)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    if (!std::isfinite(lo)) return {0.0, 1.0};
    const double span = hi - lo;
    return widen({lo - margin * span, hi + margin * span});
}

std::string line_chart(const std::string& title, const std::vector<Line>& lines, const std::string& y_label) {
    std::vector<std::vector<double>> ys;
    std::size_t n = 0;
    for (const auto& l : lines) {
        ys.push_back(l.y);
        n = std::max(n, l.y.size());
    }
    Frame f{widen({0.0, n > 1 ? static_cast<double>(n - 1) : 1.0}), padded_range(ys)};
    std::ostringstream os;
    open_svg(os, title);
    axes(os, f, "step", y_label);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const auto& l = lines[li];
        os << "<polyline fill=\"none\" stroke-width=\"1.3\" stroke=\"" << l.color << "\" points=\"";
        for (std::size_t i = 0; i < l.y.size(); ++i)
            if (std::isfinite(l.y[i])) os << num(f.px(static_cast<double>(i))) << ',' << num(f.py(l.y[i])) << ' ';
        os << "\"/>\n";
        legend(os, li, l.label, l.color);
    }
    os << "</svg>\n";
    return os.str();
}

std::string scatter_chart(const std::string& title, const std::vector<Points>& sets, const std::string& x_label,
                          const std::string& y_label) {
    std::vector<std::vector<double>> xs, ys;
    for (const auto& s : sets) {
        xs.push_back(s.x);
        ys.push_back(s.y);
    }
    Frame f{padded_range(xs), padded_range(ys)};
    std::ostringstream os;
    open_svg(os, title);
    axes(os, f, x_label, y_label);
    for (std::size_t si = 0; si < sets.size(); ++si) {
        const auto& s = sets[si];
        os << "<g fill=\"" << s.color << "\" fill-opacity=\"0.6\">";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
                os << "<circle cx=\"" << num(f.px(s.x[i])) << "\" cy=\"" << num(f.py(s.y[i])) << "\" r=\"2\"/>";
        os << "</g>\n";
        legend(os, si, s.label, s.color);
    }
    os << "</svg>\n";
    return os.str();
}

std::string histogram(const std::string& title, const std::vector<double>& x, std::size_t bins) {
    if (bins == 0) throw Error(Errc::InvalidParams, "histogram needs at least one bin");
    const Range xr = widen(padded_range({x}, 0.0));
    std::vector<double> counts(bins, 0.0);
    for (double v : x) {
        if (!std::isfinite(v)) continue;
        auto b = static_cast<std::size_t>((v - xr.lo) / (xr.hi - xr.lo) * static_cast<double>(bins));
        counts[std::min(b, bins - 1)] += 1.0;
    }
    Frame f{xr, {0.0, *std::max_element(counts.begin(), counts.end()) * 1.05 + 1e-12}};
    std::ostringstream os;
    open_svg(os, title);
    axes(os, f, "value", "count");
    const double w = (xr.hi - xr.lo) / static_cast<double>(bins);
    os << "<g fill=\"" << kPalette[0] << "\">";
    for (std::size_t b = 0; b < bins; ++b) {
        const double x0 = f.px(xr.lo + w * static_cast<double>(b)), x1 = f.px(xr.lo + w * static_cast<double>(b + 1));
        const double y = f.py(counts[b]);
        os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y) << "\" width=\"" << num(std::max(0.0, x1 - x0 - 0.5))
           << "\" height=\"" << num(f.py(0.0) - y) << "\"/>";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

std::vector<std::filesystem::path> emit_plots(const RunReport& r, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> out;
    auto emit = [&](const std::string& name, const std::string& svg) {
        out.push_back(dir / name);
        write_text(out.back(), svg);
    };

    const auto returns = log_returns_of(r.full_prices);
    emit("prices.svg", line_chart(r.label + " prices", {{"price", r.full_prices, kPalette[0]}}, "price"));
    std::vector<double> idx(returns.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);
    emit("returns.svg", scatter_chart(r.label + " log returns", {{"return", idx, returns, kPalette[0]}}, "step", "log return"));
    emit("returns_histogram.svg", histogram(r.label + " log return distribution", returns, 60));

    std::vector<double> acf, pacf, band;
    for (const auto& p : r.diagnostics.acf) {
        acf.push_back(p.value);
        band.push_back(p.confidence_band);
    }
    for (const auto& p : r.diagnostics.pacf) pacf.push_back(p.value);
    std::vector<double> neg(band.size());
    std::transform(band.begin(), band.end(), neg.begin(), [](double v) { return -v; });
    emit("correlogram.svg", line_chart("Return correlogram (lag 1 at step 0)",
                                       {{"acf", acf, kPalette[0]}, {"pacf", pacf, kPalette[1]}, {"+band", band, "#999"},
                                        {"-band", neg, "#999"}},
                                       "correlation"));

    std::vector<Points> sets;
    for (std::size_t i = 0; i < r.models.size(); ++i)
        sets.push_back({r.models[i].name, r.actual_returns, r.models[i].returns, kPalette[(i + 1) % kPalette.size()]});
    emit("return_scatter.svg", scatter_chart("Predicted vs actual returns", sets, "actual return", "predicted return"));

    for (std::size_t i = 0; i < r.models.size(); ++i) {
        const auto& m = r.models[i];
        emit("forecast_" + m.name + ".svg",
             line_chart(m.name + " predicted price movement (" + r.mode + ")",
                        {{"actual", r.actual_prices, kPalette[0]}, {m.name, m.prices, kPalette[(i + 1) % kPalette.size()]}},
                        "price"));
    }
    return out;
}

}  // namespace eqf::bench::plots
