#include "aklab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace aklab {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_cell(double v) { return format_double(v); }

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ += ',';
        out_ += csv_cell(header[i]);
    }
    out_ += "\r\n";
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != width_)
        throw std::invalid_argument("CsvWriter: row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ += ',';
        out_ += cells[i];
    }
    out_ += "\r\n";
}

void CsvWriter::write(const std::filesystem::path& file) const {
    write_text_file(file, out_);
}

void write_text_file(const std::filesystem::path& file, const std::string& body) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + file.string());
    os << body;
    if (!os) throw std::runtime_error("write failed: " + file.string());
}

namespace {

struct AxisTicks {
    std::vector<double> at;
};

AxisTicks nice_ticks(double lo, double hi, int target = 6) {
    AxisTicks t;
    if (!(hi > lo)) {
        hi = lo + 1.0;
        lo -= 1.0;
    }
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    }
    const double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 0.5 * step; v += step) t.at.push_back(v);
    return t;
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

std::string SvgPlot::render(int width, int height) const {
    const double ml = 70, mr = 20, mt = 36, mb = 48;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    bool first = true;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (first) {
                xlo = xhi = s.x[i];
                ylo = yhi = s.y[i];
                first = false;
            }
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i]);
            yhi = std::max(yhi, s.y[i]);
        }
    }
    for (const auto& [v, color] : hlines) {
        ylo = std::min(ylo, v);
        yhi = std::max(yhi, v);
    }
    const double xpad = 0.05 * (xhi - xlo + 1e-12);
    const double ypad = 0.08 * (yhi - ylo + 1e-12);
    xlo -= xpad;
    xhi += xpad;
    ylo -= ypad;
    yhi += ypad;

    auto X = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * pw; };
    auto Y = [&](double y) { return mt + (yhi - y) / (yhi - ylo) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(width) + "\" height=\"" + std::to_string(height) +
           "\" viewBox=\"0 0 " + std::to_string(width) + " " +
           std::to_string(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + short_num(width / 2.0) +
           "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">" + title + "</text>\n";

    const auto xt = nice_ticks(xlo, xhi);
    const auto yt = nice_ticks(ylo, yhi);
    for (double v : xt.at) {
        svg += "<line x1=\"" + short_num(X(v)) + "\" y1=\"" + short_num(mt) +
               "\" x2=\"" + short_num(X(v)) + "\" y2=\"" + short_num(mt + ph) +
               "\" stroke=\"#eeeeee\"/>\n";
        svg += "<text x=\"" + short_num(X(v)) + "\" y=\"" +
               short_num(mt + ph + 16) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">" + short_num(v) + "</text>\n";
    }
    for (double v : yt.at) {
        svg += "<line x1=\"" + short_num(ml) + "\" y1=\"" + short_num(Y(v)) +
               "\" x2=\"" + short_num(ml + pw) + "\" y2=\"" + short_num(Y(v)) +
               "\" stroke=\"#eeeeee\"/>\n";
        svg += "<text x=\"" + short_num(ml - 6) + "\" y=\"" +
               short_num(Y(v) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">" + short_num(v) + "</text>\n";
    }
    svg += "<rect x=\"" + short_num(ml) + "\" y=\"" + short_num(mt) +
           "\" width=\"" + short_num(pw) + "\" height=\"" + short_num(ph) +
           "\" fill=\"none\" stroke=\"#333333\"/>\n";
    svg += "<text x=\"" + short_num(ml + pw / 2) + "\" y=\"" +
           short_num(height - 10.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">" + x_label + "</text>\n";
    svg += "<text x=\"16\" y=\"" + short_num(mt + ph / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\" transform=\"rotate(-90 16 " +
           short_num(mt + ph / 2) + ")\">" + y_label + "</text>\n";

    for (const auto& [v, color] : hlines)
        svg += "<line x1=\"" + short_num(ml) + "\" y1=\"" + short_num(Y(v)) +
               "\" x2=\"" + short_num(ml + pw) + "\" y2=\"" + short_num(Y(v)) +
               "\" stroke=\"" + color + "\" stroke-dasharray=\"6 4\"/>\n";

    for (const auto& s : series) {
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            pts += short_num(X(s.x[i])) + "," + short_num(Y(s.y[i])) + " ";
        }
        svg += "<polyline fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        if (s.points)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                svg += "<circle cx=\"" + short_num(X(s.x[i])) + "\" cy=\"" +
                       short_num(Y(s.y[i])) + "\" r=\"3\" fill=\"" + s.color +
                       "\"/>\n";
            }
    }
    svg += "</svg>\n";
    return svg;
}

void SvgPlot::write(const std::filesystem::path& file) const {
    write_text_file(file, render());
}

void write_manifest(const std::filesystem::path& out_dir,
                    const nlohmann::json& resolved_config) {
    write_text_file(out_dir / "manifest.json", resolved_config.dump(2) + "\n");
}

}  // namespace aklab
