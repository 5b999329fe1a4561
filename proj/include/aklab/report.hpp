#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace aklab {

/// Format a double with 17 significant digits, '.' decimal separator,
/// locale-independent; round-trips exactly.
std::string format_double(double v);

/// RFC-4180 CSV writer: CRLF line endings, quoting only when needed.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(const std::vector<std::string>& cells);
    std::string str() const { return out_; }
    void write(const std::filesystem::path& file) const;

private:
    std::size_t width_;
    std::string out_;
};

std::string csv_cell(double v);
std::string csv_cell(const std::string& s);

/// Minimal self-contained SVG line plot (axes, ticks, one or more series,
/// optional horizontal reference line).
struct SvgSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool points = true;
};

struct SvgPlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<SvgSeries> series;
    std::vector<std::pair<double, std::string>> hlines;  // value, color

    std::string render(int width = 640, int height = 420) const;
    void write(const std::filesystem::path& file) const;
};

void write_text_file(const std::filesystem::path& file, const std::string& body);

/// Manifest = the fully resolved config plus the artifact version; a manifest
/// is itself a runnable config, so re-running it reproduces outputs
/// byte-identically.
void write_manifest(const std::filesystem::path& out_dir,
                    const nlohmann::json& resolved_config);

}  // namespace aklab
