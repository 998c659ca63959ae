#ifndef PSNE_CLI_IO_HPP
#define PSNE_CLI_IO_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "psne/evaluation.hpp"
#include "psne/matrix.hpp"
#include "psne/optimizer.hpp"
#include "psne/poisson_geometry.hpp"
#include "psne/synthetic.hpp"

namespace psne::io {

/// Malformed input text. Row and column are 1-based positions in the file
/// (row 1 is the header); 0 means "not applicable".
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0);

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs that disagree on the number of samples.
class AlignmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file so a failed write leaves no partial output.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Comma-separated, header row first, no quoting. Blank trailing lines are
/// ignored; every row must have as many fields as the header.
Table parse_csv(std::string_view text);

// Counts: header f0,...,f{M-1}; one sample per line; plain decimal integers.
CountMatrix parse_counts_csv(std::string_view text);
std::string format_counts_csv(const CountMatrix& counts);

// Real matrices: caller-chosen header prefix (dim_ for embeddings, f for rates).
RealMatrix parse_real_csv(std::string_view text);
std::string format_real_csv(const RealMatrix& values, std::string_view column_prefix);

// Labels: header "label", one integer per line.
std::vector<int> parse_labels_csv(std::string_view text);
std::string format_labels_csv(std::span<const int> labels);

/// One column of a CSV by header name (or the first column when `name`
/// is empty), parsed as reals.
std::vector<double> parse_column(std::string_view text, std::string_view name);

// Manifold coordinates: header "t,h".
std::string format_manifold_csv(std::span<const double> t, std::span<const double> h);

// Trace: header "iteration,cost", one row per iteration.
std::string format_trace_csv(std::span<const TracePoint> trace);

/**
 * Flat key=value config. Keys are FitConfig field names; '#' starts a
 * comment; blank lines are skipped. Unknown keys are a ParseError.
 */
FitConfig parse_config(std::string_view text, FitConfig base = {});
std::string format_config(const FitConfig& config);
/// Applies one key=value pair; returns false if the key is not a FitConfig field.
bool apply_config_entry(FitConfig& config, std::string_view key, std::string_view value);

struct RunManifest {
    FitConfig config;
    std::string source;        // "file" or "generator"
    std::string input_path;    // when source == "file"
    std::string input_sha256;  // when source == "file"
    std::string generator;     // when source == "generator"
    std::uint64_t generator_seed = 0;
    double rate_scale = 1.0;
    double seconds = 0.0;
    double final_cost = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::optional<MetricReport> metrics;

    bool operator==(const RunManifest&) const = default;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(std::string_view text);

/// Metric report as a two-row CSV; absent metrics are empty fields.
std::string format_metrics_csv(const MetricReport& report);
std::string format_metrics_table(const MetricReport& report);

enum class ColorMode { categorical, continuous };

/// Colors for categorical labels, cycled by label value.
std::span<const std::string_view> categorical_palette();

/**
 * Continuous ramp: linear RGB interpolation from #440154 at fraction 0 to
 * #FDE725 at fraction 1 (fraction clamped to [0, 1]). Red and green rise
 * monotonically, blue falls.
 */
std::string continuous_color(double fraction);

struct PlotOptions {
    double width = 640.0;
    double height = 640.0;
    double radius = 4.0;
};

/**
 * Standalone SVG scatter of the first two embedding dimensions, one
 * <circle> per sample, axes scaled to the data bounds plus a 5% margin.
 * `values` holds integer labels (categorical) or manifold values
 * (continuous). Throws std::invalid_argument for empty input, P < 2 or a
 * length mismatch.
 */
std::string render_svg(const RealMatrix& coords, std::span<const double> values, ColorMode mode,
                       const PlotOptions& options = {});

}  // namespace psne::io

#endif
