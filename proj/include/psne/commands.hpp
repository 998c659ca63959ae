#ifndef PSNE_COMMANDS_HPP
#define PSNE_COMMANDS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "psne/cli_io.hpp"
#include "psne/optimizer.hpp"
#include "psne/synthetic.hpp"

namespace psne::cli {

/// Process exit codes of the `psne` tool.
enum ExitCode : int {
    ok = 0,
    usage_error = 1,       // bad flags or invalid configuration values
    parse_error = 2,       // malformed CSV / config / manifest input
    divergence_error = 3,  // non-finite cost or coordinates during a fit
    io_error = 4,          // unreadable input or unwritable output
    data_error = 5,        // misaligned inputs or degenerate labels
};

/// "angular" or "sparse-sequential"; throws std::invalid_argument otherwise.
LabeledDataset make_dataset(const std::string& name, std::uint64_t seed, double rate_scale);

struct GenerateOptions {
    std::string dataset = "angular";
    std::uint64_t seed = 42;
    double rate_scale = 1.0;
    std::filesystem::path out_prefix;
};

/// Writes <prefix>_counts.csv, _labels.csv, _rates.csv and _manifold.csv.
LabeledDataset generate(const GenerateOptions& options);

enum class Distance { poisson_kl, squared_euclidean };

struct FitOptions {
    std::filesystem::path counts_path;
    FitConfig config;
    std::filesystem::path out_prefix;
    Distance distance = Distance::poisson_kl;
    std::optional<std::filesystem::path> labels_path;
    std::optional<std::filesystem::path> manifold_path;
    EvaluationOptions evaluation;
};

/// Writes <prefix>_embedding.csv, _trace.csv and _manifest.json.
io::RunManifest fit(const FitOptions& options);

struct EvaluateOptions {
    std::filesystem::path embedding_path;
    std::filesystem::path labels_path;
    std::optional<std::filesystem::path> manifold_path;
    std::optional<std::filesystem::path> out_csv;
    EvaluationOptions evaluation;
};

MetricReport evaluate(const EvaluateOptions& options);

struct PlotOptions {
    std::filesystem::path embedding_path;
    std::filesystem::path values_path;  // labels (categorical) or manifold/t values (continuous)
    std::filesystem::path out_svg;
    io::ColorMode mode = io::ColorMode::categorical;
};

void plot(const PlotOptions& options);

struct SweepOptions {
    std::string dataset = "sparse-sequential";
    std::uint64_t seed = 42;
    std::vector<double> scales;
    /// Solved into scales against the unscaled dataset's rates when non-empty.
    std::vector<double> target_zero_fractions;
    FitConfig config;
    std::filesystem::path out_dir;
    EvaluationOptions evaluation;
};

struct SweepRow {
    double scale = 1.0;
    double zero_fraction = 0.0;
    MetricReport metrics;
    double final_cost = 0.0;
    double seconds = 0.0;
};

/// Scales for the requested zero fractions on `dataset` at `seed`.
std::vector<double> solve_scales(const std::string& dataset, std::uint64_t seed, const std::vector<double>& targets);

/**
 * generate -> fit -> evaluate for every scale. Each scale writes into
 * <out_dir>/scale_<i>/; the aggregate goes to <out_dir>/sweep.csv with
 * columns scale,zero_fraction,knn,ari,spearman,silhouette,final_cost,seconds.
 */
std::vector<SweepRow> sweep(const SweepOptions& options);

std::string format_sweep_csv(const std::vector<SweepRow>& rows);

/// Entry point of the `psne` executable; returns an ExitCode.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace psne::cli

#endif
