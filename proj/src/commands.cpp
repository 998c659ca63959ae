#include "psne/commands.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "psne/errors.hpp"

namespace psne::cli {

namespace fs = std::filesystem;

namespace {

fs::path with_suffix(const fs::path& prefix, const std::string& suffix) {
    return fs::path(prefix.string() + suffix);
}

void ensure_parent(const fs::path& path) {
    const fs::path parent = path.parent_path();
    if (parent.empty()) {
        return;
    }
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) {
        throw io::IoError("cannot create directory " + parent.string());
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

LabeledDataset make_dataset(const std::string& name, std::uint64_t seed, double rate_scale) {
    if (name == "angular") {
        GeneratorConfig config = angular_defaults();
        config.seed = seed;
        config.rate_scale = rate_scale;
        return generate_angular(config);
    }
    if (name == "sparse-sequential") {
        GeneratorConfig config = sparse_sequential_defaults();
        config.seed = seed;
        config.rate_scale = rate_scale;
        return generate_sparse_sequential(config);
    }
    throw std::invalid_argument("unknown dataset '" + name + "' (expected angular or sparse-sequential)");
}

LabeledDataset generate(const GenerateOptions& options) {
    LabeledDataset data = make_dataset(options.dataset, options.seed, options.rate_scale);
    ensure_parent(options.out_prefix);
    io::write_file(with_suffix(options.out_prefix, "_counts.csv"), io::format_counts_csv(data.counts));
    io::write_file(with_suffix(options.out_prefix, "_labels.csv"), io::format_labels_csv(data.group));
    io::write_file(with_suffix(options.out_prefix, "_rates.csv"), io::format_real_csv(data.rates, "f"));
    io::write_file(with_suffix(options.out_prefix, "_manifold.csv"),
                   io::format_manifold_csv(data.manifold_t, data.manifold_h));
    return data;
}

io::RunManifest fit(const FitOptions& options) {
    const std::string bytes = io::read_file(options.counts_path);
    const CountMatrix counts = io::parse_counts_csv(bytes);

    std::optional<std::vector<int>> labels;
    std::optional<std::vector<double>> t;
    if (options.labels_path) {
        labels = io::parse_labels_csv(io::read_file(*options.labels_path));
        if (labels->size() != counts.n_samples()) {
            throw io::AlignmentError("labels file has " + std::to_string(labels->size()) + " rows, counts have " +
                                     std::to_string(counts.n_samples()));
        }
    }
    if (options.manifold_path) {
        t = io::parse_column(io::read_file(*options.manifold_path), "t");
        if (t->size() != counts.n_samples()) {
            throw io::AlignmentError("manifold file has " + std::to_string(t->size()) + " rows, counts have " +
                                     std::to_string(counts.n_samples()));
        }
    }

    const auto start = std::chrono::steady_clock::now();
    const FitResult result = options.distance == Distance::poisson_kl
                                 ? psne::fit(counts, options.config)
                                 : psne::fit(squared_euclidean_matrix(counts), options.config);
    const double seconds = seconds_since(start);

    io::RunManifest manifest;
    manifest.config = options.config;
    manifest.source = "file";
    manifest.input_path = options.counts_path.string();
    manifest.input_sha256 = io::sha256_hex(bytes);
    manifest.seconds = seconds;
    manifest.final_cost = result.state.cost_trace.back().cost;
    manifest.iterations = result.state.iteration;
    manifest.converged = result.state.converged;
    if (labels || t) {
        manifest.metrics = psne::evaluate(result.state.coords, labels ? &*labels : nullptr, t ? &*t : nullptr,
                                          options.evaluation);
        if (options.distance == Distance::squared_euclidean) {
            manifest.metrics->method = "p-SNE (squared Euclidean)";
        }
    }

    ensure_parent(options.out_prefix);
    io::write_file(with_suffix(options.out_prefix, "_embedding.csv"), io::format_real_csv(result.state.coords, "dim_"));
    io::write_file(with_suffix(options.out_prefix, "_trace.csv"), io::format_trace_csv(result.state.cost_trace));
    io::write_file(with_suffix(options.out_prefix, "_manifest.json"), io::manifest_to_json(manifest));
    return manifest;
}

MetricReport evaluate(const EvaluateOptions& options) {
    const RealMatrix coords = io::parse_real_csv(io::read_file(options.embedding_path));
    const std::vector<int> labels = io::parse_labels_csv(io::read_file(options.labels_path));
    if (labels.size() != coords.rows()) {
        throw io::AlignmentError("labels file has " + std::to_string(labels.size()) + " rows, embedding has " +
                                 std::to_string(coords.rows()));
    }
    std::optional<std::vector<double>> t;
    if (options.manifold_path) {
        t = io::parse_column(io::read_file(*options.manifold_path), "t");
        if (t->size() != coords.rows()) {
            throw io::AlignmentError("manifold file has " + std::to_string(t->size()) + " rows, embedding has " +
                                     std::to_string(coords.rows()));
        }
    }
    MetricReport report = psne::evaluate(coords, &labels, t ? &*t : nullptr, options.evaluation);
    if (options.out_csv) {
        ensure_parent(*options.out_csv);
        io::write_file(*options.out_csv, io::format_metrics_csv(report));
    }
    return report;
}

void plot(const PlotOptions& options) {
    const std::string text = io::read_file(options.embedding_path);
    const RealMatrix coords = io::parse_real_csv(text);
    if (coords.rows() == 0) {
        throw std::invalid_argument("embedding file has no samples");
    }
    if (coords.cols() < 2) {
        throw std::invalid_argument("embedding has fewer than 2 dimensions");
    }
    if (coords.cols() > 2) {
        std::cerr << "warning: embedding has " << coords.cols() << " dimensions; plotting dim_0 and dim_1\n";
    }
    const std::string values_text = io::read_file(options.values_path);
    const io::Table table = io::parse_csv(values_text);
    std::string column;
    for (const char* name : {"label", "t"}) {
        if (std::find(table.header.begin(), table.header.end(), name) != table.header.end()) {
            column = name;
            break;
        }
    }
    const std::vector<double> values = io::parse_column(values_text, column);
    if (values.size() != coords.rows()) {
        throw io::AlignmentError("color file has " + std::to_string(values.size()) + " rows, embedding has " +
                                 std::to_string(coords.rows()));
    }
    const std::string svg = io::render_svg(coords, values, options.mode);
    ensure_parent(options.out_svg);
    io::write_file(options.out_svg, svg);
}

std::vector<double> solve_scales(const std::string& dataset, std::uint64_t seed, const std::vector<double>& targets) {
    const LabeledDataset base = make_dataset(dataset, seed, 1.0);
    std::vector<double> scales;
    for (double target : targets) {
        scales.push_back(solve_rate_scale(base.rates, target));
    }
    return scales;
}

std::vector<SweepRow> sweep(const SweepOptions& options) {
    std::vector<double> scales = options.scales;
    if (!options.target_zero_fractions.empty()) {
        scales = solve_scales(options.dataset, options.seed, options.target_zero_fractions);
    }
    if (scales.empty()) {
        throw std::invalid_argument("sweep needs at least one rate scale");
    }

    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        const fs::path dir = options.out_dir / ("scale_" + std::to_string(i));
        try {
            GenerateOptions gen{options.dataset, options.seed, scales[i], dir / "data"};
            const LabeledDataset data = generate(gen);

            FitOptions fit_options;
            fit_options.counts_path = dir / "data_counts.csv";
            fit_options.config = options.config;
            fit_options.out_prefix = dir / "psne";
            fit_options.labels_path = dir / "data_labels.csv";
            fit_options.manifold_path = dir / "data_manifold.csv";
            fit_options.evaluation = options.evaluation;
            io::RunManifest manifest = fit(fit_options);

            // Record the generator provenance alongside the file digest.
            manifest.source = "generator";
            manifest.generator = data.generator;
            manifest.generator_seed = data.seed;
            manifest.rate_scale = scales[i];
            io::write_file(dir / "manifest.json", io::manifest_to_json(manifest));

            rows.push_back(SweepRow{scales[i], zero_fraction(data.counts), *manifest.metrics, manifest.final_cost,
                                    manifest.seconds});
        } catch (const DivergenceError& e) {
            throw DivergenceError(e.iteration(), "rate scale " + io::format_real(scales[i]) + ": " + e.what());
        } catch (const io::IoError& e) {
            throw io::IoError("rate scale " + io::format_real(scales[i]) + ": " + e.what());
        } catch (const io::ParseError& e) {
            throw io::ParseError("rate scale " + io::format_real(scales[i]) + ": " + e.what());
        } catch (const std::exception& e) {
            throw std::runtime_error("sweep failed at rate scale " + io::format_real(scales[i]) + ": " + e.what());
        }
    }
    ensure_parent(options.out_dir / "sweep.csv");
    io::write_file(options.out_dir / "sweep.csv", format_sweep_csv(rows));
    return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
    auto field = [](const std::optional<double>& v) { return v ? io::format_real(*v) : std::string{}; };
    std::string out = "scale,zero_fraction,knn,ari,spearman,silhouette,final_cost,seconds\n";
    for (const auto& r : rows) {
        out += io::format_real(r.scale) + "," + io::format_real(r.zero_fraction) + "," + field(r.metrics.knn_accuracy) +
               "," + field(r.metrics.kmeans_ari) + "," + field(r.metrics.spearman_abs) + "," +
               field(r.metrics.silhouette) + "," + io::format_real(r.final_cost) + "," + io::format_real(r.seconds) +
               "\n";
    }
    return out;
}

namespace {

// Optional flag values; only the ones given on the command line override the config file.
struct ConfigFlags {
    std::optional<std::size_t> embed_dim;
    std::optional<double> sharpness;
    std::optional<double> learning_rate;
    std::optional<double> momentum_initial;
    std::optional<double> momentum_final;
    std::optional<std::size_t> momentum_switch_iter;
    std::optional<double> exaggeration;
    std::optional<std::size_t> exaggeration_iters;
    std::optional<std::size_t> max_iters;
    std::optional<double> tolerance;
    std::optional<double> epsilon;
    std::optional<double> group_lasso;
    std::optional<std::uint64_t> seed;
    std::optional<bool> exaggeration_renormalize;
    bool double_eta_for_half_sharpness = false;
    std::string config_file;

    void add_to(CLI::App& app) {
        app.add_option("--config", config_file, "key=value configuration file");
        app.add_option("--embed-dim,-P", embed_dim, "Embedding dimension P");
        app.add_option("--sharpness,-w", sharpness, "Softmax sharpness w");
        app.add_option("--learning-rate,--eta", learning_rate, "Learning rate");
        app.add_option("--momentum-initial", momentum_initial);
        app.add_option("--momentum-final", momentum_final);
        app.add_option("--momentum-switch-iter", momentum_switch_iter);
        app.add_option("--exaggeration", exaggeration, "Early exaggeration factor");
        app.add_option("--exaggeration-iters", exaggeration_iters);
        app.add_option("--max-iters", max_iters);
        app.add_option("--tolerance", tolerance, "Early-stop tolerance on |L_k - L_(k-1)|");
        app.add_option("--epsilon", epsilon, "Stability constant inside the KL logarithm");
        app.add_option("--group-lasso", group_lasso, "Group-lasso weight gamma");
        app.add_option("--seed", seed);
        app.add_option("--exaggeration-renormalize", exaggeration_renormalize,
                       "Renormalize exaggerated affinities (true/false)");
        app.add_flag("--double-eta-for-w05", double_eta_for_half_sharpness,
                     "Double the learning rate when sharpness is 0.5");
    }

    FitConfig resolve(FitConfig base = {}) const {
        if (!config_file.empty()) {
            base = io::parse_config(io::read_file(config_file), base);
        }
        if (embed_dim) base.embed_dim = *embed_dim;
        if (sharpness) base.sharpness = *sharpness;
        if (learning_rate) base.learning_rate = *learning_rate;
        if (momentum_initial) base.momentum_initial = *momentum_initial;
        if (momentum_final) base.momentum_final = *momentum_final;
        if (momentum_switch_iter) base.momentum_switch_iter = *momentum_switch_iter;
        if (exaggeration) base.exaggeration = *exaggeration;
        if (exaggeration_iters) base.exaggeration_iters = *exaggeration_iters;
        if (max_iters) base.max_iters = *max_iters;
        if (tolerance) base.tolerance = *tolerance;
        if (epsilon) base.epsilon = *epsilon;
        if (group_lasso) base.group_lasso = *group_lasso;
        if (seed) base.seed = *seed;
        if (exaggeration_renormalize) base.exaggeration_renormalize = *exaggeration_renormalize;
        if (double_eta_for_half_sharpness && base.sharpness == 0.5) {
            base.learning_rate *= 2.0;
        }
        base.validate();
        return base;
    }
};

void add_evaluation_flags(CLI::App& app, EvaluationOptions& options) {
    app.add_option("--knn-k", options.knn_k, "Neighbors for kNN accuracy")->capture_default_str();
    app.add_option("--kmeans-clusters", options.n_clusters, "k-means clusters (0 = number of labels)")
        ->capture_default_str();
    app.add_option("--eval-seed", options.seed, "Seed for k-means restarts")->capture_default_str();
}

std::vector<double> parse_scale_list(const std::string& text) {
    std::vector<double> scales;
    std::istringstream lines(text);
    std::string line;
    std::size_t row = 0;
    while (std::getline(lines, line)) {
        ++row;
        line = line.substr(0, line.find('#'));
        std::istringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) {
            const auto first = field.find_first_not_of(" \t\r");
            if (first == std::string::npos) {
                continue;
            }
            try {
                std::size_t used = 0;
                scales.push_back(std::stod(field.substr(first), &used));
            } catch (const std::exception&) {
                throw io::ParseError("bad rate scale '" + field + "'", row);
            }
        }
    }
    return scales;
}

int report(ExitCode code, const std::string& message) {
    std::cerr << "psne: " << message << '\n';
    return code;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"p-SNE: neighbor embedding for Poisson count data"};
    app.require_subcommand(1);

    GenerateOptions gen;
    std::string gen_out;
    auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic Poisson benchmark dataset");
    generate_cmd->add_option("--dataset", gen.dataset, "angular | sparse-sequential")->capture_default_str();
    generate_cmd->add_option("--seed", gen.seed)->capture_default_str();
    generate_cmd->add_option("--rate-scale", gen.rate_scale, "Multiplier on all Poisson rates")->capture_default_str();
    generate_cmd->add_option("--out", gen_out, "Output prefix")->required();

    FitOptions fit_options;
    ConfigFlags fit_flags;
    std::string fit_counts, fit_out, fit_labels, fit_manifold, fit_distance = "poisson";
    auto* fit_cmd = app.add_subcommand("fit", "Embed a counts CSV");
    fit_cmd->add_option("--counts", fit_counts, "Counts CSV")->required();
    fit_cmd->add_option("--out", fit_out, "Output prefix")->required();
    fit_cmd->add_option("--labels", fit_labels, "Labels CSV; adds label metrics to the manifest");
    fit_cmd->add_option("--manifold", fit_manifold, "Manifold CSV (column t); adds Spearman to the manifest");
    fit_cmd->add_option("--distance", fit_distance, "poisson | sq-euclidean")->capture_default_str();
    fit_flags.add_to(*fit_cmd);
    add_evaluation_flags(*fit_cmd, fit_options.evaluation);

    EvaluateOptions eval_options;
    std::string eval_embedding, eval_labels, eval_manifold, eval_out;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score an embedding against labels / manifold values");
    evaluate_cmd->add_option("--embedding", eval_embedding)->required();
    evaluate_cmd->add_option("--labels", eval_labels)->required();
    evaluate_cmd->add_option("--manifold", eval_manifold);
    evaluate_cmd->add_option("--out", eval_out, "Metric CSV output path");
    add_evaluation_flags(*evaluate_cmd, eval_options.evaluation);

    std::string plot_embedding, plot_values, plot_out, plot_mode = "categorical";
    auto* plot_cmd = app.add_subcommand("plot", "Render an embedding as an SVG scatter plot");
    plot_cmd->add_option("--embedding", plot_embedding)->required();
    plot_cmd->add_option("--colors", plot_values, "Labels CSV or manifold CSV")->required();
    plot_cmd->add_option("--out", plot_out, "SVG output path")->required();
    plot_cmd->add_option("--mode", plot_mode, "categorical | continuous")->capture_default_str();

    SweepOptions sweep_options;
    ConfigFlags sweep_flags;
    std::string sweep_out;
    bool sweep_dry_run = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "Generate, fit and evaluate across Poisson rate scales");
    sweep_cmd->add_option("--dataset", sweep_options.dataset)->capture_default_str();
    sweep_cmd->add_option("--data-seed", sweep_options.seed, "Generator seed")->capture_default_str();
    sweep_cmd->add_option("--scales", sweep_options.scales, "Rate scales")->delimiter(',');
    sweep_cmd->add_option("--target-zero-fractions", sweep_options.target_zero_fractions,
                          "Solve scales for these expected zero fractions")
        ->delimiter(',');
    std::string sweep_scales_file;
    sweep_cmd->add_option("--scales-file", sweep_scales_file, "File of rate scales (comma or newline separated, # comments)");
    sweep_cmd->add_option("--out-dir", sweep_out, "Output directory");
    sweep_cmd->add_flag("--dry-run", sweep_dry_run, "Print the resolved scales and exit");
    sweep_flags.add_to(*sweep_cmd);
    add_evaluation_flags(*sweep_cmd, sweep_options.evaluation);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : usage_error;
    }

    try {
        if (*generate_cmd) {
            gen.out_prefix = gen_out;
            const LabeledDataset data = generate(gen);
            std::cout << "wrote " << data.n_samples() << " x " << data.counts.n_features() << " counts to "
                      << gen_out << "_counts.csv";
            if (!data.removed_rows.empty()) {
                std::cout << " (" << data.removed_rows.size() << " all-zero samples removed)";
            }
            std::cout << '\n';
        } else if (*fit_cmd) {
            fit_options.counts_path = fit_counts;
            fit_options.out_prefix = fit_out;
            fit_options.config = fit_flags.resolve();
            if (fit_distance == "poisson") {
                fit_options.distance = Distance::poisson_kl;
            } else if (fit_distance == "sq-euclidean") {
                fit_options.distance = Distance::squared_euclidean;
            } else {
                return report(usage_error, "unknown distance '" + fit_distance + "'");
            }
            if (!fit_labels.empty()) fit_options.labels_path = fit_labels;
            if (!fit_manifold.empty()) fit_options.manifold_path = fit_manifold;
            const io::RunManifest manifest = fit(fit_options);
            std::cout << "iterations " << manifest.iterations << (manifest.converged ? " (converged)" : "")
                      << ", final cost " << io::format_real(manifest.final_cost) << ", " << manifest.seconds
                      << " s\n";
            if (manifest.metrics) {
                std::cout << io::format_metrics_table(*manifest.metrics);
            }
        } else if (*evaluate_cmd) {
            eval_options.embedding_path = eval_embedding;
            eval_options.labels_path = eval_labels;
            if (!eval_manifold.empty()) eval_options.manifold_path = eval_manifold;
            if (!eval_out.empty()) eval_options.out_csv = eval_out;
            std::cout << io::format_metrics_table(evaluate(eval_options));
        } else if (*plot_cmd) {
            io::ColorMode mode;
            if (plot_mode == "categorical") {
                mode = io::ColorMode::categorical;
            } else if (plot_mode == "continuous") {
                mode = io::ColorMode::continuous;
            } else {
                return report(usage_error, "unknown color mode '" + plot_mode + "'");
            }
            plot(PlotOptions{plot_embedding, plot_values, plot_out, mode});
        } else if (*sweep_cmd) {
            sweep_options.config = sweep_flags.resolve();
            if (!sweep_scales_file.empty()) {
                sweep_options.scales = parse_scale_list(io::read_file(sweep_scales_file));
            }
            if (sweep_dry_run) {
                const auto scales = sweep_options.target_zero_fractions.empty()
                                        ? sweep_options.scales
                                        : solve_scales(sweep_options.dataset, sweep_options.seed,
                                                       sweep_options.target_zero_fractions);
                for (double s : scales) {
                    std::cout << io::format_real(s) << '\n';
                }
                return ok;
            }
            if (sweep_out.empty()) {
                return report(usage_error, "sweep needs --out-dir");
            }
            sweep_options.out_dir = sweep_out;
            std::cout << format_sweep_csv(sweep(sweep_options));
        }
    } catch (const io::ParseError& e) {
        return report(parse_error, e.what());
    } catch (const DivergenceError& e) {
        return report(divergence_error, e.what());
    } catch (const io::IoError& e) {
        return report(io_error, e.what());
    } catch (const io::AlignmentError& e) {
        return report(data_error, e.what());
    } catch (const DegenerateInputError& e) {
        return report(data_error, e.what());
    } catch (const std::invalid_argument& e) {
        return report(usage_error, e.what());
    } catch (const std::exception& e) {
        return report(data_error, e.what());
    }
    return ok;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("psne");
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace psne::cli
