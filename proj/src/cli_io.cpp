#include "psne/cli_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace psne::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
    text = trim(text);
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        return std::nullopt;
    }
    return value;
}

std::string header_line(std::string_view prefix, std::size_t count) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) {
        if (i > 0) {
            out += ',';
        }
        out += prefix;
        out += std::to_string(i);
    }
    out += '\n';
    return out;
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t row, std::size_t column)
    : std::runtime_error(row == 0 ? what
                                  : what + " (row " + std::to_string(row) +
                                        (column == 0 ? "" : ", column " + std::to_string(column)) + ")"),
      row_(row),
      column_(column) {}

std::string format_real(double value) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    (void)ec;
    return std::string(buf.data(), ptr);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + path.string() + " for writing");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            throw IoError("failed writing " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path.string());
    }
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    std::ostringstream ss;
    for (unsigned int i = 0; i < length; ++i) {
        ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return ss.str();
}

Table parse_csv(std::string_view text) {
    Table table;
    std::vector<std::string_view> lines = split(text, '\n');
    while (!lines.empty() && trim(lines.back()).empty()) {
        lines.pop_back();
    }
    if (lines.empty()) {
        throw ParseError("empty CSV input");
    }
    for (auto field : split(lines[0], ',')) {
        table.header.emplace_back(trim(field));
    }
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto fields = split(lines[r], ',');
        if (fields.size() != table.header.size()) {
            throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             r + 1);
        }
        std::vector<std::string> row;
        row.reserve(fields.size());
        for (auto f : fields) {
            row.emplace_back(trim(f));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

CountMatrix parse_counts_csv(std::string_view text) {
    const Table table = parse_csv(text);
    if (table.rows.size() < 2) {
        throw ParseError("counts need at least 2 samples");
    }
    Matrix<std::int64_t> values(table.rows.size(), table.header.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            const auto v = parse_number<std::int64_t>(table.rows[r][c]);
            if (!v) {
                throw ParseError("not an integer count: '" + table.rows[r][c] + "'", r + 2, c + 1);
            }
            if (*v < 0) {
                throw ParseError("negative count", r + 2, c + 1);
            }
            values(r, c) = *v;
        }
    }
    return CountMatrix(std::move(values));
}

std::string format_counts_csv(const CountMatrix& counts) {
    std::string out = header_line("f", counts.n_features());
    for (std::size_t n = 0; n < counts.n_samples(); ++n) {
        for (std::size_t m = 0; m < counts.n_features(); ++m) {
            if (m > 0) {
                out += ',';
            }
            out += std::to_string(counts(n, m));
        }
        out += '\n';
    }
    return out;
}

RealMatrix parse_real_csv(std::string_view text) {
    const Table table = parse_csv(text);
    RealMatrix values(table.rows.size(), table.header.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            const auto v = parse_number<double>(table.rows[r][c]);
            if (!v || !std::isfinite(*v)) {
                throw ParseError("not a finite number: '" + table.rows[r][c] + "'", r + 2, c + 1);
            }
            values(r, c) = *v;
        }
    }
    return values;
}

std::string format_real_csv(const RealMatrix& values, std::string_view column_prefix) {
    std::string out = header_line(column_prefix, values.cols());
    for (std::size_t r = 0; r < values.rows(); ++r) {
        for (std::size_t c = 0; c < values.cols(); ++c) {
            if (c > 0) {
                out += ',';
            }
            out += format_real(values(r, c));
        }
        out += '\n';
    }
    return out;
}

std::vector<int> parse_labels_csv(std::string_view text) {
    const Table table = parse_csv(text);
    if (table.header.size() != 1) {
        throw ParseError("labels file must have exactly one column", 1);
    }
    std::vector<int> labels;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto v = parse_number<int>(table.rows[r][0]);
        if (!v) {
            throw ParseError("not an integer label: '" + table.rows[r][0] + "'", r + 2, 1);
        }
        labels.push_back(*v);
    }
    return labels;
}

std::string format_labels_csv(std::span<const int> labels) {
    std::string out = "label\n";
    for (int l : labels) {
        out += std::to_string(l);
        out += '\n';
    }
    return out;
}

std::vector<double> parse_column(std::string_view text, std::string_view name) {
    const Table table = parse_csv(text);
    std::size_t column = 0;
    if (!name.empty()) {
        const auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end()) {
            throw ParseError("no column named '" + std::string(name) + "'", 1);
        }
        column = static_cast<std::size_t>(it - table.header.begin());
    }
    std::vector<double> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto v = parse_number<double>(table.rows[r][column]);
        if (!v || !std::isfinite(*v)) {
            throw ParseError("not a finite number: '" + table.rows[r][column] + "'", r + 2, column + 1);
        }
        out.push_back(*v);
    }
    return out;
}

std::string format_manifold_csv(std::span<const double> t, std::span<const double> h) {
    std::string out = "t,h\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        out += format_real(t[i]);
        out += ',';
        out += format_real(h[i]);
        out += '\n';
    }
    return out;
}

std::string format_trace_csv(std::span<const TracePoint> trace) {
    std::string out = "iteration,cost\n";
    for (const auto& point : trace) {
        out += std::to_string(point.iteration);
        out += ',';
        out += format_real(point.cost);
        out += '\n';
    }
    return out;
}

bool apply_config_entry(FitConfig& config, std::string_view key, std::string_view value) {
    auto real = [&](double& field) {
        const auto v = parse_number<double>(value);
        if (!v) {
            throw ParseError("bad number for " + std::string(key) + ": '" + std::string(value) + "'");
        }
        field = *v;
    };
    auto whole = [&](auto& field) {
        const auto v = parse_number<std::remove_reference_t<decltype(field)>>(value);
        if (!v) {
            throw ParseError("bad integer for " + std::string(key) + ": '" + std::string(value) + "'");
        }
        field = *v;
    };
    if (key == "embed_dim") whole(config.embed_dim);
    else if (key == "sharpness") real(config.sharpness);
    else if (key == "learning_rate") real(config.learning_rate);
    else if (key == "momentum_initial") real(config.momentum_initial);
    else if (key == "momentum_final") real(config.momentum_final);
    else if (key == "momentum_switch_iter") whole(config.momentum_switch_iter);
    else if (key == "exaggeration") real(config.exaggeration);
    else if (key == "exaggeration_iters") whole(config.exaggeration_iters);
    else if (key == "max_iters") whole(config.max_iters);
    else if (key == "tolerance") real(config.tolerance);
    else if (key == "epsilon") real(config.epsilon);
    else if (key == "group_lasso") real(config.group_lasso);
    else if (key == "seed") whole(config.seed);
    else if (key == "exaggeration_renormalize") {
        if (value == "true" || value == "1") config.exaggeration_renormalize = true;
        else if (value == "false" || value == "0") config.exaggeration_renormalize = false;
        else throw ParseError("bad flag for exaggeration_renormalize: '" + std::string(value) + "'");
    } else {
        return false;
    }
    return true;
}

FitConfig parse_config(std::string_view text, FitConfig base) {
    const auto lines = split(text, '\n');
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected key=value", i + 1);
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        try {
            if (!apply_config_entry(base, key, value)) {
                throw ParseError("unknown config key '" + std::string(key) + "'", i + 1);
            }
        } catch (const ParseError& e) {
            if (e.row() != 0) {
                throw;
            }
            throw ParseError(e.what(), i + 1);
        }
    }
    return base;
}

std::string format_config(const FitConfig& c) {
    std::ostringstream out;
    out << "embed_dim=" << c.embed_dim << '\n'
        << "sharpness=" << format_real(c.sharpness) << '\n'
        << "learning_rate=" << format_real(c.learning_rate) << '\n'
        << "momentum_initial=" << format_real(c.momentum_initial) << '\n'
        << "momentum_final=" << format_real(c.momentum_final) << '\n'
        << "momentum_switch_iter=" << c.momentum_switch_iter << '\n'
        << "exaggeration=" << format_real(c.exaggeration) << '\n'
        << "exaggeration_iters=" << c.exaggeration_iters << '\n'
        << "max_iters=" << c.max_iters << '\n'
        << "tolerance=" << format_real(c.tolerance) << '\n'
        << "epsilon=" << format_real(c.epsilon) << '\n'
        << "group_lasso=" << format_real(c.group_lasso) << '\n'
        << "seed=" << c.seed << '\n'
        << "exaggeration_renormalize=" << (c.exaggeration_renormalize ? "true" : "false") << '\n';
    return out.str();
}

namespace {

using nlohmann::json;

json config_to_json(const FitConfig& c) {
    return json{{"embed_dim", c.embed_dim},
                {"sharpness", c.sharpness},
                {"learning_rate", c.learning_rate},
                {"momentum_initial", c.momentum_initial},
                {"momentum_final", c.momentum_final},
                {"momentum_switch_iter", c.momentum_switch_iter},
                {"exaggeration", c.exaggeration},
                {"exaggeration_iters", c.exaggeration_iters},
                {"max_iters", c.max_iters},
                {"tolerance", c.tolerance},
                {"epsilon", c.epsilon},
                {"group_lasso", c.group_lasso},
                {"seed", c.seed},
                {"exaggeration_renormalize", c.exaggeration_renormalize}};
}

FitConfig config_from_json(const json& j) {
    FitConfig c;
    j.at("embed_dim").get_to(c.embed_dim);
    j.at("sharpness").get_to(c.sharpness);
    j.at("learning_rate").get_to(c.learning_rate);
    j.at("momentum_initial").get_to(c.momentum_initial);
    j.at("momentum_final").get_to(c.momentum_final);
    j.at("momentum_switch_iter").get_to(c.momentum_switch_iter);
    j.at("exaggeration").get_to(c.exaggeration);
    j.at("exaggeration_iters").get_to(c.exaggeration_iters);
    j.at("max_iters").get_to(c.max_iters);
    j.at("tolerance").get_to(c.tolerance);
    j.at("epsilon").get_to(c.epsilon);
    j.at("group_lasso").get_to(c.group_lasso);
    j.at("seed").get_to(c.seed);
    j.at("exaggeration_renormalize").get_to(c.exaggeration_renormalize);
    return c;
}

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

std::optional<double> number_or_absent(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return std::nullopt;
    }
    return j.at(key).get<double>();
}

}  // namespace

std::string manifest_to_json(const RunManifest& m) {
    json provenance{{"source", m.source}};
    if (m.source == "file") {
        provenance["path"] = m.input_path;
        provenance["sha256"] = m.input_sha256;
    } else {
        provenance["generator"] = m.generator;
        provenance["seed"] = m.generator_seed;
        provenance["rate_scale"] = m.rate_scale;
    }
    json j{{"config", config_to_json(m.config)},
           {"dataset", provenance},
           {"seconds", m.seconds},
           {"final_cost", m.final_cost},
           {"iterations", m.iterations},
           {"converged", m.converged}};
    if (m.metrics) {
        j["metrics"] = json{{"method", m.metrics->method},
                            {"knn_accuracy", optional_number(m.metrics->knn_accuracy)},
                            {"kmeans_ari", optional_number(m.metrics->kmeans_ari)},
                            {"spearman_abs", optional_number(m.metrics->spearman_abs)},
                            {"silhouette", optional_number(m.metrics->silhouette)}};
    }
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
    }
    try {
        RunManifest m;
        m.config = config_from_json(j.at("config"));
        const json& d = j.at("dataset");
        m.source = d.at("source").get<std::string>();
        if (m.source == "file") {
            m.input_path = d.at("path").get<std::string>();
            m.input_sha256 = d.at("sha256").get<std::string>();
        } else {
            m.generator = d.at("generator").get<std::string>();
            m.generator_seed = d.at("seed").get<std::uint64_t>();
            m.rate_scale = d.at("rate_scale").get<double>();
        }
        m.seconds = j.at("seconds").get<double>();
        m.final_cost = j.at("final_cost").get<double>();
        m.iterations = j.at("iterations").get<std::size_t>();
        m.converged = j.at("converged").get<bool>();
        if (j.contains("metrics")) {
            const json& r = j.at("metrics");
            MetricReport report;
            report.method = r.at("method").get<std::string>();
            report.knn_accuracy = number_or_absent(r, "knn_accuracy");
            report.kmeans_ari = number_or_absent(r, "kmeans_ari");
            report.spearman_abs = number_or_absent(r, "spearman_abs");
            report.silhouette = number_or_absent(r, "silhouette");
            m.metrics = report;
        }
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest is missing a field: ") + e.what());
    }
}

namespace {

std::string optional_text(const std::optional<double>& v) {
    return v ? format_real(*v) : std::string{};
}

}  // namespace

std::string format_metrics_csv(const MetricReport& r) {
    return "method,knn_accuracy,kmeans_ari,spearman_abs,silhouette\n" + r.method + "," +
           optional_text(r.knn_accuracy) + "," + optional_text(r.kmeans_ari) + "," +
           optional_text(r.spearman_abs) + "," + optional_text(r.silhouette) + "\n";
}

std::string format_metrics_table(const MetricReport& r) {
    std::ostringstream out;
    auto line = [&](const char* name, const std::optional<double>& v) {
        out << std::left << std::setw(14) << name;
        if (v) {
            out << std::fixed << std::setprecision(4) << *v;
        } else {
            out << "-";
        }
        out << '\n';
    };
    out << "method        " << r.method << '\n';
    line("knn_accuracy", r.knn_accuracy);
    line("kmeans_ari", r.kmeans_ari);
    line("spearman_abs", r.spearman_abs);
    line("silhouette", r.silhouette);
    return out.str();
}

std::span<const std::string_view> categorical_palette() {
    static constexpr std::array<std::string_view, 10> palette{
        "#4E79A7", "#F28E2B", "#E15759", "#76B7B2", "#59A14F",
        "#EDC948", "#B07AA1", "#FF9DA7", "#9C755F", "#BAB0AC"};
    return palette;
}

std::string continuous_color(double fraction) {
    if (!std::isfinite(fraction)) {
        fraction = 0.0;
    }
    fraction = std::clamp(fraction, 0.0, 1.0);
    constexpr std::array<int, 3> low{0x44, 0x01, 0x54};
    constexpr std::array<int, 3> high{0xFD, 0xE7, 0x25};
    char buf[8];
    std::array<int, 3> rgb{};
    for (std::size_t i = 0; i < 3; ++i) {
        rgb[i] = static_cast<int>(std::lround(low[i] + (high[i] - low[i]) * fraction));
    }
    std::snprintf(buf, sizeof buf, "#%02X%02X%02X", rgb[0], rgb[1], rgb[2]);
    return buf;
}

std::string render_svg(const RealMatrix& coords, std::span<const double> values, ColorMode mode,
                       const PlotOptions& options) {
    if (coords.rows() == 0) {
        throw std::invalid_argument("cannot plot an empty embedding");
    }
    if (coords.cols() < 2) {
        throw std::invalid_argument("plotting needs at least 2 embedding dimensions");
    }
    if (values.size() != coords.rows()) {
        throw std::invalid_argument("color values do not match the number of samples");
    }

    double xmin = coords(0, 0), xmax = xmin, ymin = coords(0, 1), ymax = ymin;
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        xmin = std::min(xmin, coords(i, 0));
        xmax = std::max(xmax, coords(i, 0));
        ymin = std::min(ymin, coords(i, 1));
        ymax = std::max(ymax, coords(i, 1));
    }
    auto pad = [](double& lo, double& hi) {
        const double span = hi - lo;
        const double margin = span > 0.0 ? 0.05 * span : 0.5;
        lo -= margin;
        hi += margin;
    };
    pad(xmin, xmax);
    pad(ymin, ymax);

    const double vmin = *std::min_element(values.begin(), values.end());
    const double vmax = *std::max_element(values.begin(), values.end());
    const auto palette = categorical_palette();

    std::ostringstream out;
    out << std::setprecision(6);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        const double px = (coords(i, 0) - xmin) / (xmax - xmin) * options.width;
        // SVG y grows downwards
        const double py = (1.0 - (coords(i, 1) - ymin) / (ymax - ymin)) * options.height;
        std::string fill;
        if (mode == ColorMode::categorical) {
            const auto label = static_cast<long long>(std::llround(values[i]));
            const auto n = static_cast<long long>(palette.size());
            fill = std::string(palette[static_cast<std::size_t>(((label % n) + n) % n)]);
        } else {
            fill = continuous_color(vmax > vmin ? (values[i] - vmin) / (vmax - vmin) : 0.0);
        }
        out << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"" << options.radius << "\" fill=\"" << fill
            << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace psne::io
