#include "strad/timeseries.hpp"

#include "strad/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace strad {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        cells.push_back(trim(std::string_view(line).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return cells;
}

bool parse_double(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool is_skippable(const std::string& line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

} // namespace

void validate(const TimeSeries& series) {
    if (series.length() < 1 || series.channels() < 1) {
        throw InvalidArgumentError("time series must have at least one point and one channel");
    }
    if (!series.values.allFinite()) {
        throw NonFiniteValueError("time series '" + series.name + "' contains non-finite values");
    }
    if (series.labels) {
        if (static_cast<Index>(series.labels->size()) != series.length()) {
            throw ShapeMismatchError("label count does not match series length");
        }
        for (std::size_t i = 0; i < series.labels->size(); ++i) {
            if ((*series.labels)[i] > 1) throw NonBinaryLabelError(i, std::to_string((*series.labels)[i]));
        }
    }
}

TimeSeries load_csv(const std::filesystem::path& path,
                    const std::vector<std::string>& value_columns,
                    const std::optional<std::string>& label_column) {
    std::ifstream in(path);
    if (!in) throw MissingFileError(path.string());
    if (value_columns.empty() && !label_column) throw InvalidArgumentError("no columns requested");

    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (is_skippable(line)) continue;
        header = split_row(line);
        break;
    }
    if (header.empty()) throw MissingColumnError(value_columns.empty() ? *label_column : value_columns.front());

    auto column_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw MissingColumnError(name);
    };
    std::vector<std::size_t> value_idx;
    for (const auto& c : value_columns) value_idx.push_back(column_index(c));
    std::optional<std::size_t> label_idx;
    if (label_column) label_idx = column_index(*label_column);

    std::vector<double> flat;
    Labels labels;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (is_skippable(line)) continue;
        const auto cells = split_row(line);
        for (std::size_t k = 0; k < value_idx.size(); ++k) {
            const auto idx = value_idx[k];
            const std::string cell = idx < cells.size() ? cells[idx] : std::string();
            double v = 0.0;
            if (!parse_double(cell, v)) throw NonNumericCellError(row, value_columns[k], cell);
            if (!std::isfinite(v)) {
                throw NonFiniteValueError("non-finite value at row " + std::to_string(row) + ", column " + value_columns[k]);
            }
            flat.push_back(v);
        }
        if (label_idx) {
            const std::string cell = *label_idx < cells.size() ? cells[*label_idx] : std::string();
            if (cell == "0") {
                labels.push_back(0);
            } else if (cell == "1") {
                labels.push_back(1);
            } else {
                throw NonBinaryLabelError(row, cell);
            }
        }
        ++row;
    }
    if (row == 0) throw InvalidArgumentError("no data rows in " + path.string());

    TimeSeries series;
    series.name = path.stem().string();
    const auto d = static_cast<Index>(value_columns.size());
    series.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        flat.data(), static_cast<Index>(row), d);
    if (label_idx) series.labels = std::move(labels);
    return series;
}

Labels load_labels(const std::filesystem::path& path, const std::string& label_column) {
    return *load_csv(path, {}, label_column).labels;
}

void write_csv(const TimeSeries& series,
               const std::filesystem::path& path,
               const std::vector<std::string>& value_columns,
               const std::string& label_column,
               const std::vector<std::string>& comments) {
    if (static_cast<Index>(value_columns.size()) != series.channels()) {
        throw ShapeMismatchError("column name count does not match channel count");
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& c : comments) out << "# " << c << '\n';
    for (std::size_t c = 0; c < value_columns.size(); ++c) {
        out << (c ? "," : "") << value_columns[c];
    }
    if (series.labels) out << ',' << label_column;
    out << '\n';
    char buf[32];
    for (Index i = 0; i < series.length(); ++i) {
        for (Index c = 0; c < series.channels(); ++c) {
            const auto res = std::to_chars(buf, buf + sizeof(buf), series.values(i, c));
            out << (c ? "," : "") << std::string_view(buf, res.ptr - buf);
        }
        if (series.labels) out << ',' << static_cast<int>((*series.labels)[i]);
        out << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
}

NormalizationStats fit_normalization(const TimeSeries& series) {
    validate(series);
    const auto m = static_cast<double>(series.length());
    NormalizationStats stats;
    stats.mean = series.values.colwise().mean().transpose();
    stats.std.resize(series.channels());
    for (Index c = 0; c < series.channels(); ++c) {
        const double var = (series.values.col(c).array() - stats.mean(c)).square().sum() / m;
        stats.std(c) = std::max(std::sqrt(var), kStdFloor);
    }
    return stats;
}

TimeSeries apply_normalization(const TimeSeries& series, const NormalizationStats& stats) {
    if (stats.mean.size() != series.channels() || stats.std.size() != series.channels()) {
        throw ShapeMismatchError("normalization stats have " + std::to_string(stats.mean.size()) +
                                 " channels, series has " + std::to_string(series.channels()));
    }
    TimeSeries out = series;
    out.values = ((series.values.rowwise() - stats.mean.transpose()).array().rowwise() /
                  stats.std.transpose().array()).matrix();
    return out;
}

WindowSet sliding_windows(const TimeSeries& series, Index length, Index stride) {
    if (length < 1) throw InvalidArgumentError("window length must be positive");
    if (stride < 1) throw InvalidArgumentError("stride must be positive");
    if (length > series.length()) {
        throw InvalidArgumentError("window length " + std::to_string(length) + " exceeds series length " +
                                   std::to_string(series.length()));
    }
    WindowSet set;
    set.window_length = length;
    set.stride = stride;
    const Index count = (series.length() - length) / stride + 1;
    set.windows.reserve(static_cast<std::size_t>(count));
    for (Index k = 0; k < count; ++k) {
        const Index start = k * stride;
        set.windows.push_back(Window{series.values.middleRows(start, length), start});
    }
    return set;
}

std::vector<Segment> segments_from_labels(const Labels& labels) {
    std::vector<Segment> segments;
    const auto n = static_cast<Index>(labels.size());
    Index i = 0;
    while (i < n) {
        if (labels[i]) {
            Index j = i;
            while (j + 1 < n && labels[j + 1]) ++j;
            segments.push_back({i, j});
            i = j + 1;
        } else {
            ++i;
        }
    }
    return segments;
}

Labels labels_from_segments(const std::vector<Segment>& segments, Index length) {
    Labels labels(static_cast<std::size_t>(length), 0);
    for (const auto& s : segments) {
        if (s.start < 0 || s.end >= length || s.start > s.end) {
            throw InvalidArgumentError("segment out of range");
        }
        for (Index i = s.start; i <= s.end; ++i) labels[i] = 1;
    }
    return labels;
}

} // namespace strad
