#pragma once

#include "strad/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace strad {

// Multichannel series: values are M x d, one row per time point.
struct TimeSeries {
    MatrixXd values;
    std::optional<Labels> labels;
    std::string name;

    Index length() const { return values.rows(); }
    Index channels() const { return values.cols(); }
};

struct Window {
    MatrixXd data;  // t x d
    Index start = 0;
};

struct WindowSet {
    std::vector<Window> windows;
    Index window_length = 0;
    Index stride = 1;

    std::size_t size() const { return windows.size(); }
};

struct NormalizationStats {
    VectorXd mean;
    VectorXd std;
};

// Inclusive index range [start, end].
struct Segment {
    Index start = 0;
    Index end = 0;

    Index length() const { return end - start + 1; }
    friend bool operator==(const Segment&, const Segment&) = default;
};

inline constexpr double kStdFloor = 1e-8;

// Validates the TimeSeries invariants (finite values, label length/range).
void validate(const TimeSeries& series);

TimeSeries load_csv(const std::filesystem::path& path,
                    const std::vector<std::string>& value_columns,
                    const std::optional<std::string>& label_column = std::nullopt);

// Reads only the label column of a CSV file.
Labels load_labels(const std::filesystem::path& path, const std::string& label_column);

// Writes values (and labels, when present) in the format load_csv reads.
// Each entry of `comments` becomes a leading "# ..." line.
void write_csv(const TimeSeries& series,
               const std::filesystem::path& path,
               const std::vector<std::string>& value_columns,
               const std::string& label_column = "label",
               const std::vector<std::string>& comments = {});

NormalizationStats fit_normalization(const TimeSeries& series);
TimeSeries apply_normalization(const TimeSeries& series, const NormalizationStats& stats);

WindowSet sliding_windows(const TimeSeries& series, Index length, Index stride = 1);

std::vector<Segment> segments_from_labels(const Labels& labels);
Labels labels_from_segments(const std::vector<Segment>& segments, Index length);

} // namespace strad
