#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace agingkit {

/// Which direction of a metric means "more aged".
enum class Orientation {
    HigherIsWorse,  // memory consumption, response time
    LowerIsWorse,   // bandwidth per player
};

std::string_view to_string(Orientation o);
/// Accepts "higher", "lower", "HigherIsWorse", "LowerIsWorse" (case-insensitive).
Orientation parse_orientation(std::string_view text);

struct Sample {
    double t = 0.0;
    double value = 0.0;

    friend bool operator==(const Sample&, const Sample&) = default;
};

/// Ordered samples of one raw server metric.
///
/// Construction validates the invariants: every t is finite and
/// nonnegative, t is strictly increasing, and every value is finite.
/// The object is immutable afterwards.
class MetricSeries {
public:
    MetricSeries(std::string name, std::string unit, Orientation orientation,
                 std::vector<Sample> samples);

    const std::string& name() const noexcept { return name_; }
    const std::string& unit() const noexcept { return unit_; }
    Orientation orientation() const noexcept { return orientation_; }
    std::span<const Sample> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }

    std::vector<double> times() const;
    std::vector<double> values() const;

    /// Same metadata and time grid, new values. Sizes must match.
    MetricSeries with_values(std::span<const double> values) const;

    friend bool operator==(const MetricSeries&, const MetricSeries&) = default;

private:
    std::string name_;
    std::string unit_;
    Orientation orientation_;
    std::vector<Sample> samples_;
};

/// Parses the `t,value` CSV format. `source` names the stream in messages.
MetricSeries parse_series(std::istream& in, std::string name, Orientation orientation,
                          std::string_view source = "<stream>");

MetricSeries load_series(const std::filesystem::path& path, std::string name,
                         Orientation orientation);

/// Writes the `t,value` CSV format with shortest round-trip number formatting,
/// so that load(write(s)) == s.
void write_series(std::ostream& out, const MetricSeries& series);

/// Multiplies every timestamp by `factor` (> 0). Values are untouched.
MetricSeries rescale_time(const MetricSeries& series, double factor);

inline constexpr double kSecondsToHours = 1.0 / 3600.0;

}  // namespace agingkit
