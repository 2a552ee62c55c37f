#include "agingkit/timeseries.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "agingkit/csv.hpp"
#include "agingkit/error.hpp"

namespace agingkit {

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string_view to_string(Orientation o) {
    return o == Orientation::HigherIsWorse ? "higher" : "lower";
}

Orientation parse_orientation(std::string_view text) {
    const auto s = lowercase(text);
    if (s == "higher" || s == "higherisworse") {
        return Orientation::HigherIsWorse;
    }
    if (s == "lower" || s == "lowerisworse") {
        return Orientation::LowerIsWorse;
    }
    throw InputError("unknown orientation '" + std::string(text) + "' (expected higher|lower)");
}

MetricSeries::MetricSeries(std::string name, std::string unit, Orientation orientation,
                           std::vector<Sample> samples)
    : name_(std::move(name)),
      unit_(std::move(unit)),
      orientation_(orientation),
      samples_(std::move(samples)) {
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!std::isfinite(s.t) || !std::isfinite(s.value)) {
            throw DomainError("sample " + std::to_string(i) + " is not finite");
        }
        if (s.t < 0.0) {
            throw DomainError("sample " + std::to_string(i) + " has negative time");
        }
        if (i > 0 && !(s.t > samples_[i - 1].t)) {
            throw DomainError("non-increasing timestamps at sample " + std::to_string(i));
        }
    }
}

std::vector<double> MetricSeries::times() const {
    std::vector<double> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) {
        out.push_back(s.t);
    }
    return out;
}

std::vector<double> MetricSeries::values() const {
    std::vector<double> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) {
        out.push_back(s.value);
    }
    return out;
}

MetricSeries MetricSeries::with_values(std::span<const double> values) const {
    if (values.size() != samples_.size()) {
        throw DomainError("value count does not match the time grid");
    }
    auto samples = samples_;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i].value = values[i];
    }
    return MetricSeries(name_, unit_, orientation_, std::move(samples));
}

MetricSeries parse_series(std::istream& in, std::string name, Orientation orientation,
                          std::string_view source) {
    std::string line;
    if (!csv::read_line(in, line)) {
        throw InputError(std::string(source) + ": empty input, expected header 't,value'");
    }
    // Tolerate a UTF-8 byte order mark on the header.
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) {
        line.erase(0, 3);
    }
    const auto header = csv::split_fields(line);
    if (header.size() != 2 || header[0] != "t" || header[1] != "value") {
        throw InputError(std::string(source) + ": line 1: expected header 't,value'");
    }

    std::vector<Sample> samples;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = csv::split_fields(line);
        const auto where = std::string(source) + ": line " + std::to_string(line_no);
        if (fields.size() != 2) {
            throw InputError(where + ": malformed row, expected 2 fields");
        }
        const auto t = csv::parse_number(fields[0]);
        const auto v = csv::parse_number(fields[1]);
        if (!t || !v) {
            throw InputError(where + ": malformed row, expected two numbers");
        }
        if (*t < 0.0) {
            throw DomainError(where + ": negative timestamp");
        }
        if (!samples.empty() && !(*t > samples.back().t)) {
            throw DomainError(where + ": non-increasing timestamps");
        }
        samples.push_back({*t, *v});
    }
    return MetricSeries(std::move(name), "", orientation, std::move(samples));
}

MetricSeries load_series(const std::filesystem::path& path, std::string name,
                         Orientation orientation) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path.string() + "'");
    }
    return parse_series(in, std::move(name), orientation, path.string());
}

void write_series(std::ostream& out, const MetricSeries& series) {
    out << "t,value\n";
    for (const auto& s : series.samples()) {
        out << csv::format_number(s.t) << ',' << csv::format_number(s.value) << '\n';
    }
}

MetricSeries rescale_time(const MetricSeries& series, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw DomainError("time scale factor must be positive");
    }
    std::vector<Sample> samples(series.samples().begin(), series.samples().end());
    for (auto& s : samples) {
        s.t *= factor;
    }
    return MetricSeries(series.name(), series.unit(), series.orientation(), std::move(samples));
}

}  // namespace agingkit
