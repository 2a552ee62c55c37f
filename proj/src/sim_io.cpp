#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <variant>

#include "agingkit/csv.hpp"
#include "agingkit/error.hpp"
#include "agingkit/simulator.hpp"

namespace agingkit::sim {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::optional<long long> parse_integer(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    long long v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
        return std::nullopt;
    }
    return v;
}

struct ConfigKey {
    const char* name;
    std::variant<double SimConfig::*, int SimConfig::*> field;
    const char* help;
};

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"catalog_files", &SimConfig::catalog_files, "media files on the server"},
        {"total_memory_mb", &SimConfig::total_memory_mb, "physical memory available to the server"},
        {"base_block_kb", &SimConfig::base_block_kb, "disk read block size at start and after a reset"},
        {"max_block_kb", &SimConfig::max_block_kb, "largest disk read block size"},
        {"bandwidth_nominal_kbyte", &SimConfig::bandwidth_nominal_kbyte, "per-player bandwidth of a fresh server"},
        {"bandwidth_fail_kbyte", &SimConfig::bandwidth_fail_kbyte, "per-player bandwidth below which frames are lost"},
        {"capacity_clients", &SimConfig::capacity_clients, "clients admitted at most"},
        {"refcount_threshold", &SimConfig::refcount_threshold, "reaper reclaims blocks at or below this refcount"},
        {"process_base_mb", &SimConfig::process_base_mb, "resident memory of the server without cache"},
        {"initial_cached_files", &SimConfig::initial_cached_files, "files cached at tick 0"},
        {"stream_duration_ms", &SimConfig::stream_duration_ms, "playback time of one request"},
        {"cache_growth_mb", &SimConfig::cache_growth_mb, "memory loaded per uncached request"},
        {"leak_fraction", &SimConfig::leak_fraction, "share of an evicted file left behind as SFR"},
        {"disk_ops_per_miss", &SimConfig::disk_ops_per_miss, "disk queue arrivals per miss at base block size"},
        {"queue_service_rate", &SimConfig::queue_service_rate, "queue entries served per tick at unit latency"},
        {"queue_half_depth", &SimConfig::queue_half_depth, "queue depth at which service throughput doubles"},
        {"latency_gain", &SimConfig::latency_gain, "per-read latency added per unit memory utilization"},
        {"block_trigger_ratio", &SimConfig::block_trigger_ratio, "latency above which the block size doubles"},
        {"block_trigger_step", &SimConfig::block_trigger_step, "latency budget added per doubling already taken"},
        {"backlog_gain", &SimConfig::backlog_gain, "MB of SFR per queued entry per tick"},
        {"queue_buffer_mb", &SimConfig::queue_buffer_mb, "resident MB per queued entry"},
        {"reclaim_rate", &SimConfig::reclaim_rate, "share of eligible SFR reclaimed per tick"},
        {"reclaim_cap_mb", &SimConfig::reclaim_cap_mb, "reaper throughput ceiling per tick"},
        {"refcount_scale", &SimConfig::refcount_scale, "spread of block reference counts"},
        {"bandwidth_queue_gain", &SimConfig::bandwidth_queue_gain, "bandwidth loss per queued entry"},
        {"bandwidth_memory_gain", &SimConfig::bandwidth_memory_gain, "bandwidth loss at full memory pressure"},
        {"pressure_knee_mb", &SimConfig::pressure_knee_mb, "working set below which memory costs no bandwidth"},
        {"trigger_window_ticks", &SimConfig::trigger_window_ticks, "span of the trailing bandwidth average"},
    };
    return keys;
}

std::string column_unit(std::string_view column) {
    if (column.ends_with("_mb")) {
        return "MB";
    }
    if (column.ends_with("_kb")) {
        return "KB";
    }
    if (column.ends_with("_kbyte")) {
        return "kbyte";
    }
    return "";
}

}  // namespace

// ---------------------------------------------------------------------------
// Workload

void WorkloadSpec::validate(const SimConfig& cfg) const {
    if (client_count < 0) {
        throw DomainError("client_count must be nonnegative");
    }
    if (client_count > cfg.capacity_clients) {
        throw DomainError("client_count " + std::to_string(client_count) + " exceeds capacity " +
                          std::to_string(cfg.capacity_clients));
    }
    if (file_object < 1 || file_object > cfg.catalog_files) {
        throw DomainError("file_object must lie in [1, " + std::to_string(cfg.catalog_files) + "]");
    }
    if (file_max_object < 1 || file_max_object > file_object) {
        throw DomainError("file_max_object must lie in [1, file_object]");
    }
    if (sleep_time_ms < 0) {
        throw DomainError("sleep_time must be nonnegative");
    }
}

WorkloadSpec parse_workload(std::string_view text) {
    std::string cleaned;
    for (char c : text) {
        if (c != '(' && c != ')' && c != ' ' && c != '\t') {
            cleaned.push_back(c);
        }
    }
    const auto fields = csv::split_fields(cleaned);
    if (fields.size() != 6) {
        throw InputError("workload tuple needs 6 comma-separated integers, got '" + std::string(text) + "'");
    }
    std::array<int, 6> v{};
    for (std::size_t i = 0; i < 6; ++i) {
        const auto parsed = parse_integer(fields[i]);
        if (!parsed || *parsed < std::numeric_limits<int>::min() || *parsed > std::numeric_limits<int>::max()) {
            throw InputError("workload field " + std::to_string(i + 1) + " is not an integer: '" +
                             std::string(fields[i]) + "'");
        }
        v[i] = static_cast<int>(*parsed);
    }
    if (v[1] < 0 || v[1] > 3) {
        throw InputError("file_dist must be 0, 1, 2 or 3");
    }
    if (v[5] < 0 || v[5] > 1) {
        throw InputError("file_difference must be 0 or 1");
    }
    return {v[0], static_cast<FileDistribution>(v[1]), v[2], v[3], v[4], static_cast<FileDifference>(v[5])};
}

std::string format_workload(const WorkloadSpec& load) {
    return std::to_string(load.client_count) + ',' + std::to_string(static_cast<int>(load.file_dist)) + ',' +
           std::to_string(load.file_object) + ',' + std::to_string(load.file_max_object) + ',' +
           std::to_string(load.sleep_time_ms) + ',' + std::to_string(static_cast<int>(load.file_difference));
}

// ---------------------------------------------------------------------------
// Config

void SimConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw DomainError(std::string("simulator config: ") + what);
        }
    };
    require(catalog_files >= 1, "catalog_files must be positive");
    require(total_memory_mb > 0.0, "total_memory_mb must be positive");
    require(base_block_kb > 0.0 && base_block_kb <= max_block_kb, "need 0 < base_block_kb <= max_block_kb");
    require(bandwidth_nominal_kbyte > 0.0, "bandwidth_nominal_kbyte must be positive");
    require(bandwidth_fail_kbyte > 0.0 && bandwidth_fail_kbyte < bandwidth_nominal_kbyte,
            "need 0 < bandwidth_fail_kbyte < bandwidth_nominal_kbyte");
    require(capacity_clients >= 1, "capacity_clients must be positive");
    require(refcount_threshold >= 0, "refcount_threshold must be nonnegative");
    require(process_base_mb >= 0.0, "process_base_mb must be nonnegative");
    require(initial_cached_files >= 0 && initial_cached_files <= catalog_files,
            "initial_cached_files must lie in [0, catalog_files]");
    require(stream_duration_ms > 0.0, "stream_duration_ms must be positive");
    require(cache_growth_mb >= 0.0, "cache_growth_mb must be nonnegative");
    require(leak_fraction >= 0.0 && leak_fraction <= 1.0, "leak_fraction must lie in [0, 1]");
    require(disk_ops_per_miss >= 0.0, "disk_ops_per_miss must be nonnegative");
    require(queue_service_rate >= 0.0, "queue_service_rate must be nonnegative");
    require(queue_half_depth > 0.0, "queue_half_depth must be positive");
    require(latency_gain >= 0.0, "latency_gain must be nonnegative");
    require(block_trigger_ratio > 0.0, "block_trigger_ratio must be positive");
    require(block_trigger_step >= 0.0, "block_trigger_step must be nonnegative");
    require(backlog_gain >= 0.0, "backlog_gain must be nonnegative");
    require(queue_buffer_mb >= 0.0, "queue_buffer_mb must be nonnegative");
    require(reclaim_rate >= 0.0 && reclaim_rate <= 1.0, "reclaim_rate must lie in [0, 1]");
    require(reclaim_cap_mb >= 0.0, "reclaim_cap_mb must be nonnegative");
    require(refcount_scale >= 0.0, "refcount_scale must be nonnegative");
    require(bandwidth_queue_gain >= 0.0, "bandwidth_queue_gain must be nonnegative");
    require(bandwidth_memory_gain >= 0.0, "bandwidth_memory_gain must be nonnegative");
    require(pressure_knee_mb >= 0.0 && pressure_knee_mb < total_memory_mb,
            "need 0 <= pressure_knee_mb < total_memory_mb");
    require(trigger_window_ticks >= 1, "trigger_window_ticks must be positive");
    require(process_base_mb + initial_cached_files * cache_growth_mb <= total_memory_mb,
            "initial working set exceeds total_memory_mb");
}

SimConfig parse_sim_config(std::istream& in, std::string_view source) {
    SimConfig cfg;
    std::string line;
    int line_no = 0;
    auto where = [&] { return std::string(source) + ":" + std::to_string(line_no) + ": "; };
    while (csv::read_line(in, line)) {
        ++line_no;
        std::string_view body = line;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) {
            body = body.substr(0, hash);
        }
        body = trim(body);
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw InputError(where() + "expected 'key = value'");
        }
        const auto key = trim(body.substr(0, eq));
        const auto value = trim(body.substr(eq + 1));
        const auto& keys = config_keys();
        const auto it = std::find_if(keys.begin(), keys.end(), [&](const ConfigKey& k) { return key == k.name; });
        if (it == keys.end()) {
            throw InputError(where() + "unknown key '" + std::string(key) + "'");
        }
        if (const auto* dfield = std::get_if<double SimConfig::*>(&it->field)) {
            const auto v = csv::parse_number(value);
            if (!v) {
                throw InputError(where() + "'" + std::string(value) + "' is not a number");
            }
            cfg.*(*dfield) = *v;
        } else {
            const auto v = parse_integer(value);
            if (!v || *v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
                throw InputError(where() + "'" + std::string(value) + "' is not an integer");
            }
            cfg.*std::get<int SimConfig::*>(it->field) = static_cast<int>(*v);
        }
    }
    return cfg;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open config " + path.string());
    }
    return parse_sim_config(in, path.string());
}

void write_sim_config(std::ostream& out, const SimConfig& cfg) {
    for (const auto& k : config_keys()) {
        out << "# " << k.help << '\n' << k.name << " = ";
        if (const auto* dfield = std::get_if<double SimConfig::*>(&k.field)) {
            out << csv::format_number(cfg.*(*dfield));
        } else {
            out << cfg.*std::get<int SimConfig::*>(k.field);
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Policy

RejuvenationPolicy RejuvenationPolicy::none() { return {}; }

RejuvenationPolicy RejuvenationPolicy::cache_hit_admission(double trigger) {
    return {Kind::CacheHitAdmission, 1.0, 0, trigger};
}

RejuvenationPolicy RejuvenationPolicy::probabilistic_admission(double p, double trigger) {
    return {Kind::ProbabilisticAdmission, p, 0, trigger};
}

RejuvenationPolicy RejuvenationPolicy::disk_block_reset(double trigger) {
    return {Kind::DiskBlockReset, 1.0, 0, trigger};
}

RejuvenationPolicy RejuvenationPolicy::mem_reap_enlarge(int refcount, double trigger) {
    return {Kind::MemReapEnlarge, 1.0, refcount, trigger};
}

void RejuvenationPolicy::validate() const {
    if (!(trigger_threshold > 0.0 && trigger_threshold <= 1.0)) {
        throw DomainError("trigger threshold must lie in (0, 1]");
    }
    if (!(probability >= 0.0 && probability <= 1.0)) {
        throw DomainError("admission probability must lie in [0, 1]");
    }
    if (kind == Kind::MemReapEnlarge && refcount < 1) {
        throw DomainError("memreap refcount must be positive");
    }
}

RejuvenationPolicy parse_policy(std::string_view text, double trigger_threshold) {
    text = trim(text);
    const auto colon = text.find(':');
    const auto name = text.substr(0, colon);
    const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    const bool has_arg = colon != std::string_view::npos;

    auto no_arg = [&](RejuvenationPolicy p) {
        if (has_arg) {
            throw InputError("policy '" + std::string(name) + "' takes no argument");
        }
        return p;
    };

    RejuvenationPolicy policy;
    if (name == "none") {
        policy = no_arg(RejuvenationPolicy::none());
        policy.trigger_threshold = trigger_threshold;
    } else if (name == "cache-hit") {
        policy = no_arg(RejuvenationPolicy::cache_hit_admission(trigger_threshold));
    } else if (name == "block-reset") {
        policy = no_arg(RejuvenationPolicy::disk_block_reset(trigger_threshold));
    } else if (name == "probabilistic") {
        const auto p = csv::parse_number(arg);
        if (!has_arg || !p) {
            throw InputError("policy 'probabilistic' needs a probability, e.g. probabilistic:0.3");
        }
        policy = RejuvenationPolicy::probabilistic_admission(*p, trigger_threshold);
    } else if (name == "memreap") {
        const auto r = parse_integer(arg);
        if (!has_arg || !r || *r > std::numeric_limits<int>::max() || *r < std::numeric_limits<int>::min()) {
            throw InputError("policy 'memreap' needs an integer refcount, e.g. memreap:15");
        }
        policy = RejuvenationPolicy::mem_reap_enlarge(static_cast<int>(*r), trigger_threshold);
    } else {
        throw InputError("unknown policy '" + std::string(text) +
                         "' (expected none, cache-hit, probabilistic:P, block-reset, memreap:N)");
    }
    policy.validate();
    return policy;
}

std::string format_policy(const RejuvenationPolicy& policy) {
    using Kind = RejuvenationPolicy::Kind;
    switch (policy.kind) {
        case Kind::None:
            return "none";
        case Kind::CacheHitAdmission:
            return "cache-hit";
        case Kind::ProbabilisticAdmission:
            return "probabilistic:" + csv::format_number(policy.probability);
        case Kind::DiskBlockReset:
            return "block-reset";
        case Kind::MemReapEnlarge:
            return "memreap:" + std::to_string(policy.refcount);
    }
    return "none";
}

// ---------------------------------------------------------------------------
// Trace

void write_trace(std::ostream& out, const SimTrace& trace) {
    out << kTraceHeader << '\n';
    for (const auto& s : trace) {
        out << s.tick << ',' << csv::format_number(s.cache_mb) << ',' << csv::format_number(s.working_set_mb)
            << ',' << csv::format_number(s.disk_queue_len) << ',' << csv::format_number(s.block_kb) << ','
            << csv::format_number(s.bandwidth_kbyte) << ',' << csv::format_number(s.sfr_mb) << '\n';
    }
}

std::vector<TraceRecord> parse_trace(std::istream& in, std::string_view source) {
    std::string line;
    int line_no = 0;
    auto where = [&] { return std::string(source) + ":" + std::to_string(line_no) + ": "; };
    if (!csv::read_line(in, line)) {
        throw InputError(std::string(source) + ": empty trace file");
    }
    ++line_no;
    std::string_view header = line;
    if (header.starts_with("\xEF\xBB\xBF")) {
        header.remove_prefix(3);
    }
    std::string joined;
    for (const auto f : csv::split_fields(header)) {
        joined += joined.empty() ? "" : ",";
        joined += f;
    }
    if (joined != kTraceHeader) {
        throw InputError(where() + "expected header '" + std::string(kTraceHeader) + "'");
    }
    std::vector<TraceRecord> records;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = csv::split_fields(line);
        if (fields.size() != 7) {
            throw InputError(where() + "expected 7 fields, got " + std::to_string(fields.size()));
        }
        TraceRecord r;
        const auto tick = parse_integer(fields[0]);
        if (!tick) {
            throw InputError(where() + "tick is not an integer");
        }
        r.tick = *tick;
        double* targets[] = {&r.cache_mb, &r.working_set_mb, &r.disk_queue_len, &r.block_kb, &r.bandwidth_kbyte,
                             &r.sfr_mb};
        for (std::size_t i = 0; i < 6; ++i) {
            const auto v = csv::parse_number(fields[i + 1]);
            if (!v) {
                throw InputError(where() + "field " + std::to_string(i + 2) + " is not a number");
            }
            *targets[i] = *v;
        }
        records.push_back(r);
    }
    return records;
}

const std::vector<std::string>& trace_columns() {
    static const std::vector<std::string> columns = {"cache_mb",        "working_set_mb", "disk_queue_len",
                                                     "block_kb",        "bandwidth_kbyte", "sfr_mb"};
    return columns;
}

MetricSeries trace_column(std::span<const TraceRecord> records, std::string_view column) {
    double TraceRecord::*field = nullptr;
    if (column == "cache_mb") {
        field = &TraceRecord::cache_mb;
    } else if (column == "working_set_mb") {
        field = &TraceRecord::working_set_mb;
    } else if (column == "disk_queue_len") {
        field = &TraceRecord::disk_queue_len;
    } else if (column == "block_kb") {
        field = &TraceRecord::block_kb;
    } else if (column == "bandwidth_kbyte") {
        field = &TraceRecord::bandwidth_kbyte;
    } else if (column == "sfr_mb") {
        field = &TraceRecord::sfr_mb;
    } else {
        throw InputError("unknown trace column '" + std::string(column) + "'");
    }
    std::vector<Sample> samples;
    samples.reserve(records.size());
    for (const auto& r : records) {
        samples.push_back({static_cast<double>(r.tick) * kTickSeconds, r.*field});
    }
    const auto orientation = column == "bandwidth_kbyte" ? Orientation::LowerIsWorse : Orientation::HigherIsWorse;
    return MetricSeries(std::string(column), column_unit(column), orientation, std::move(samples));
}

}  // namespace agingkit::sim
