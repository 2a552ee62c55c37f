#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agingkit/normalize.hpp"
#include "agingkit/smoothing.hpp"

// Discrete-time model of software-free-radical (SFR) accumulation in a
// caching media server.
//
// Positive loop: cache misses -> disk reads -> memory pressure -> per-read
// latency -> larger disk blocks -> longer disk queue -> queued backlog held
// in memory -> more SFR.
// Negative loop: the reaper reclaims SFR blocks whose reference count is at
// or below a threshold, at a bounded rate.
namespace agingkit::sim {

/// Simulated seconds per tick; matches 15-second metric sampling.
inline constexpr double kTickSeconds = 15.0;

enum class FileDistribution { Random = 0, Sequential = 1, Poisson = 2, SingleFile = 3 };
enum class FileDifference { Different = 0, Same = 1 };

struct SimConfig;

/// Six-field workload tuple
/// (client_count, file_dist, file_object, file_max_object, sleep_time, file_difference).
struct WorkloadSpec {
    int client_count = 0;
    FileDistribution file_dist = FileDistribution::Random;
    int file_object = 1;       // files clients may request
    int file_max_object = 1;   // distinct files held concurrently
    int sleep_time_ms = 0;     // gap between two requests of a client
    FileDifference file_difference = FileDifference::Different;

    void validate(const SimConfig& cfg) const;
    friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

/// Parses "600,0,100,20,1000,0" (parentheses and spaces allowed).
/// Throws InputError for malformed text; does not check domain limits.
WorkloadSpec parse_workload(std::string_view text);
std::string format_workload(const WorkloadSpec& load);

inline const WorkloadSpec kWorkloadL1{600, FileDistribution::Random, 20, 20, 1000, FileDifference::Different};
inline const WorkloadSpec kWorkloadL2{600, FileDistribution::Random, 100, 20, 1000, FileDifference::Different};

struct SimConfig {
    // Resources and limits.
    int catalog_files = 100;
    double total_memory_mb = 1100.0;
    double base_block_kb = 4.0;
    double max_block_kb = 16.0;
    double bandwidth_nominal_kbyte = 120.0;
    double bandwidth_fail_kbyte = 30.0;
    int capacity_clients = 900;
    int refcount_threshold = 0;

    // Starting point.
    double process_base_mb = 520.0;
    int initial_cached_files = 16;

    // Request generation.
    double stream_duration_ms = 899000.0;

    // Couplings.
    double cache_growth_mb = 5.0;        // memory loaded per uncached request
    double leak_fraction = 0.0035;       // share of an evicted file left behind as SFR
    double disk_ops_per_miss = 0.1;      // queue arrivals per miss at base block size
    double queue_service_rate = 1.3;     // queue entries served per tick at unit latency
    double queue_half_depth = 94.0;      // depth at which service throughput doubles
    double latency_gain = 1.0;           // per-read latency per unit memory utilization
    double block_trigger_ratio = 1.75;   // latency above which the block size doubles
    double block_trigger_step = 0.05;    // budget added per doubling already taken
    double backlog_gain = 0.0007;        // MB of SFR per queued entry per tick
    double queue_buffer_mb = 0.2;        // resident MB per queued entry
    double reclaim_rate = 0.05;          // share of eligible SFR reclaimed per tick
    double reclaim_cap_mb = 9.6;         // reaper throughput ceiling per tick
    double refcount_scale = 127.0;       // spread of block reference counts
    double bandwidth_queue_gain = 0.008;
    double bandwidth_memory_gain = 2.0;
    double pressure_knee_mb = 620.0;     // working set below which memory costs no bandwidth
    int trigger_window_ticks = 200;      // span of the trailing bandwidth average

    void validate() const;
    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Flat `key = value` text, '#' starts a comment. Keys not present keep
/// their defaults. Unknown keys and malformed numbers raise InputError.
SimConfig parse_sim_config(std::istream& in, std::string_view source = "<stream>");
SimConfig load_sim_config(const std::filesystem::path& path);
/// Every key with its value and a one-line description.
void write_sim_config(std::ostream& out, const SimConfig& cfg);

struct RejuvenationPolicy {
    enum class Kind { None, CacheHitAdmission, ProbabilisticAdmission, DiskBlockReset, MemReapEnlarge };

    Kind kind = Kind::None;
    double probability = 1.0;  // ProbabilisticAdmission only
    int refcount = 0;          // MemReapEnlarge only
    /// Aging degree (1 - trailing bandwidth / nominal) that activates the policy.
    double trigger_threshold = 1.0;

    static RejuvenationPolicy none();
    static RejuvenationPolicy cache_hit_admission(double trigger);
    static RejuvenationPolicy probabilistic_admission(double p, double trigger);
    static RejuvenationPolicy disk_block_reset(double trigger);
    static RejuvenationPolicy mem_reap_enlarge(int refcount, double trigger);

    void validate() const;
    friend bool operator==(const RejuvenationPolicy&, const RejuvenationPolicy&) = default;
};

/// "none", "cache-hit", "probabilistic:P", "block-reset", "memreap:N".
RejuvenationPolicy parse_policy(std::string_view text, double trigger_threshold);
std::string format_policy(const RejuvenationPolicy& policy);

/// Seeded source for all randomness in a run. Draws are built from raw
/// mt19937_64 output so a seed reproduces the same stream on every platform.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    double uniform();                       // [0, 1)
    std::size_t below(std::size_t n);       // uniform in [0, n)
    std::uint64_t poisson(double mean);

private:
    std::mt19937_64 engine_;
};

/// The exported per-tick metrics.
struct TraceRecord {
    std::int64_t tick = 0;
    double cache_mb = 0.0;
    double working_set_mb = 0.0;
    double disk_queue_len = 0.0;
    double block_kb = 0.0;
    double bandwidth_kbyte = 0.0;
    double sfr_mb = 0.0;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct SimState {
    std::int64_t tick = 0;
    double cache_mb = 0.0;
    double working_set_mb = 0.0;
    double disk_queue_len = 0.0;
    double block_kb = 0.0;
    double bandwidth_kbyte = 0.0;
    double sfr_mb = 0.0;

    // Bookkeeping carried between ticks.
    double trailing_bandwidth_kbyte = 0.0;
    std::uint64_t access_clock = 0;
    std::uint32_t sequential_cursor = 0;
    /// Per catalog file: 0 when uncached, otherwise the LRU stamp of the last access.
    std::vector<std::uint64_t> last_access;

    // Diagnostics of the tick that produced this state.
    int admitted_clients = 0;
    std::uint64_t admitted_requests = 0;
    std::uint64_t rejected_requests = 0;
    bool policy_active = false;

    TraceRecord record() const;
    /// Throws DomainError on an invariant violation.
    void validate(const SimConfig& cfg) const;

    friend bool operator==(const SimState&, const SimState&) = default;
};

using SimTrace = std::vector<SimState>;

/// Files 0..initial_cached_files-1 cached, empty queue, base block size.
SimState initial_state(const SimConfig& cfg);

/// Counts produced by the request phase of a tick.
struct StepDrivers {
    std::uint64_t uncached_requests = 0;
    std::uint64_t evicted_files = 0;
};

// One-step couplings, exposed for paired sign checks.
double working_set_for(double cache_mb, double disk_queue_len, const SimConfig& cfg);
double read_latency(double working_set_mb, const SimConfig& cfg);
double block_budget(double block_kb, const SimConfig& cfg);
double next_queue_length(double queue, double arrivals, double latency, const SimConfig& cfg);
double reclaim_eligible_fraction(int refcount_threshold, const SimConfig& cfg);
double bandwidth_for(double disk_queue_len, double working_set_mb, const SimConfig& cfg);
double aging_degree_now(const SimState& state, const SimConfig& cfg);

/// Deterministic loop updates for given request-phase counts. Does not
/// advance the tick.
SimState apply_loops(const SimState& state, const StepDrivers& drivers, const SimConfig& cfg,
                     int refcount_threshold);

/// Advances one tick: evaluates the policy trigger, applies the policy,
/// draws requests from `rng`, then runs the feedback loops.
SimState step(const SimState& state, const WorkloadSpec& load, const SimConfig& cfg,
              const RejuvenationPolicy& policy, RandomStream& rng);

/// Trace of ticks+1 states starting at initial_state(cfg).
SimTrace run(const SimConfig& cfg, const WorkloadSpec& load, const RejuvenationPolicy& policy,
             std::int64_t ticks, std::uint64_t seed);

struct PolicyExperiment {
    SimTrace before;  // ticks 0..rejuvenation_tick, no policy
    SimTrace after;   // ticks rejuvenation_tick+1..ticks, given policy
    std::int64_t rejuvenation_tick = 0;

    /// before followed by after.
    SimTrace joined() const;
};

PolicyExperiment apply_policy_experiment(const SimConfig& cfg, const WorkloadSpec& load,
                                         const RejuvenationPolicy& policy, std::int64_t ticks,
                                         std::int64_t rejuvenation_tick, std::uint64_t seed);

/// Bandwidth aging degree: t in hours, LOWESS, lower-is-worse normalization.
AgingCurve aging_degree(const SimTrace& trace, const SimConfig& cfg,
                        const SmoothingConfig& smoothing = {});

inline constexpr const char* kTraceHeader =
    "tick,cache_mb,working_set_mb,disk_queue_len,block_kb,bandwidth_kbyte,sfr_mb";

void write_trace(std::ostream& out, const SimTrace& trace);
std::vector<TraceRecord> parse_trace(std::istream& in, std::string_view source = "<stream>");

/// Names accepted by trace_column: the non-tick trace columns.
const std::vector<std::string>& trace_columns();

/// One trace column as a metric series with t in seconds. Bandwidth is
/// lower-is-worse; every other column higher-is-worse.
MetricSeries trace_column(std::span<const TraceRecord> records, std::string_view column);

}  // namespace agingkit::sim
