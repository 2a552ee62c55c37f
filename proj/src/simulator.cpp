#include "agingkit/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "agingkit/error.hpp"

namespace agingkit::sim {

// ---------------------------------------------------------------------------
// RandomStream

double RandomStream::uniform() {
    // 53 random mantissa bits.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t RandomStream::below(std::size_t n) {
    if (n == 0) {
        throw DomainError("RandomStream::below needs n > 0");
    }
    return std::min(static_cast<std::size_t>(uniform() * static_cast<double>(n)), n - 1);
}

std::uint64_t RandomStream::poisson(double mean) {
    if (!(mean >= 0.0) || mean > 700.0) {
        throw DomainError("poisson mean must lie in [0, 700]");
    }
    // Sequential inversion.
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf && p > 0.0) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

// ---------------------------------------------------------------------------
// Couplings

double working_set_for(double cache_mb, double disk_queue_len, const SimConfig& cfg) {
    return std::min(cfg.total_memory_mb,
                    cfg.process_base_mb + cache_mb + disk_queue_len * cfg.queue_buffer_mb);
}

double read_latency(double working_set_mb, const SimConfig& cfg) {
    return 1.0 + cfg.latency_gain * working_set_mb / cfg.total_memory_mb;
}

double block_budget(double block_kb, const SimConfig& cfg) {
    return cfg.block_trigger_ratio + cfg.block_trigger_step * std::log2(block_kb / cfg.base_block_kb);
}

double next_queue_length(double queue, double arrivals, double latency, const SimConfig& cfg) {
    const double served = cfg.queue_service_rate / latency * (1.0 + queue / cfg.queue_half_depth);
    return std::max(0.0, queue + arrivals - served);
}

double reclaim_eligible_fraction(int refcount_threshold, const SimConfig& cfg) {
    const double eligible = static_cast<double>(refcount_threshold) + 1.0;
    return eligible / (eligible + cfg.refcount_scale);
}

double bandwidth_for(double disk_queue_len, double working_set_mb, const SimConfig& cfg) {
    const double pressure = std::max(0.0, working_set_mb - cfg.pressure_knee_mb) /
                            (cfg.total_memory_mb - cfg.pressure_knee_mb);
    return cfg.bandwidth_nominal_kbyte /
           (1.0 + cfg.bandwidth_queue_gain * disk_queue_len + cfg.bandwidth_memory_gain * pressure);
}

double aging_degree_now(const SimState& state, const SimConfig& cfg) {
    return std::clamp(1.0 - state.trailing_bandwidth_kbyte / cfg.bandwidth_nominal_kbyte, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// State

TraceRecord SimState::record() const {
    return {tick, cache_mb, working_set_mb, disk_queue_len, block_kb, bandwidth_kbyte, sfr_mb};
}

void SimState::validate(const SimConfig& cfg) const {
    auto fail = [this](const std::string& what) {
        throw DomainError("simulator state at tick " + std::to_string(tick) + ": " + what);
    };
    if (tick < 0) {
        fail("negative tick");
    }
    for (double v : {cache_mb, working_set_mb, disk_queue_len, block_kb, bandwidth_kbyte, sfr_mb,
                     trailing_bandwidth_kbyte}) {
        if (!std::isfinite(v) || v < 0.0) {
            fail("quantities must be finite and nonnegative");
        }
    }
    if (sfr_mb > cache_mb) {
        fail("sfr_mb exceeds cache_mb");
    }
    if (cache_mb > working_set_mb) {
        fail("cache_mb exceeds working_set_mb");
    }
    if (working_set_mb > cfg.total_memory_mb) {
        fail("working_set_mb exceeds total memory");
    }
    if (block_kb < cfg.base_block_kb || block_kb > cfg.max_block_kb) {
        fail("block_kb outside [base_block_kb, max_block_kb]");
    }
    if (last_access.size() != static_cast<std::size_t>(cfg.catalog_files)) {
        fail("file table size differs from catalog_files");
    }
    if (admitted_clients > cfg.capacity_clients) {
        fail("admitted clients exceed capacity");
    }
}

SimState initial_state(const SimConfig& cfg) {
    cfg.validate();
    SimState s;
    s.last_access.assign(static_cast<std::size_t>(cfg.catalog_files), 0);
    for (int i = 0; i < cfg.initial_cached_files; ++i) {
        s.last_access[static_cast<std::size_t>(i)] = ++s.access_clock;
    }
    s.cache_mb = cfg.initial_cached_files * cfg.cache_growth_mb;
    s.block_kb = cfg.base_block_kb;
    s.working_set_mb = working_set_for(s.cache_mb, s.disk_queue_len, cfg);
    s.bandwidth_kbyte = bandwidth_for(s.disk_queue_len, s.working_set_mb, cfg);
    s.trailing_bandwidth_kbyte = s.bandwidth_kbyte;
    return s;
}

// ---------------------------------------------------------------------------
// Dynamics

SimState apply_loops(const SimState& state, const StepDrivers& drivers, const SimConfig& cfg,
                     int refcount_threshold) {
    SimState s = state;
    const double misses = static_cast<double>(drivers.uncached_requests);
    const double evicted = static_cast<double>(drivers.evicted_files);

    // Cache content: misses load files, evictions release them except for the leaked share.
    s.cache_mb += misses * cfg.cache_growth_mb - evicted * (1.0 - cfg.leak_fraction) * cfg.cache_growth_mb;
    s.sfr_mb += evicted * cfg.leak_fraction * cfg.cache_growth_mb;

    // Disk queue, served at a rate set by the latency at the start of the tick.
    const double arrivals = cfg.disk_ops_per_miss * misses * s.block_kb / cfg.base_block_kb;
    const double start_latency = read_latency(state.working_set_mb, cfg);
    s.disk_queue_len = next_queue_length(s.disk_queue_len, arrivals, start_latency, cfg);

    // Queued requests pin data in memory that nobody consumes in time.
    const double backlog = cfg.backlog_gain * s.disk_queue_len;
    s.sfr_mb += backlog;
    s.cache_mb += backlog;

    // Reaper.
    const double reclaimed = reclaim_eligible_fraction(refcount_threshold, cfg) *
                             std::min(cfg.reclaim_rate * s.sfr_mb, cfg.reclaim_cap_mb);
    s.sfr_mb -= reclaimed;
    s.cache_mb -= reclaimed;

    // Physical memory is finite; the OS pages out SFR first.
    const double demand = cfg.process_base_mb + s.cache_mb + s.disk_queue_len * cfg.queue_buffer_mb;
    if (demand > cfg.total_memory_mb) {
        const double cut = std::min(demand - cfg.total_memory_mb, s.sfr_mb);
        s.sfr_mb -= cut;
        s.cache_mb -= cut;
    }
    s.sfr_mb = std::max(0.0, s.sfr_mb);
    s.cache_mb = std::max(s.cache_mb, s.sfr_mb);
    s.working_set_mb = working_set_for(s.cache_mb, s.disk_queue_len, cfg);

    // Slow reads make the server fetch bigger blocks per read.
    if (read_latency(s.working_set_mb, cfg) > block_budget(s.block_kb, cfg)) {
        s.block_kb = std::min(cfg.max_block_kb, 2.0 * s.block_kb);
    }

    s.bandwidth_kbyte = bandwidth_for(s.disk_queue_len, s.working_set_mb, cfg);
    const double smoothing = 2.0 / (static_cast<double>(cfg.trigger_window_ticks) + 1.0);
    s.trailing_bandwidth_kbyte += smoothing * (s.bandwidth_kbyte - s.trailing_bandwidth_kbyte);
    return s;
}

namespace {

std::size_t pick_file(const WorkloadSpec& load, SimState& s, RandomStream& rng) {
    const auto files = static_cast<std::size_t>(load.file_object);
    switch (load.file_dist) {
        case FileDistribution::Random:
            return rng.below(files);
        case FileDistribution::Sequential: {
            const std::size_t f = s.sequential_cursor % files;
            s.sequential_cursor = static_cast<std::uint32_t>((f + 1) % files);
            return f;
        }
        case FileDistribution::Poisson: {
            // Centred on the middle of the allowed set, redrawn when out of range.
            const double mean = 0.5 * static_cast<double>(files - 1);
            for (int attempt = 0; attempt < 32; ++attempt) {
                const auto k = rng.poisson(mean);
                if (k < files) {
                    return static_cast<std::size_t>(k);
                }
            }
            return files - 1;
        }
        case FileDistribution::SingleFile:
            return 0;
    }
    return 0;
}

void evict_least_recent(SimState& s) {
    std::size_t victim = s.last_access.size();
    for (std::size_t f = 0; f < s.last_access.size(); ++f) {
        if (s.last_access[f] != 0 &&
            (victim == s.last_access.size() || s.last_access[f] < s.last_access[victim])) {
            victim = f;
        }
    }
    if (victim < s.last_access.size()) {
        s.last_access[victim] = 0;
    }
}

}  // namespace

SimState step(const SimState& state, const WorkloadSpec& load, const SimConfig& cfg,
              const RejuvenationPolicy& policy, RandomStream& rng) {
    state.validate(cfg);
    load.validate(cfg);
    policy.validate();

    SimState s = state;
    s.tick += 1;
    s.admitted_clients = std::min(load.client_count, cfg.capacity_clients);
    s.admitted_requests = 0;
    s.rejected_requests = 0;
    s.policy_active = false;
    if (s.admitted_clients == 0) {
        return s;
    }

    using Kind = RejuvenationPolicy::Kind;
    const bool active =
        policy.kind != Kind::None && aging_degree_now(state, cfg) >= policy.trigger_threshold;
    s.policy_active = active;

    int refcount_threshold = cfg.refcount_threshold;
    if (active && policy.kind == Kind::DiskBlockReset) {
        s.block_kb = cfg.base_block_kb;
    }
    if (active && policy.kind == Kind::MemReapEnlarge) {
        refcount_threshold = std::max(refcount_threshold, policy.refcount);
    }

    // Request phase.
    const double requests_per_tick = static_cast<double>(s.admitted_clients) * kTickSeconds * 1000.0 /
                                     (static_cast<double>(load.sleep_time_ms) + cfg.stream_duration_ms);
    const std::uint64_t requests = rng.poisson(requests_per_tick);

    auto cached_files = static_cast<std::size_t>(
        std::count_if(s.last_access.begin(), s.last_access.end(), [](auto a) { return a != 0; }));
    const auto capacity = static_cast<std::size_t>(load.file_max_object);

    StepDrivers drivers;
    std::size_t shared_file = 0;
    for (std::uint64_t r = 0; r < requests; ++r) {
        std::size_t file = 0;
        if (load.file_difference == FileDifference::Same && r > 0) {
            file = shared_file;
        } else {
            file = pick_file(load, s, rng);
            shared_file = file;
        }
        // Drawn for every request so that admission policies do not shift the stream.
        const double admission_draw = rng.uniform();
        const bool cached = s.last_access[file] != 0;

        bool admitted = true;
        if (active && policy.kind == Kind::CacheHitAdmission && !cached) {
            admitted = false;
        }
        if (active && policy.kind == Kind::ProbabilisticAdmission && admission_draw >= policy.probability) {
            admitted = false;
        }
        if (!admitted) {
            ++s.rejected_requests;
            continue;
        }
        ++s.admitted_requests;

        s.last_access[file] = ++s.access_clock;
        if (cached) {
            continue;
        }
        ++drivers.uncached_requests;
        ++cached_files;
        while (cached_files > capacity) {
            evict_least_recent(s);
            --cached_files;
            ++drivers.evicted_files;
        }
    }

    SimState next = apply_loops(s, drivers, cfg, refcount_threshold);
    if (active && policy.kind == Kind::DiskBlockReset) {
        // Held at base while the policy is active.
        next.block_kb = cfg.base_block_kb;
    }
    return next;
}

SimTrace run(const SimConfig& cfg, const WorkloadSpec& load, const RejuvenationPolicy& policy,
             std::int64_t ticks, std::uint64_t seed) {
    if (ticks < 1) {
        throw DomainError("ticks must be at least 1");
    }
    cfg.validate();
    load.validate(cfg);
    policy.validate();

    RandomStream rng(seed);
    SimTrace trace;
    trace.reserve(static_cast<std::size_t>(ticks) + 1);
    trace.push_back(initial_state(cfg));
    for (std::int64_t k = 0; k < ticks; ++k) {
        trace.push_back(step(trace.back(), load, cfg, policy, rng));
    }
    return trace;
}

SimTrace PolicyExperiment::joined() const {
    SimTrace all = before;
    all.insert(all.end(), after.begin(), after.end());
    return all;
}

PolicyExperiment apply_policy_experiment(const SimConfig& cfg, const WorkloadSpec& load,
                                         const RejuvenationPolicy& policy, std::int64_t ticks,
                                         std::int64_t rejuvenation_tick, std::uint64_t seed) {
    if (ticks < 1) {
        throw DomainError("ticks must be at least 1");
    }
    if (rejuvenation_tick < 0 || rejuvenation_tick >= ticks) {
        throw DomainError("rejuvenation tick must lie in [0, ticks)");
    }
    cfg.validate();
    load.validate(cfg);
    policy.validate();

    RandomStream rng(seed);
    const auto no_policy = RejuvenationPolicy::none();
    PolicyExperiment out;
    out.rejuvenation_tick = rejuvenation_tick;
    out.before.reserve(static_cast<std::size_t>(rejuvenation_tick) + 1);
    out.before.push_back(initial_state(cfg));
    for (std::int64_t k = 0; k < rejuvenation_tick; ++k) {
        out.before.push_back(step(out.before.back(), load, cfg, no_policy, rng));
    }
    out.after.reserve(static_cast<std::size_t>(ticks - rejuvenation_tick));
    const SimState* current = &out.before.back();
    for (std::int64_t k = rejuvenation_tick; k < ticks; ++k) {
        out.after.push_back(step(*current, load, cfg, policy, rng));
        current = &out.after.back();
    }
    return out;
}

AgingCurve aging_degree(const SimTrace& trace, const SimConfig& cfg, const SmoothingConfig& smoothing) {
    if (trace.size() < 3) {
        throw DomainError("aging degree needs a trace of at least 3 states");
    }
    (void)cfg;
    std::vector<TraceRecord> records;
    records.reserve(trace.size());
    for (const auto& s : trace) {
        records.push_back(s.record());
    }
    const auto seconds = trace_column(records, "bandwidth_kbyte");
    return to_aging_curve(rescale_time(seconds, kSecondsToHours), smoothing);
}

}  // namespace agingkit::sim
