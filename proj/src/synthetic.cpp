#include "mlad/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "mlad/error.hpp"
#include "mlad/rng.hpp"

namespace mlad {

namespace {

// 45 normal skeletons; {} slots are filled with random values that the
// default masks wildcard away. System A uses [0,30), system B uses [15,45),
// so half of each system's vocabulary is shared.
const std::array<const char*, 45> kNormalSkeletons = {
    "scheduler assigned task {} to worker {}",
    "worker {} finished task {} status ok",
    "heartbeat from node {} latency {} ms",
    "cache lookup for key {} hit ratio {}",
    "cache eviction pass removed {} entries",
    "replica sync for shard {} completed in {} ms",
    "queue depth on channel {} is {}",
    "connection accepted from {}",
    "connection closed for peer {} after {} requests",
    "session {} renewed lease for {} seconds",
    "disk usage on volume {} at {} percent",
    "compaction of segment {} merged {} files",
    "request {} served in {} ms",
    "request {} throttled retry after {} ms",
    "metrics flush wrote {} samples",
    "config reload applied revision {}",
    "leader election round {} won by node {}",
    "snapshot {} persisted to storage",
    "garbage collector reclaimed {} pages",
    "index rebuild for table {} touched {} rows",
    "tls handshake with peer {} completed",
    "dns lookup for host {} took {} ms",
    "pool allocated {} buffers for stream {}",
    "batch {} committed with {} records",
    "watchdog ping acknowledged by service {}",
    "quota check for tenant {} passed",
    "rollout step {} applied to group {}",
    "archive upload {} finished size {} bytes",
    "rate limiter for route {} set to {}",
    "checkpoint {} validated against manifest",
    "mirror pull from origin {} fetched {} objects",
    "token refresh for client {} succeeded",
    "scrub pass over extent {} found {} defects",
    "failover drill for cell {} completed",
    "ledger append at offset {} acknowledged",
    "thermal reading from sensor {} is {} degrees",
    "prefetch window for reader {} expanded to {}",
    "broker rebalanced partition {} onto node {}",
    "audit event {} recorded for user {}",
    "vacuum job on relation {} finished",
    "telemetry probe {} reported uptime {}",
    "license heartbeat for feature {} ok",
    "mesh route to zone {} refreshed",
    "backlog drain moved {} messages",
    "codec negotiation for stream {} chose profile {}",
};

// Rare anomaly skeletons per system; keywords never appear in normal lines.
const std::array<const char*, 2> kAnomalyA = {
    "kernel panic detected on cpu {} code {}",
    "fatal error unrecoverable state in module {}",
};
const std::array<const char*, 2> kAnomalyB = {
    "service crash loop detected pid {} code {}",
    "wedge error unrecoverable lock in module {}",
};

std::string fill_slots(const std::string& skeleton, Rng& rng) {
    std::string out;
    out.reserve(skeleton.size() + 16);
    for (std::size_t i = 0; i < skeleton.size(); ++i) {
        if (skeleton[i] == '{' && i + 1 < skeleton.size() && skeleton[i + 1] == '}') {
            char buf[32];
            if (rng.next_u64() & 1) {
                std::snprintf(buf, sizeof(buf), "0x%04x",
                              static_cast<unsigned>(rng.below(0x10000)));
            } else {
                std::snprintf(buf, sizeof(buf), "%u",
                              static_cast<unsigned>(rng.below(100000)));
            }
            out += buf;
            ++i;
        } else {
            out += skeleton[i];
        }
    }
    return out;
}

} // namespace

SynthCorpus generate_corpus(const SynthConfig& cfg) {
    if (cfg.n_windows < 1) throw DataError("synthetic: n_windows must be positive");
    if (cfg.window_len < 2) throw DataError("synthetic: window_len must be >= 2");
    if (cfg.anomaly_rate < 0.0 || cfg.anomaly_rate >= 1.0)
        throw DataError("synthetic: anomaly_rate must be in [0,1)");
    if (cfg.anomaly_lines < 1 || cfg.anomaly_lines > cfg.window_len)
        throw DataError("synthetic: anomaly_lines out of range");
    if (cfg.modes < 1) throw DataError("synthetic: modes must be positive");
    if (cfg.system != "A" && cfg.system != "B")
        throw DataError("synthetic: system must be A or B");

    const int pool_offset = cfg.system == "A" ? 0 : 15;
    constexpr int kPoolSize = 30;
    const auto& anomalies = cfg.system == "A" ? kAnomalyA : kAnomalyB;

    Rng rng(cfg.seed ^ fnv1a64(cfg.system.data(), cfg.system.size()));

    // Exact anomaly count, positions chosen by shuffle.
    const int n_anom = static_cast<int>(cfg.anomaly_rate * cfg.n_windows);
    std::vector<int> window_ids(static_cast<std::size_t>(cfg.n_windows));
    for (int i = 0; i < cfg.n_windows; ++i) window_ids[static_cast<std::size_t>(i)] = i;
    rng.shuffle(window_ids);
    std::vector<bool> is_anomalous(static_cast<std::size_t>(cfg.n_windows), false);
    for (int i = 0; i < n_anom; ++i) {
        is_anomalous[static_cast<std::size_t>(window_ids[static_cast<std::size_t>(i)])] = true;
    }

    // Each mode favors a 12-template slice of the pool with a mild rank bias.
    const int slice = 12;
    const int stride = kPoolSize / cfg.modes;

    SynthCorpus corpus;
    corpus.n_anomalous_windows = n_anom;
    corpus.lines.reserve(static_cast<std::size_t>(cfg.n_windows) * cfg.window_len);
    corpus.labels.reserve(corpus.lines.capacity());

    for (int w = 0; w < cfg.n_windows; ++w) {
        const int mode = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.modes)));
        std::vector<int> anomaly_pos;
        if (is_anomalous[static_cast<std::size_t>(w)]) {
            std::vector<int> pos(static_cast<std::size_t>(cfg.window_len));
            for (int i = 0; i < cfg.window_len; ++i) pos[static_cast<std::size_t>(i)] = i;
            rng.shuffle(pos);
            anomaly_pos.assign(pos.begin(), pos.begin() + cfg.anomaly_lines);
        }
        for (int i = 0; i < cfg.window_len; ++i) {
            const bool planted =
                std::find(anomaly_pos.begin(), anomaly_pos.end(), i) != anomaly_pos.end();
            if (planted) {
                const auto& skel = anomalies[static_cast<std::size_t>(rng.below(2))];
                corpus.lines.push_back(fill_slots(skel, rng));
                corpus.labels.push_back(1);
            } else {
                // Rank-biased draw from the mode's slice.
                const int r0 = static_cast<int>(rng.below(slice));
                const int r1 = static_cast<int>(rng.below(slice));
                const int rank = std::min(r0, r1);
                const int idx = pool_offset + (mode * stride + rank) % kPoolSize;
                corpus.lines.push_back(
                    fill_slots(kNormalSkeletons[static_cast<std::size_t>(idx)], rng));
                corpus.labels.push_back(0);
            }
        }
    }
    return corpus;
}

} // namespace mlad
