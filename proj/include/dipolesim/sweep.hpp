#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dipolesim/config.hpp"
#include "dipolesim/records.hpp"

namespace dipolesim {

// Called from worker threads as records complete, in completion order, under
// an internal lock (single consumer at a time).
using RecordSink = std::function<void(const ExperimentRecord&)>;

// Full experiment driver: for each (n, replication) sample field, realize
// gains, run the configured solver, record counts. Task seed is
// derive(master_seed, task tag, bits of n, replication), so every task owns
// an independent stream and the schedule cannot change any sample. Returned
// records are sorted by (n, replication). workers = 0 means one per
// hardware thread.
std::vector<ExperimentRecord> run_sweep(const NetworkParams& base,
                                        const SweepSettings& sweep,
                                        unsigned workers = 0,
                                        const RecordSink& sink = {});

// Seed a single task the way run_sweep does (exposed for tests).
std::uint64_t task_seed(std::uint64_t master_seed, double n,
                        std::uint32_t replication);

}  // namespace dipolesim
