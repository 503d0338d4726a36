#include "dipolesim/sweep.hpp"

#include <atomic>
#include <algorithm>
#include <bit>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>


#include "dipolesim/activation.hpp"
#include "dipolesim/channel.hpp"
#include "dipolesim/errors.hpp"
#include "dipolesim/field.hpp"
#include "dipolesim/rng.hpp"

namespace dipolesim {

namespace {

struct Task {
  double n = 0.0;
  std::uint32_t replication = 0;
};

ExperimentRecord run_task(const NetworkParams& base, const SweepSettings& sweep,
                          const Task& task) {
  NetworkParams params = base;
  params.n = task.n;
  params.validate();
  std::uint64_t seed = task_seed(sweep.master_seed, task.n, task.replication);

  DipoleField field =
      sweep.fixed_count.has_value()
          ? sample_field_fixed_count(params, seed, *sweep.fixed_count)
          : sample_field(params, seed);
  GainField gains(field, params, seed, sweep.mode);

  ActivationResult res;
  switch (sweep.solver) {
    case Solver::tblas:
      res = tblas_activate(gains, params);
      break;
    case Solver::greedy:
      res = max_active_greedy(gains, params);
      break;
    case Solver::exact:
      // The exact solver needs the materialized matrix; its size cap keeps
      // that cheap.
      res = max_active_exact(realize_channel(field, params, seed, sweep.mode),
                             params);
      break;
  }

  ExperimentRecord rec;
  rec.n = task.n;
  rec.replication = task.replication;
  rec.seed = seed;
  rec.m_n = res.m_n;
  rec.eta_n = res.eta_n;
  rec.solver = sweep.solver;
  rec.mode = sweep.mode;
  rec.wall_time_ms = 0;  // reserved slot, see ExperimentRecord
  return rec;
}

}  // namespace

std::uint64_t task_seed(std::uint64_t master_seed, double n,
                        std::uint32_t replication) {
  return derive(master_seed, kTagTask, std::bit_cast<std::uint64_t>(n),
                replication);
}

std::vector<ExperimentRecord> run_sweep(const NetworkParams& base,
                                        const SweepSettings& sweep,
                                        unsigned workers,
                                        const RecordSink& sink) {
  if (sweep.n_grid.empty())
    throw parameter_error("run_sweep: n_grid must be nonempty");
  if (sweep.reps == 0) throw parameter_error("run_sweep: reps must be >= 1");

  std::vector<Task> tasks;
  tasks.reserve(sweep.n_grid.size() * sweep.reps);
  for (double n : sweep.n_grid)
    for (std::uint64_t r = 0; r < sweep.reps; ++r)
      tasks.push_back({n, static_cast<std::uint32_t>(r)});

  if (workers == 0) workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, tasks.size()));

  std::vector<ExperimentRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex sink_mutex;
  std::exception_ptr failure;

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      ExperimentRecord rec = run_task(base, sweep, tasks[i]);
      records[i] = rec;
      if (sink) {
        std::lock_guard<std::mutex> lock(sink_mutex);
        sink(rec);
      }
    }
  };

  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        try {
          worker();
        } catch (...) {
          std::lock_guard<std::mutex> lock(sink_mutex);
          if (!failure) failure = std::current_exception();
          next.store(tasks.size());  // drain remaining tasks
        }
      });
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::sort(records.begin(), records.end(),
            [](const ExperimentRecord& a, const ExperimentRecord& b) {
              if (a.n != b.n) return a.n < b.n;
              return a.replication < b.replication;
            });
  return records;
}

}  // namespace dipolesim
