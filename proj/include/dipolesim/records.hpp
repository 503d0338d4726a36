#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dipolesim/params.hpp"

namespace dipolesim {

// One Monte Carlo data point. wall_time_ms is a reserved schema slot pinned
// to 0: any measured time flips across runs at millisecond-bucket boundaries,
// which would break the byte-identical-CSV determinism contract.
struct ExperimentRecord {
  double n = 0.0;
  std::uint32_t replication = 0;
  std::uint64_t seed = 0;
  std::uint64_t m_n = 0;
  std::uint64_t eta_n = 0;
  Solver solver = Solver::greedy;
  Mode mode = Mode::pathloss;
  std::uint64_t wall_time_ms = 0;
};

// Bit-exact CSV schema: this exact header, LF endings, decimal integers,
// shortest round-trip doubles, no quoting.
inline constexpr const char* kRecordsCsvHeader =
    "n,replication,seed,m_n,eta_n,solver,mode,wall_time_ms";

std::string record_to_csv_line(const ExperimentRecord& r);
void write_records_csv(const std::vector<ExperimentRecord>& records,
                       std::ostream& os);
std::vector<ExperimentRecord> read_records_csv(std::istream& is);

}  // namespace dipolesim
