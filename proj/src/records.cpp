#include "dipolesim/records.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "dipolesim/errors.hpp"
#include "format_detail.hpp"

namespace dipolesim {

namespace {

[[noreturn]] void bad_csv(std::size_t line_no, const std::string& why) {
  throw io_error("records CSV line " + std::to_string(line_no) + ": " + why);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    bad_csv(line_no, "bad number '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s, std::size_t line_no) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    bad_csv(line_no, "bad integer '" + s + "'");
  return v;
}

}  // namespace

std::string record_to_csv_line(const ExperimentRecord& r) {
  std::string buf;
  detail::append_double(buf, r.n);
  buf.push_back(',');
  detail::append_u64(buf, r.replication);
  buf.push_back(',');
  detail::append_u64(buf, r.seed);
  buf.push_back(',');
  detail::append_u64(buf, r.m_n);
  buf.push_back(',');
  detail::append_u64(buf, r.eta_n);
  buf.push_back(',');
  buf += solver_name(r.solver);
  buf.push_back(',');
  buf += mode_name(r.mode);
  buf.push_back(',');
  detail::append_u64(buf, r.wall_time_ms);
  return buf;
}

void write_records_csv(const std::vector<ExperimentRecord>& records,
                       std::ostream& os) {
  std::string buf = kRecordsCsvHeader;
  buf.push_back('\n');
  for (const ExperimentRecord& r : records) {
    buf += record_to_csv_line(r);
    buf.push_back('\n');
  }
  os << buf;
}

std::vector<ExperimentRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw io_error("records CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsCsvHeader)
    throw io_error("records CSV: unexpected header '" + line + "'");
  std::vector<ExperimentRecord> out;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_fields(line);
    if (f.size() != 8) bad_csv(line_no, "expected 8 fields");
    ExperimentRecord r;
    r.n = parse_double(f[0], line_no);
    r.replication = static_cast<std::uint32_t>(parse_u64(f[1], line_no));
    r.seed = parse_u64(f[2], line_no);
    r.m_n = parse_u64(f[3], line_no);
    r.eta_n = parse_u64(f[4], line_no);
    try {
      r.solver = parse_solver(f[5]);
      r.mode = parse_mode(f[6]);
    } catch (const parameter_error& e) {
      bad_csv(line_no, e.what());
    }
    r.wall_time_ms = parse_u64(f[7], line_no);
    out.push_back(r);
  }
  return out;
}

}  // namespace dipolesim
