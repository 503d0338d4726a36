#include "dipolesim/field.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>

#include "dipolesim/errors.hpp"
#include "dipolesim/rng.hpp"
#include "format_detail.hpp"

namespace dipolesim {

namespace {

// Uniform point on the disc of radius r, by rejection from the bounding
// square. Acceptance ratio pi/4, so about 1.27 tries per point.
Point2 disc_point(HashStream& s, double r) {
  for (;;) {
    double x = (2.0 * s.next_uniform() - 1.0) * r;
    double y = (2.0 * s.next_uniform() - 1.0) * r;
    if (x * x + y * y <= r * r) return {x, y};
  }
}

DipoleField build_field(const NetworkParams& params, std::uint64_t seed,
                        std::uint64_t count) {
  if (count > std::numeric_limits<std::uint32_t>::max())
    throw size_error("sample_field: count exceeds index range");
  double radius = params.window_radius();
  std::uint64_t field_key = derive(seed, kTagField);

  DipoleField field;
  field.intensity = params.n;
  field.region_radius = radius;
  field.seed = seed;
  field.dipoles.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    // Per-index streams: dipole i's coordinates depend only on (seed, i), so
    // a forced count replays the same prefix a Poisson count would produce.
    HashStream pos(derive(field_key, kTagPosition, i));
    HashStream mark(derive(field_key, kTagMark, i));
    Dipole& d = field.dipoles[i];
    d.index = static_cast<std::uint32_t>(i);
    d.rx = disc_point(pos, radius);
    Point2 w = disc_point(mark, params.mark_radius);
    d.tx = {d.rx.x + w.x, d.rx.y + w.y};
  }
  return field;
}

}  // namespace

DipoleField sample_field(const NetworkParams& params, std::uint64_t seed) {
  params.validate();
  std::uint64_t field_key = derive(seed, kTagField);
  RngStream count_rng(derive(field_key, kTagCount));
  std::uint64_t count =
      poisson_sample(count_rng, params.n * params.window_area);
  return build_field(params, seed, count);
}

DipoleField sample_field_fixed_count(const NetworkParams& params,
                                     std::uint64_t seed, std::uint64_t count) {
  params.validate();
  return build_field(params, seed, count);
}

std::vector<std::uint32_t> neighborhood(const DipoleField& field,
                                        std::uint32_t j) {
  if (j >= field.dipoles.size())
    throw index_error("neighborhood: dipole index out of range");
  const Point2 rj = field.dipoles[j].rx;
  constexpr double kR2 = kUnitAreaDiscRadius * kUnitAreaDiscRadius;
  std::vector<std::uint32_t> out;
  for (const Dipole& d : field.dipoles) {
    if (d.index == j) continue;
    double dx = d.tx.x - rj.x;
    double dy = d.tx.y - rj.y;
    if (dx * dx + dy * dy <= kR2) out.push_back(d.index);
  }
  return out;
}

double pair_distance(const DipoleField& field, std::uint32_t i,
                     std::uint32_t j) {
  if (i >= field.dipoles.size() || j >= field.dipoles.size())
    throw index_error("pair_distance: dipole index out of range");
  double dx = field.dipoles[i].tx.x - field.dipoles[j].rx.x;
  double dy = field.dipoles[i].tx.y - field.dipoles[j].rx.y;
  return std::sqrt(dx * dx + dy * dy);
}

void write_field_csv(const DipoleField& field, std::ostream& os) {
  std::string buf = "index,tx_x,tx_y,rx_x,rx_y\n";
  for (const Dipole& d : field.dipoles) {
    detail::append_u64(buf, d.index);
    buf.push_back(',');
    detail::append_double(buf, d.tx.x);
    buf.push_back(',');
    detail::append_double(buf, d.tx.y);
    buf.push_back(',');
    detail::append_double(buf, d.rx.x);
    buf.push_back(',');
    detail::append_double(buf, d.rx.y);
    buf.push_back('\n');
  }
  os << buf;
}

}  // namespace dipolesim
