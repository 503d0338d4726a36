#include "dipolesim/channel.hpp"

#include <algorithm>
#include <cmath>

#include "dipolesim/errors.hpp"
#include "dipolesim/kernels.hpp"
#include "dipolesim/mathutil.hpp"

namespace dipolesim {

double ChannelRealization::cross_at(std::uint32_t i, std::uint32_t j) const {
  if (i >= size()) return 0.0;
  auto cols = row_cols(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return gain[static_cast<std::size_t>(row_begin[i] + (it - cols.begin()))];
}

std::span<const std::uint32_t> ChannelRealization::row_cols(
    std::uint32_t i) const {
  return {col.data() + row_begin[i],
          static_cast<std::size_t>(row_begin[i + 1] - row_begin[i])};
}

std::span<const double> ChannelRealization::row_gains(std::uint32_t i) const {
  return {gain.data() + row_begin[i],
          static_cast<std::size_t>(row_begin[i + 1] - row_begin[i])};
}

TailLaw make_tail_law(double alpha, double b) {
  if (!(std::isfinite(alpha) && alpha >= 2.0))
    throw parameter_error("make_tail_law: alpha must be >= 2");
  if (!(std::isfinite(b) && b > 0.0))
    throw parameter_error("make_tail_law: b must be > 0");
  double beta = 2.0 / alpha;
  TailLaw law;
  law.alpha = alpha;
  law.beta = beta;
  law.c1 = beta * std::tgamma(beta);  // (2/alpha)*Gamma(2/alpha)
  law.c2 = std::pow(b, beta) * tail_probability(b, alpha);
  law.b = b;
  return law;
}

double sample_direct_gain(RngStream& rng) { return rng.next_exp1(); }

double sample_interference_gain(double alpha, RngStream& rng) {
  if (!(std::isfinite(alpha) && alpha >= 2.0))
    throw parameter_error("sample_interference_gain: alpha must be >= 2");
  std::uint64_t gbits = rng.next_bits();
  std::uint64_t dbits = rng.next_bits();
  return kernels::pareto_gain_one(gbits, dbits, alpha);
}

double tail_probability(double z, double alpha) {
  if (!(std::isfinite(alpha) && alpha > 0.0))
    throw parameter_error("tail_probability: alpha must be > 0");
  if (!(z >= 0.0)) throw parameter_error("tail_probability: z must be >= 0");
  if (z == 0.0) return 1.0;
  if (z < 1e-4) {
    // Alternating series sum_k 2(-z)^k / (k! (alpha k + 2)); converges in a
    // handful of terms here and avoids the z^a / z^-a cancellation below.
    double pw = 1.0;  // (-z)^k / k!
    double sum = 0.0;
    for (int k = 0; k < 64; ++k) {
      double term = 2.0 * pw / (alpha * static_cast<double>(k) + 2.0);
      sum += term;
      if (std::fabs(term) < 1e-18) break;
      pw *= -z / static_cast<double>(k + 1);
    }
    return sum;
  }
  if (alpha == 2.0) return -std::expm1(-z) / z;
  double a = 2.0 / alpha;
  return a * std::tgamma(a) * gamma_p(a, z) * std::pow(z, -a);
}

std::vector<double> tail_exponent_plateau(double alpha,
                                          const std::vector<double>& z_grid) {
  if (z_grid.empty())
    throw parameter_error("tail_exponent_plateau: empty z grid");
  double beta = 2.0 / alpha;
  std::vector<double> out;
  out.reserve(z_grid.size());
  for (double z : z_grid)
    out.push_back(std::pow(z, beta) * tail_probability(z, alpha));
  return out;
}

GainField::GainField(const DipoleField& field, const NetworkParams& params,
                     std::uint64_t seed, Mode mode)
    : field_(&field),
      params_(&params),
      channel_key_(derive(seed, kTagChannel)),
      alpha_(params.alpha),
      mode_(mode) {
  params.validate();
}

double GainField::direct(std::uint32_t i) const {
  if (i >= size()) throw index_error("GainField::direct: index out of range");
  return kernels::exp1_one(derive(channel_key_, kTagDirect, i));
}

double GainField::cross(std::uint32_t i, std::uint32_t j) const {
  if (i >= size() || j >= size())
    throw index_error("GainField::cross: index out of range");
  if (i == j) return 0.0;
  if (mode_ == Mode::no_pathloss)
    return kernels::exp1_one(derive(channel_key_, kTagCross, i, j));
  const Dipole& dj = field_->dipoles[j];
  const Dipole& di = field_->dipoles[i];
  double dx = dj.tx.x - di.rx.x;
  double dy = dj.tx.y - di.rx.y;
  double d2 = dx * dx + dy * dy;
  if (d2 > 1.0) return 0.0;
  return kernels::gain_at_one(derive(channel_key_, kTagCross, i, j), d2,
                              alpha_);
}

ChannelRealization realize_channel(const DipoleField& field,
                                   const NetworkParams& params,
                                   std::uint64_t seed, Mode mode) {
  params.validate();
  const kernels::Backend& k = kernels::backend();
  std::uint64_t channel_key = derive(seed, kTagChannel);
  std::size_t n = field.dipoles.size();

  ChannelRealization ch;
  ch.alpha = params.alpha;
  ch.direct.resize(n);
  {
    std::vector<std::uint64_t> bits(n);
    for (std::size_t i = 0; i < n; ++i)
      bits[i] = derive(channel_key, kTagDirect, i);
    k.exp1(bits.data(), ch.direct.data(), n);
  }

  std::vector<double> tx_x(n), tx_y(n);
  for (std::size_t i = 0; i < n; ++i) {
    tx_x[i] = field.dipoles[i].tx.x;
    tx_y[i] = field.dipoles[i].tx.y;
  }

  ch.row_begin.assign(n + 1, 0);
  std::vector<double> d2_all(n);
  std::vector<std::uint64_t> bits_row;
  std::vector<double> d2_row;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 r = field.dipoles[i].rx;
    bits_row.clear();
    d2_row.clear();
    if (mode == Mode::pathloss) {
      k.sq_dist(tx_x.data(), tx_y.data(), r.x, r.y, d2_all.data(), n);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || d2_all[j] > 1.0) continue;
        ch.col.push_back(static_cast<std::uint32_t>(j));
        bits_row.push_back(derive(channel_key, kTagCross, i, j));
        d2_row.push_back(d2_all[j]);
      }
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        ch.col.push_back(static_cast<std::uint32_t>(j));
        bits_row.push_back(derive(channel_key, kTagCross, i, j));
      }
    }
    std::size_t old = ch.gain.size();
    ch.gain.resize(old + bits_row.size());
    if (mode == Mode::pathloss) {
      k.gain_at(bits_row.data(), d2_row.data(), params.alpha,
                 ch.gain.data() + old, bits_row.size());
    } else {
      k.exp1(bits_row.data(), ch.gain.data() + old, bits_row.size());
    }
    ch.row_begin[i + 1] = ch.gain.size();
  }
  return ch;
}

std::vector<double> realize_direct(const DipoleField& field,
                                   std::uint64_t seed) {
  std::uint64_t channel_key = derive(seed, kTagChannel);
  std::size_t n = field.dipoles.size();
  std::vector<std::uint64_t> bits(n);
  for (std::size_t i = 0; i < n; ++i)
    bits[i] = derive(channel_key, kTagDirect, i);
  std::vector<double> out(n);
  kernels::backend().exp1(bits.data(), out.data(), n);
  return out;
}

}  // namespace dipolesim
