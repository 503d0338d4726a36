#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dipolesim/channel.hpp"
#include "dipolesim/params.hpp"

namespace dipolesim {

// Outcome of one activation strategy on one realization.
//   good_set    candidates that passed the entry filter: the threshold set
//               {i : h_ii > h0} for the threshold strategy, every dipole for
//               the optimizing solvers (their degenerate threshold is h0 = 0,
//               p0 = 1)
//   active_set  links actually transmitting AND meeting r_min; always a
//               subset of good_set; ascending indices
//   rates       per-link rate under the final activation, for every
//               activated link (threshold strategy: the whole good set;
//               solvers: the active set)
//   m_n         |good_set|;  eta_n = |active_set|
struct ActivationResult {
  std::vector<std::uint32_t> good_set;
  std::vector<std::uint32_t> active_set;
  std::map<std::uint32_t, double> rates;
  double h0 = 0.0;
  double p0 = 1.0;
  std::uint64_t m_n = 0;
  std::uint64_t eta_n = 0;
};

// Rate of link i when the links in `active` transmit: B * ln(1 + P*h_ii /
// (noise_var + sum of P*h_ij over j in active, j != i)). The cross gains
// already encode the unit-distance cutoff. i must be in `active`
// (contract_error otherwise).
double link_rate(std::uint32_t i, const std::vector<std::uint32_t>& active,
                 const ChannelRealization& ch, const NetworkParams& params);

// {i : direct[i] > h0} with h0 = gamma_exp * ln n; requires n > 1
// (parameter_error). p0_out, when given, receives e^(-h0) = n^(-gamma_exp).
std::vector<std::uint32_t> tblas_good_set(const ChannelRealization& ch,
                                          const NetworkParams& params,
                                          double* p0_out = nullptr);

// Threshold strategy: activate the entire good set, compute every activated
// link's rate under that activation, count those meeting r_min.
ActivationResult tblas_activate(const ChannelRealization& ch,
                                const NetworkParams& params);

// Exhaustive maximum feasible set (every member's rate >= r_min), pruned by
// downward-closed feasibility; ties broken by lexicographically smallest
// index set. Instances above 20 dipoles throw size_error (use greedy).
ActivationResult max_active_exact(const ChannelRealization& ch,
                                  const NetworkParams& params);

// Greedy packing: candidates in descending direct-gain order, keep one iff
// the augmented set stays fully feasible. Feasible by construction.
ActivationResult max_active_greedy(const ChannelRealization& ch,
                                   const NetworkParams& params);

// Same strategies over the pay-per-query gain view; identical results to the
// materialized versions with the same seed, but memory-safe at large n.
ActivationResult tblas_activate(const GainField& gains,
                                const NetworkParams& params);
ActivationResult max_active_greedy(const GainField& gains,
                                   const NetworkParams& params);

}  // namespace dipolesim
