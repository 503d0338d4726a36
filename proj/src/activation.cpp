#include "dipolesim/activation.hpp"

#include <algorithm>
#include <cmath>

#include "dipolesim/errors.hpp"

namespace dipolesim {

namespace {

// Uniform query surface over materialized and lazy gains so every strategy is
// written once. Interference sums always run over ascending j, so both
// backings add the same terms in the same order.
struct ChannelView {
  const ChannelRealization* ch;
  std::uint32_t size() const {
    return static_cast<std::uint32_t>(ch->size());
  }
  double direct(std::uint32_t i) const { return ch->direct[i]; }
  double cross(std::uint32_t i, std::uint32_t j) const {
    return ch->cross_at(i, j);
  }
};

template <class View>
double interference(const View& v, std::uint32_t i,
                    const std::vector<std::uint32_t>& active, double power) {
  double acc = 0.0;
  for (std::uint32_t j : active) {
    if (j == i) continue;
    acc += power * v.cross(i, j);
  }
  return acc;
}

template <class View>
double rate_of(const View& v, std::uint32_t i,
               const std::vector<std::uint32_t>& active,
               const NetworkParams& params) {
  bool member = false;
  for (std::uint32_t j : active) member = member || j == i;
  if (!member) throw contract_error("link_rate: link is not in the active set");
  double inter = interference(v, i, active, params.power_w);
  double sinr = params.power_w * v.direct(i) / (params.noise_var + inter);
  return params.bandwidth_hz * std::log1p(sinr);
}

// Interference budget of link i: feasibility I <= P*h/theta - sigma^2 is the
// threshold form of rate >= r_min; solvers decide on it, reported rates use
// the log form (same sign except on rounding knife edges).
template <class View>
double budget_of(const View& v, std::uint32_t i, const NetworkParams& params,
                 double theta) {
  return params.power_w * v.direct(i) / theta - params.noise_var;
}

template <class View>
void fill_rates(const View& v, const std::vector<std::uint32_t>& links,
                const std::vector<std::uint32_t>& active,
                const NetworkParams& params, ActivationResult& res) {
  for (std::uint32_t i : links) res.rates[i] = rate_of(v, i, active, params);
}

template <class View>
ActivationResult tblas_impl(const View& v, const NetworkParams& params) {
  params.validate();
  if (!(params.n > 1.0))
    throw parameter_error("threshold activation requires n > 1");
  double h0 = params.h0();

  ActivationResult res;
  res.h0 = h0;
  res.p0 = params.p0();
  for (std::uint32_t i = 0; i < v.size(); ++i)
    if (v.direct(i) > h0) res.good_set.push_back(i);
  res.m_n = res.good_set.size();

  // The whole good set transmits; being active additionally means the rate
  // under that interference clears r_min.
  fill_rates(v, res.good_set, res.good_set, params, res);
  for (std::uint32_t i : res.good_set)
    if (res.rates[i] >= params.r_min) res.active_set.push_back(i);
  res.eta_n = res.active_set.size();
  return res;
}

template <class View>
ActivationResult greedy_impl(const View& v, const NetworkParams& params) {
  params.validate();
  std::uint32_t n = v.size();
  double theta = params.sinr_threshold();

  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  std::vector<double> h(n);
  for (std::uint32_t i = 0; i < n; ++i) h[i] = v.direct(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     if (h[a] != h[b]) return h[a] > h[b];
                     return a < b;
                   });

  std::vector<std::uint32_t> active;
  std::vector<double> load;    // accumulated interference at each member
  std::vector<double> budget;  // its admission budget
  std::vector<double> inc;     // increments staged for the candidate
  for (std::uint32_t k : order) {
    double bk = budget_of(v, k, params, theta);
    // Candidate's own interference from current members, ascending j.
    double ik = interference(v, k, active, params.power_w);
    if (ik > bk) continue;
    bool fits = true;
    inc.resize(active.size());
    for (std::size_t m = 0; m < active.size(); ++m) {
      inc[m] = params.power_w * v.cross(active[m], k);
      if (load[m] + inc[m] > budget[m]) {
        fits = false;
        break;
      }
    }
    if (!fits) continue;
    for (std::size_t m = 0; m < active.size(); ++m) load[m] += inc[m];
    active.push_back(k);
    load.push_back(ik);
    budget.push_back(bk);
  }

  ActivationResult res;
  res.good_set.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) res.good_set[i] = i;
  res.m_n = n;
  std::sort(active.begin(), active.end());
  res.active_set = std::move(active);
  res.eta_n = res.active_set.size();
  fill_rates(v, res.active_set, res.active_set, params, res);
  return res;
}

}  // namespace

double link_rate(std::uint32_t i, const std::vector<std::uint32_t>& active,
                 const ChannelRealization& ch, const NetworkParams& params) {
  if (i >= ch.size()) throw index_error("link_rate: index out of range");
  return rate_of(ChannelView{&ch}, i, active, params);
}

std::vector<std::uint32_t> tblas_good_set(const ChannelRealization& ch,
                                          const NetworkParams& params,
                                          double* p0_out) {
  params.validate();
  if (!(params.n > 1.0))
    throw parameter_error("threshold activation requires n > 1");
  double h0 = params.h0();
  if (p0_out != nullptr) *p0_out = params.p0();
  std::vector<std::uint32_t> good;
  for (std::uint32_t i = 0; i < ch.size(); ++i)
    if (ch.direct[i] > h0) good.push_back(i);
  return good;
}

ActivationResult tblas_activate(const ChannelRealization& ch,
                                const NetworkParams& params) {
  return tblas_impl(ChannelView{&ch}, params);
}

ActivationResult tblas_activate(const GainField& gains,
                                const NetworkParams& params) {
  return tblas_impl(gains, params);
}

ActivationResult max_active_exact(const ChannelRealization& ch,
                                  const NetworkParams& params) {
  params.validate();
  constexpr std::uint32_t kExactCap = 20;
  std::uint32_t n = static_cast<std::uint32_t>(ch.size());
  if (n > kExactCap)
    throw size_error(
        "max_active_exact: instance above 20 dipoles, use max_active_greedy");
  ChannelView v{&ch};
  double theta = params.sinr_threshold();

  std::vector<double> budget(n);
  for (std::uint32_t i = 0; i < n; ++i)
    budget[i] = budget_of(v, i, params, theta);

  // Include-first DFS in ascending index order visits subsets in exact
  // lexicographic order, so keeping the first strictly-larger feasible set
  // yields the lexicographically smallest maximum set. Feasibility is
  // downward closed (removing a member only lowers interference), which
  // makes skipping a candidate that does not fit sound.
  std::vector<std::uint32_t> cur, best;
  std::vector<double> load(n, 0.0);
  auto dfs = [&](auto&& self, std::uint32_t pos) -> void {
    if (cur.size() > best.size()) best = cur;
    if (pos == n) return;
    if (cur.size() + (n - pos) <= best.size()) return;  // cannot beat best
    std::uint32_t k = pos;
    // Include branch, if k fits against the current members and they keep
    // fitting with k added.
    double ik = interference(v, k, cur, params.power_w);
    if (ik <= budget[k]) {
      bool fits = true;
      for (std::uint32_t m : cur)
        if (load[m] + params.power_w * v.cross(m, k) > budget[m]) {
          fits = false;
          break;
        }
      if (fits) {
        // Snapshot restore on backtrack: += then -= would not round back to
        // the original load values.
        double saved[kExactCap];
        for (std::size_t t = 0; t < cur.size(); ++t) saved[t] = load[cur[t]];
        for (std::uint32_t m : cur) load[m] += params.power_w * v.cross(m, k);
        load[k] = ik;
        cur.push_back(k);
        self(self, pos + 1);
        cur.pop_back();
        for (std::size_t t = 0; t < cur.size(); ++t) load[cur[t]] = saved[t];
      }
    }
    self(self, pos + 1);  // exclude branch
  };
  dfs(dfs, 0);

  ActivationResult res;
  res.good_set.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) res.good_set[i] = i;
  res.m_n = n;
  res.active_set = std::move(best);
  res.eta_n = res.active_set.size();
  fill_rates(v, res.active_set, res.active_set, params, res);
  return res;
}

ActivationResult max_active_greedy(const ChannelRealization& ch,
                                   const NetworkParams& params) {
  return greedy_impl(ChannelView{&ch}, params);
}

ActivationResult max_active_greedy(const GainField& gains,
                                   const NetworkParams& params) {
  return greedy_impl(gains, params);
}

}  // namespace dipolesim
