// Apache License, Version 2.0, refer to LICENSE.txt
#include "coalfreeze/coalescent.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "coalfreeze/combinatorics.hpp"

namespace coalfreeze {

RateTable RateTable::build(const FreezeMeasure& m, int n) {
  if (n < 1) throw std::invalid_argument("RateTable: n < 1");
  RateTable t;
  t.n = n;
  t.category_cdf.resize(n);
  t.total_rate.resize(n);
  for (int b = 1; b <= n; ++b) {
    const Rational total = phi_total(m, b).value;
    t.total_rate[b - 1] = to_double(total);
    auto& cdf = t.category_cdf[b - 1];
    cdf.resize(b);
    if (total == 0) continue;  // row never sampled; simulate() stops first
    double acc = 0.0;
    for (int k = 1; k <= b; ++k) {
      acc += to_double(phi(m, b, k).value / total);
      cdf[k - 1] = acc;
    }
    cdf[b - 1] = 1.0;
  }
  return t;
}

namespace {

int draw_from_cdf(const std::vector<double>& cdf, RngStream& rng) {
  const double u = rng.u01();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(it - cdf.begin()) + 1;
}

}  // namespace

Trajectory simulate(int n, const RateTable& rates, const Rational& rho,
                    RngStream& rng, std::optional<double> horizon,
                    bool record_events) {
  if (n < 1) throw std::invalid_argument("simulate: n < 1");
  if (rates.n < n) throw std::invalid_argument("simulate: rate table too small");
  if (rho == 0 && !horizon)
    throw std::invalid_argument("simulate: rho = 0 requires a time horizon");

  Trajectory traj;
  traj.n = n;
  traj.freezing_times_by_element.assign(
      n, std::numeric_limits<double>::quiet_NaN());

  std::vector<std::vector<int>> blocks;
  blocks.reserve(2 * n);
  std::vector<char> frozen;
  std::vector<int> active;  // indices into blocks
  for (int i = 1; i <= n; ++i) {
    blocks.push_back({i});
    frozen.push_back(0);
    active.push_back(i - 1);
  }

  double t = 0.0;
  while (!active.empty()) {
    const int b = static_cast<int>(active.size());
    const double rate = rates.total_rate[b - 1];
    if (rate <= 0.0) break;  // no events possible (rho = 0, lone block)
    double t_next = t + rng.exponential(rate);
    while (t_next == t) {  // float tie; strictly increasing times required
      ++traj.tie_redraws;
      t_next = t + rng.exponential(rate);
    }
    if (horizon && t_next > *horizon) break;
    t = t_next;

    const int k = (b == 1) ? 1 : draw_from_cdf(rates.category_cdf[b - 1], rng);
    if (k == 1) {
      const size_t pos = rng.below(active.size());
      const int victim = active[pos];
      frozen[victim] = 1;
      for (int x : blocks[victim]) traj.freezing_times_by_element[x - 1] = t;
      active[pos] = active.back();
      active.pop_back();
      if (record_events) {
        Event e;
        e.time = t;
        e.is_merge = false;
        auto blk = blocks[victim];
        std::sort(blk.begin(), blk.end());
        e.blocks.push_back(std::move(blk));
        traj.events.push_back(std::move(e));
      }
    } else {
      for (int i = 0; i < k; ++i) {  // partial Fisher-Yates prefix
        const int j = i + static_cast<int>(rng.below(active.size() - i));
        std::swap(active[i], active[j]);
      }
      Event e;
      e.time = t;
      e.is_merge = true;
      std::vector<int> merged;
      for (int i = 0; i < k; ++i) {
        auto& src = blocks[active[i]];
        merged.insert(merged.end(), src.begin(), src.end());
        if (record_events) {
          auto blk = src;
          std::sort(blk.begin(), blk.end());
          e.blocks.push_back(std::move(blk));
        }
        src.clear();
      }
      if (record_events) {
        std::sort(e.blocks.begin(), e.blocks.end());
        traj.events.push_back(std::move(e));
      }
      std::sort(merged.begin(), merged.end());
      blocks.push_back(std::move(merged));
      frozen.push_back(0);
      // drop the k merged blocks from the active list, add the new one
      active.erase(active.begin(), active.begin() + k);
      active.push_back(static_cast<int>(blocks.size()) - 1);
    }
  }

  std::vector<std::vector<int>> current;
  std::vector<char> current_frozen;
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].empty()) continue;  // merged-away source block
    current.push_back(std::move(blocks[i]));
    current_frozen.push_back(frozen[i]);
  }
  traj.final = PartiallyFrozenPartition::of(n, std::move(current),
                                            std::move(current_frozen));
  traj.complete = traj.final.all_frozen();
  return traj;
}

Trajectory simulate(int n, const FreezeMeasure& m, RngStream& rng,
                    std::optional<double> horizon, bool record_events) {
  const RateTable rates = RateTable::build(m, n);
  return simulate(n, rates, m.rho, rng, horizon, record_events);
}

std::vector<double> freezing_times(const Trajectory& t) {
  if (!t.complete)
    throw std::invalid_argument("freezing_times: incomplete trajectory");
  return t.freezing_times_by_element;
}

OrderedPartition age_order(const Trajectory& t) {
  if (!t.complete)
    throw std::invalid_argument("age_order: incomplete trajectory");
  OrderedPartition out;
  std::vector<std::pair<double, std::vector<int>>> tagged;
  for (const auto& blk : t.final.blocks) {
    const double tau = t.freezing_times_by_element[blk.front() - 1];
    for (int x : blk)
      if (t.freezing_times_by_element[x - 1] != tau)
        throw std::logic_error("age_order: freezing time varies inside a block");
    tagged.emplace_back(tau, blk);
  }
  std::sort(tagged.begin(), tagged.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t i = 0; i + 1 < tagged.size(); ++i)
    if (tagged[i].first == tagged[i + 1].first)
      throw std::logic_error("age_order: tie between distinct blocks");
  for (auto& [tau, blk] : tagged) {
    out.tau.push_back(tau);
    out.blocks.push_back(std::move(blk));
  }
  return out;
}

namespace {

PaintboxRun paintbox_one_run(const RateTable& rates, const Rational& rho,
                             int n, RngStream rng) {
  const Trajectory traj = simulate(n, rates, rho, rng, std::nullopt, false);
  const auto& tau = traj.freezing_times_by_element;
  PaintboxRun run;
  run.block_count = static_cast<int>(traj.final.blocks.size());
  int singleton_elements = 0;
  for (const auto& blk : traj.final.blocks) {
    const double mytau = tau[blk.front() - 1];
    int earlier = 0;
    for (int x = 1; x <= n; ++x) earlier += (tau[x - 1] < mytau);
    PaintboxRun::Interval iv;
    iv.a = static_cast<double>(earlier) / n;
    iv.b = iv.a + static_cast<double>(blk.size()) / n;
    iv.block_size = static_cast<int>(blk.size());
    run.intervals.push_back(iv);
    if (blk.size() == 1) ++singleton_elements;
  }
  std::sort(run.intervals.begin(), run.intervals.end(),
            [](const auto& x, const auto& y) { return x.a < y.a; });
  run.singleton_freq = static_cast<double>(singleton_elements) / n;
  return run;
}

}  // namespace

PaintboxReport paintbox_estimate(const FreezeMeasure& m, int n, long runs,
                                 uint64_t seed, bool parallel) {
  if (runs < 1) throw std::invalid_argument("paintbox_estimate: runs < 1");
  if (m.rho == 0)
    throw std::invalid_argument("paintbox_estimate: rho must be > 0");
  const RateTable rates = RateTable::build(m, n);
  PaintboxReport report;
  report.n = n;
  report.runs = runs;
  report.seed = seed;
  report.per_run.resize(runs);

#pragma omp parallel for schedule(static) if (parallel)
  for (long r = 0; r < runs; ++r)
    report.per_run[r] =
        paintbox_one_run(rates, m.rho, n, RngStream::for_run(seed, r));

  double sfreq = 0.0, bcount = 0.0;
  for (const auto& run : report.per_run) {
    sfreq += run.singleton_freq;
    bcount += run.block_count;
  }
  report.mean_singleton_freq = sfreq / static_cast<double>(runs);
  report.mean_block_count = bcount / static_cast<double>(runs);
  return report;
}

SingletonReport singleton_report(const FreezeMeasure& m, int n, long runs,
                                 uint64_t seed, bool parallel) {
  if (m.rho <= 0)
    throw std::invalid_argument("singleton_report: rho must be > 0");
  const RateTable rates = RateTable::build(m, n);
  SingletonReport report;
  report.n = n;
  report.runs = runs;
  report.seed = seed;

  double total = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : total) if (parallel)
  for (long r = 0; r < runs; ++r) {
    RngStream rng = RngStream::for_run(seed, r);
    const Trajectory traj = simulate(n, rates, m.rho, rng, std::nullopt, false);
    int singles = 0;
    for (const auto& blk : traj.final.blocks) singles += (blk.size() == 1);
    total += static_cast<double>(singles) / n;
  }
  report.singleton_fraction = total / static_cast<double>(runs);
  report.mu_minus1_finite = !mu_moment(m, -1).infinite;
  report.verdict = report.mu_minus1_finite
                       ? "mu_{-1} finite: singleton blocks persist in the "
                         "final partition"
                       : "mu_{-1} infinite: singleton fraction should vanish "
                         "as n grows";
  return report;
}

namespace {

struct TreeNode {
  double time = 0.0;
  int parent = -1;
  std::vector<std::pair<double, double>> marks;  // (time, uniform) on the
                                                 // edge toward the parent
};

}  // namespace

CoupledRun simulate_coupled(int n, const FreezeMeasure& lambda_only,
                            const Rational& rho_lo, const Rational& rho_hi,
                            RngStream& rng) {
  if (!(rho_lo > 0) || rho_lo > rho_hi)
    throw std::invalid_argument("simulate_coupled: need 0 < rho_lo <= rho_hi");
  // Merge dynamics come from Lambda alone; any rho on the input is ignored.
  const double hi = to_double(rho_hi);
  const double accept_lo = to_double(rho_lo / rho_hi);

  // Merge-rate categories (k >= 2) for the pure coalescent.
  std::vector<std::vector<double>> merge_cdf(n);
  std::vector<double> merge_rate(n, 0.0);
  for (int b = 2; b <= n; ++b) {
    Rational total(0);
    std::vector<Rational> parts;
    for (int k = 2; k <= b; ++k) {
      Rational v = lambda_only.lambda_is_zero()
                       ? Rational(0)
                       : Rational(binomial(b, k)) *
                             lambda_rate(lambda_only, b, k).value;
      total += v;
      parts.push_back(std::move(v));
    }
    merge_rate[b - 1] = to_double(total);
    if (total == 0) continue;
    auto& cdf = merge_cdf[b - 1];
    double acc = 0.0;
    for (auto& v : parts) {
      acc += to_double(v / total);
      cdf.push_back(acc);
    }
    cdf.back() = 1.0;
  }

  std::vector<TreeNode> nodes(n);
  std::vector<int> roots(n);
  std::iota(roots.begin(), roots.end(), 0);
  double t = 0.0;
  while (roots.size() > 1) {
    const int b = static_cast<int>(roots.size());
    const double rate = merge_rate[b - 1];
    if (rate <= 0.0) break;
    t += rng.exponential(rate);
    const int k = draw_from_cdf(merge_cdf[b - 1], rng) + 1;  // categories at k>=2
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(rng.below(roots.size() - i));
      std::swap(roots[i], roots[j]);
    }
    TreeNode parent;
    parent.time = t;
    const int pid = static_cast<int>(nodes.size());
    for (int i = 0; i < k; ++i) nodes[roots[i]].parent = pid;
    nodes.push_back(parent);
    roots.erase(roots.begin(), roots.begin() + k);
    roots.push_back(pid);
  }

  // Poisson marks at rate rho_hi on every edge; root edges extend upward
  // until a mark survives the rho_lo thinning, so both chains terminate.
  for (size_t id = 0; id < nodes.size(); ++id) {
    auto& node = nodes[id];
    double mt = node.time;
    if (node.parent >= 0) {
      const double top = nodes[node.parent].time;
      while (true) {
        mt += rng.exponential(hi);
        if (mt >= top) break;
        node.marks.emplace_back(mt, rng.u01());
      }
    } else {
      bool lo_done = false;
      while (!lo_done) {
        mt += rng.exponential(hi);
        const double u = rng.u01();
        node.marks.emplace_back(mt, u);
        lo_done = (u <= accept_lo);
      }
    }
  }

  // Freezing time of each leaf: first mark (hi) / first surviving mark (lo)
  // on the path toward the root.
  std::vector<double> tau_hi(n, -1.0), tau_lo(n, -1.0);
  for (int leaf = 0; leaf < n; ++leaf) {
    int cur = leaf;
    while (cur >= 0) {
      for (const auto& [mt, u] : nodes[cur].marks) {
        if (tau_hi[leaf] < 0) tau_hi[leaf] = mt;
        if (u <= accept_lo) {
          tau_lo[leaf] = mt;
          break;
        }
      }
      if (tau_lo[leaf] >= 0) break;
      cur = nodes[cur].parent;
    }
    if (tau_hi[leaf] < 0 || tau_lo[leaf] < 0)
      throw std::logic_error("simulate_coupled: unmarked lineage");
  }

  auto group_by_tau = [&](const std::vector<double>& tau) {
    std::map<double, std::vector<int>> groups;
    for (int leaf = 0; leaf < n; ++leaf) groups[tau[leaf]].push_back(leaf + 1);
    std::vector<std::vector<int>> blocks;
    for (auto& [key, blk] : groups) blocks.push_back(std::move(blk));
    return SetPartition::of(n, std::move(blocks));
  };

  CoupledRun run;
  run.low = group_by_tau(tau_lo);
  run.high = group_by_tau(tau_hi);
  run.high_refines_low = true;
  std::map<int, double> leaf_lo;
  for (int leaf = 0; leaf < n; ++leaf) leaf_lo[leaf + 1] = tau_lo[leaf];
  for (const auto& blk : run.high.blocks) {
    const double first = leaf_lo[blk.front()];
    for (int x : blk)
      if (leaf_lo[x] != first) run.high_refines_low = false;
  }
  return run;
}

}  // namespace coalfreeze
