// Apache License, Version 2.0, refer to LICENSE.txt
#include "coalfreeze/chains.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "coalfreeze/combinatorics.hpp"
#include "coalfreeze/eppf.hpp"

namespace coalfreeze {

namespace {

// Category draw from an exact row via its double image; deterministic given
// the stream.
int draw_category(const std::vector<Rational>& row, RngStream& rng) {
  const double u = rng.u01();
  double acc = 0.0;
  for (size_t k = 0; k < row.size(); ++k) {
    acc += to_double(row[k]);
    if (u < acc) return static_cast<int>(k) + 1;
  }
  return static_cast<int>(row.size());  // float slack lands in the last bucket
}

// Uniform k-subset of idx by partial Fisher-Yates; idx is clobbered.
void draw_subset(std::vector<int>& idx, int k, RngStream& rng) {
  const int n = static_cast<int>(idx.size());
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
}

}  // namespace

PartiallyFrozenPartition fm_step(const PartiallyFrozenPartition& state,
                                 const DecrementMatrix& q, RngStream& rng) {
  if (q.flavor() != Flavor::mohle)
    throw std::invalid_argument("fm_step: mohle flavor required");
  const int b = state.active_count();
  if (b == 0) return state;  // identity on all-frozen states
  if (b > q.n_max())
    throw std::invalid_argument("fm_step: matrix smaller than active count");

  std::vector<int> active = state.active_indices();
  int category = 1;
  if (b > 1) category = draw_category(q.row(b), rng);

  std::vector<std::vector<int>> blocks = state.blocks;
  std::vector<char> frozen = state.frozen;
  if (category == 1) {
    const int victim = active[rng.below(active.size())];
    frozen[victim] = 1;
  } else {
    draw_subset(active, category, rng);
    std::sort(active.begin(), active.end());
    auto& target = blocks[active[0]];
    for (size_t i = 1; i < active.size(); ++i) {
      auto& src = blocks[active[i]];
      target.insert(target.end(), src.begin(), src.end());
      src.clear();
    }
    std::vector<std::vector<int>> kept;
    std::vector<char> kept_frozen;
    for (size_t i = 0; i < blocks.size(); ++i) {
      if (blocks[i].empty()) continue;
      kept.push_back(std::move(blocks[i]));
      kept_frozen.push_back(frozen[i]);
    }
    blocks = std::move(kept);
    frozen = std::move(kept_frozen);
  }
  return PartiallyFrozenPartition::of(state.n, std::move(blocks),
                                      std::move(frozen));
}

FmRunResult fm_run(int n, const DecrementMatrix& q, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("fm_run: n < 1");
  if (q.n_max() < n) throw std::invalid_argument("fm_run: matrix too small");
  PartiallyFrozenPartition state =
      PartiallyFrozenPartition::all_active_singletons(n);
  FmRunResult result;
  while (!state.all_frozen()) {
    state = fm_step(state, q, rng);
    ++result.steps;
    if (result.steps > 2 * n - 1)  // n freezes plus at most n-1 merges
      throw std::logic_error("fm_run: exceeded the 2n-1 step bound");
  }
  result.final = state.induced();
  return result;
}

SetPartition sa_step(const SetPartition& state,
                     const std::vector<Rational>& row_n, RngStream& rng) {
  const int n = state.n;
  if (static_cast<int>(row_n.size()) != n)
    throw std::invalid_argument("sa_step: row size must equal n");
  const int k = draw_category(row_n, rng);

  std::vector<std::vector<int>> blocks = state.blocks;
  if (k == 1) {
    const int ball = 1 + static_cast<int>(rng.below(n));
    for (auto& blk : blocks) std::erase(blk, ball);
    blocks.push_back({ball});
  } else {
    std::vector<int> balls(n);
    std::iota(balls.begin(), balls.end(), 1);
    draw_subset(balls, k - 1, rng);  // ordered sample of the moved balls
    std::vector<char> moved(static_cast<size_t>(n) + 1, 0);
    for (int bll : balls) moved[bll] = 1;
    std::vector<int> remaining;
    remaining.reserve(n - k + 1);
    for (int x = 1; x <= n; ++x)
      if (!moved[x]) remaining.push_back(x);
    const int mark = remaining[rng.below(remaining.size())];
    for (auto& blk : blocks) {
      std::erase_if(blk, [&](int x) { return moved[x]; });
    }
    for (auto& blk : blocks) {
      if (std::find(blk.begin(), blk.end(), mark) != blk.end()) {
        blk.insert(blk.end(), balls.begin(), balls.end());
        break;
      }
    }
  }
  std::erase_if(blocks, [](const auto& blk) { return blk.empty(); });
  return SetPartition::of(n, std::move(blocks));
}

void Distribution::validate() const {
  Rational total(0);
  for (const auto& [sp, p] : mass) {
    if (p < 0) throw std::runtime_error("distribution: negative mass");
    total += p;
  }
  if (total != 1) throw std::runtime_error("distribution: total mass != 1");
}

std::map<IntegerPartition, Rational> shape_law(const Distribution& dist) {
  std::map<IntegerPartition, Rational> out;
  for (const auto& [sp, p] : dist.mass) out[sp.shape()] += p;
  return out;
}

std::map<IntegerPartition, Rational> eppf_shape_law(const EppfTable& p, int n) {
  // support only, matching shape_law() of an exact chain law
  std::map<IntegerPartition, Rational> out;
  for (const auto& lam : integer_partitions_of(n)) {
    const Rational& v = p.at(lam);
    if (v != 0) out[lam] = Rational(shape_count(lam)) * v;
  }
  return out;
}

namespace {

std::vector<std::vector<int>> k_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i <= n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 1);
  return out;
}

}  // namespace

std::vector<std::vector<Rational>> sa_transition_matrix(
    int n, const std::vector<Rational>& row_n) {
  if (n > 8)
    throw std::invalid_argument("sa_transition_matrix: n > 8 (state guard)");
  if (static_cast<int>(row_n.size()) != n)
    throw std::invalid_argument("sa_transition_matrix: row size must equal n");
  const auto states = enumerate_set_partitions(n);
  std::map<SetPartition, int> index;
  for (size_t i = 0; i < states.size(); ++i)
    index.emplace(states[i], static_cast<int>(i));
  const size_t N = states.size();
  std::vector<std::vector<Rational>> P(N, std::vector<Rational>(N, Rational(0)));

  for (size_t si = 0; si < N; ++si) {
    const auto& sp = states[si];
    if (row_n[0] != 0) {
      const Rational w = row_n[0] / n;
      for (int ball = 1; ball <= n; ++ball) {
        auto blocks = sp.blocks;
        for (auto& blk : blocks) std::erase(blk, ball);
        std::erase_if(blocks, [](const auto& blk) { return blk.empty(); });
        blocks.push_back({ball});
        P[si][index.at(SetPartition::of(n, std::move(blocks)))] += w;
      }
    }
    for (int k = 2; k <= n; ++k) {
      if (row_n[k - 1] == 0) continue;
      const Rational w =
          row_n[k - 1] / (binomial_q(n, k - 1) * Rational(n - k + 1));
      for (const auto& moved : k_subsets(n, k - 1)) {
        std::vector<char> is_moved(static_cast<size_t>(n) + 1, 0);
        for (int x : moved) is_moved[x] = 1;
        for (int mark = 1; mark <= n; ++mark) {
          if (is_moved[mark]) continue;
          auto blocks = sp.blocks;
          for (auto& blk : blocks)
            std::erase_if(blk, [&](int x) { return is_moved[x]; });
          std::erase_if(blocks, [](const auto& blk) { return blk.empty(); });
          for (auto& blk : blocks) {
            if (std::find(blk.begin(), blk.end(), mark) != blk.end()) {
              blk.insert(blk.end(), moved.begin(), moved.end());
              break;
            }
          }
          P[si][index.at(SetPartition::of(n, std::move(blocks)))] += w;
        }
      }
    }
  }
  return P;
}

namespace {

// Solves pi P = pi with sum(pi) = 1 by Gaussian elimination on
// (P^T - I) x = 0 with the last equation replaced by normalization.
std::vector<Rational> stationary_solve(
    const std::vector<std::vector<Rational>>& P) {
  const size_t N = P.size();
  std::vector<std::vector<Rational>> A(N, std::vector<Rational>(N + 1, Rational(0)));
  for (size_t i = 0; i + 1 < N; ++i) {
    for (size_t j = 0; j < N; ++j) A[i][j] = P[j][i];
    A[i][i] -= 1;
  }
  for (size_t j = 0; j < N; ++j) A[N - 1][j] = 1;
  A[N - 1][N] = 1;

  size_t row = 0;
  std::vector<int> pivot_col(N, -1);
  for (size_t col = 0; col < N && row < N; ++col) {
    size_t piv = row;
    while (piv < N && A[piv][col] == 0) ++piv;
    if (piv == N) continue;
    std::swap(A[piv], A[row]);
    const Rational inv = 1 / A[row][col];
    for (size_t j = col; j <= N; ++j) A[row][j] *= inv;
    for (size_t i = 0; i < N; ++i) {
      if (i == row || A[i][col] == 0) continue;
      const Rational f = A[i][col];
      for (size_t j = col; j <= N; ++j) A[i][j] -= f * A[row][j];
    }
    pivot_col[row] = static_cast<int>(col);
    ++row;
  }
  std::vector<Rational> x(N, Rational(0));
  for (size_t i = 0; i < row; ++i)
    if (pivot_col[i] >= 0) x[pivot_col[i]] = A[i][N];
  // The replaced equation is implied by the others only when there is a
  // single closed class; verify the fixed point rather than trusting rank.
  Rational total(0);
  for (const auto& v : x) total += v;
  if (total != 1)
    throw std::runtime_error("stationary_solve: solution does not normalize");
  for (size_t i = 0; i < N; ++i) {
    Rational acc(0);
    for (size_t j = 0; j < N; ++j)
      if (x[j] != 0 && P[j][i] != 0) acc += x[j] * P[j][i];
    if (acc != x[i])
      throw std::runtime_error("stationary_solve: fixed point check failed");
  }
  return x;
}

}  // namespace

Distribution sa_stationary(int n, const std::vector<Rational>& row_n) {
  if (static_cast<int>(row_n.size()) != n)
    throw std::invalid_argument("sa_stationary: row size must equal n");
  Distribution dist;
  if (row_n[0] == 1) {
    dist.mass[SetPartition::singletons(n)] = Rational(1);
    return dist;
  }
  if (row_n[0] == 0) {
    dist.mass[SetPartition::one_block(n)] = Rational(1);
    return dist;
  }
  const auto states = enumerate_set_partitions(n);
  const auto P = sa_transition_matrix(n, row_n);
  const auto pi = stationary_solve(P);
  for (size_t i = 0; i < states.size(); ++i)
    if (pi[i] != 0) dist.mass[states[i]] = pi[i];
  dist.validate();
  return dist;
}

std::vector<int> sa_recurrent_class(int n, const std::vector<Rational>& row_n) {
  const auto P = sa_transition_matrix(n, row_n);
  const int N = static_cast<int>(P.size());
  std::vector<std::vector<int>> adj(N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (P[i][j] != 0) adj[i].push_back(j);

  // Tarjan strongly connected components.
  std::vector<int> low(N, -1), disc(N, -1), comp(N, -1);
  std::vector<int> stk;
  std::vector<char> on_stack(N, 0);
  int timer = 0, ncomp = 0;
  std::function<void(int)> dfs = [&](int u) {
    disc[u] = low[u] = timer++;
    stk.push_back(u);
    on_stack[u] = 1;
    for (int v : adj[u]) {
      if (disc[v] == -1) {
        dfs(v);
        low[u] = std::min(low[u], low[v]);
      } else if (on_stack[v]) {
        low[u] = std::min(low[u], disc[v]);
      }
    }
    if (low[u] == disc[u]) {
      while (true) {
        int v = stk.back();
        stk.pop_back();
        on_stack[v] = 0;
        comp[v] = ncomp;
        if (v == u) break;
      }
      ++ncomp;
    }
  };
  for (int i = 0; i < N; ++i)
    if (disc[i] == -1) dfs(i);

  std::vector<char> has_exit(ncomp, 0);
  for (int u = 0; u < N; ++u)
    for (int v : adj[u])
      if (comp[u] != comp[v]) has_exit[comp[u]] = 1;
  std::vector<int> bottom;
  for (int c = 0; c < ncomp; ++c)
    if (!has_exit[c]) bottom.push_back(c);
  if (bottom.size() != 1)
    throw std::runtime_error("sa_recurrent_class: " +
                             std::to_string(bottom.size()) +
                             " closed classes, expected exactly one");
  std::vector<int> members;
  for (int u = 0; u < N; ++u)
    if (comp[u] == bottom[0]) members.push_back(u);
  return members;
}

namespace {

struct FmOutcome {
  PartiallyFrozenPartition state;
  Rational prob;
};

// All one-step outcomes of the FM move with exact probabilities.
std::vector<FmOutcome> fm_step_outcomes(const PartiallyFrozenPartition& state,
                                        const DecrementMatrix& q) {
  std::vector<FmOutcome> out;
  const int b = state.active_count();
  if (b == 0) return out;
  const auto active = state.active_indices();
  const auto& row = (b == 1) ? std::vector<Rational>{Rational(1)} : q.row(b);

  if (row[0] != 0) {
    const Rational w = row[0] / b;
    for (int idx : active) {
      auto frozen = state.frozen;
      frozen[idx] = 1;
      out.push_back({PartiallyFrozenPartition::of(state.n, state.blocks,
                                                  std::move(frozen)),
                     w});
    }
  }
  for (int k = 2; k <= b; ++k) {
    if (row[k - 1] == 0) continue;
    const Rational w = row[k - 1] / binomial_q(b, k);
    for (const auto& pick : k_subsets(b, k)) {
      std::vector<char> chosen(state.blocks.size(), 0);
      for (int pos : pick) chosen[active[pos - 1]] = 1;
      std::vector<std::vector<int>> blocks;
      std::vector<char> frozen;
      std::vector<int> merged;
      for (size_t i = 0; i < state.blocks.size(); ++i) {
        if (chosen[i]) {
          merged.insert(merged.end(), state.blocks[i].begin(),
                        state.blocks[i].end());
        } else {
          blocks.push_back(state.blocks[i]);
          frozen.push_back(state.frozen[i]);
        }
      }
      blocks.push_back(std::move(merged));
      frozen.push_back(0);
      out.push_back({PartiallyFrozenPartition::of(state.n, std::move(blocks),
                                                  std::move(frozen)),
                     w});
    }
  }
  return out;
}

std::string pf_to_string(const PartiallyFrozenPartition& p) {
  std::ostringstream os;
  for (size_t i = 0; i < p.blocks.size(); ++i) {
    if (i) os << '|';
    os << '{';
    for (size_t j = 0; j < p.blocks[i].size(); ++j) {
      if (j) os << ',';
      os << p.blocks[i][j];
    }
    os << '}';
    if (p.frozen[i]) os << '*';
  }
  return os.str();
}

}  // namespace

Distribution fm_final_law(int n, const DecrementMatrix& q) {
  if (n > 5)
    throw std::invalid_argument("fm_final_law: n > 5 (event tree guard)");
  if (q.flavor() != Flavor::mohle)
    throw std::invalid_argument("fm_final_law: mohle flavor required");
  std::map<PartiallyFrozenPartition, std::map<SetPartition, Rational>> memo;

  std::function<const std::map<SetPartition, Rational>&(
      const PartiallyFrozenPartition&)>
      law = [&](const PartiallyFrozenPartition& state)
      -> const std::map<SetPartition, Rational>& {
    auto it = memo.find(state);
    if (it != memo.end()) return it->second;
    std::map<SetPartition, Rational> acc;
    if (state.all_frozen()) {
      acc[state.induced()] = Rational(1);
    } else {
      for (const auto& [next, prob] : fm_step_outcomes(state, q))
        for (const auto& [sp, p] : law(next)) acc[sp] += prob * p;
    }
    return memo.emplace(state, std::move(acc)).first->second;
  };

  Distribution dist;
  dist.mass = law(PartiallyFrozenPartition::all_active_singletons(n));
  dist.validate();
  return dist;
}

namespace {

using RestrictedLaw = std::map<PartiallyFrozenPartition, Rational>;

double tv_distance(const RestrictedLaw& a, const RestrictedLaw& b) {
  Rational acc(0);
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    acc += abs(v - (it == b.end() ? Rational(0) : it->second));
  }
  for (const auto& [k, v] : b)
    if (!a.count(k)) acc += v;
  return to_double(acc / 2);
}

double tv_distance_counts(const std::map<PartiallyFrozenPartition, long>& a,
                          const std::map<PartiallyFrozenPartition, long>& b,
                          long na, long nb) {
  double acc = 0.0;
  auto get = [](const auto& m, const auto& k) {
    auto it = m.find(k);
    return it == m.end() ? 0L : it->second;
  };
  std::map<PartiallyFrozenPartition, char> keys;
  for (const auto& [k, v] : a) keys[k] = 1;
  for (const auto& [k, v] : b) keys[k] = 1;
  for (const auto& [k, unused] : keys)
    acc += std::abs(static_cast<double>(get(a, k)) / na -
                    static_cast<double>(get(b, k)) / nb);
  return acc / 2;
}

// Law of the restriction to [m] at the first step where it changes, under
// the iterated FM_n chain.
RestrictedLaw first_change_law(const PartiallyFrozenPartition& start,
                               const DecrementMatrix& q, int m,
                               std::map<PartiallyFrozenPartition, RestrictedLaw>&
                                   memo) {
  auto it = memo.find(start);
  if (it != memo.end()) return it->second;
  const PartiallyFrozenPartition base = start.restrict_to(m);
  RestrictedLaw acc;
  for (const auto& [next, prob] : fm_step_outcomes(start, q)) {
    PartiallyFrozenPartition r = next.restrict_to(m);
    if (!(r == base)) {
      acc[r] += prob;
    } else {
      if (next.all_frozen())  // an active block meets [m], so it must change
        throw std::logic_error("first_change_law: chain froze silently");
      for (const auto& [rr, pp] : first_change_law(next, q, m, memo))
        acc[rr] += prob * pp;
    }
  }
  memo.emplace(start, acc);
  return acc;
}

std::vector<PartiallyFrozenPartition> exact_battery(int n) {
  std::vector<PartiallyFrozenPartition> out;
  for (const auto& sp : enumerate_set_partitions(n)) {
    const size_t nb = sp.blocks.size();
    for (unsigned mask = 0; mask < (1u << nb); ++mask) {
      std::vector<char> frozen(nb, 0);
      for (size_t i = 0; i < nb; ++i) frozen[i] = (mask >> i) & 1;
      out.push_back(PartiallyFrozenPartition::of(n, sp.blocks, frozen));
    }
  }
  return out;
}

std::vector<PartiallyFrozenPartition> mc_battery(int n) {
  // Small fixed battery: all-active singletons plus a few frozen/merged
  // variants touching [m] and not.
  std::vector<PartiallyFrozenPartition> out;
  out.push_back(PartiallyFrozenPartition::all_active_singletons(n));
  {
    auto s = PartiallyFrozenPartition::all_active_singletons(n);
    s.frozen[0] = 1;
    out.push_back(PartiallyFrozenPartition::of(n, s.blocks, s.frozen));
  }
  {
    auto s = PartiallyFrozenPartition::all_active_singletons(n);
    s.frozen[n - 1] = 1;
    out.push_back(PartiallyFrozenPartition::of(n, s.blocks, s.frozen));
  }
  if (n >= 3) {
    std::vector<std::vector<int>> blocks{{1, 2}};
    for (int x = 3; x <= n; ++x) blocks.push_back({x});
    out.push_back(PartiallyFrozenPartition::of(
        n, blocks, std::vector<char>(blocks.size(), 0)));
  }
  return out;
}

}  // namespace

JumpConsistencyReport check_jump_consistency(const DecrementMatrix& q, int n,
                                             int m, long samples,
                                             uint64_t seed) {
  if (q.flavor() != Flavor::mohle)
    throw std::invalid_argument("check_jump_consistency: mohle flavor required");
  if (n > 10 || n < 1)
    throw std::invalid_argument("check_jump_consistency: need 1 <= n <= 10");
  if (m > n || m < 1)
    throw std::invalid_argument("check_jump_consistency: need 1 <= m <= n");
  if (q.n_max() < n)
    throw std::invalid_argument("check_jump_consistency: matrix too small");

  JumpConsistencyReport report;
  report.n = n;
  report.m = m;
  if (m == n) {  // restriction is the identity; nothing to compare
    report.exact_mode = true;
    return report;
  }

  if (n <= 5) {
    report.exact_mode = true;
    std::map<PartiallyFrozenPartition, RestrictedLaw> memo;
    for (const auto& state : exact_battery(n)) {
      if (state.active_count() == 0) continue;
      const auto rst = state.restrict_to(m);
      if (rst.active_count() == 0) continue;  // FM_m is the identity here
      ++report.states_checked;
      RestrictedLaw one_step;
      for (const auto& [next, prob] : fm_step_outcomes(rst, q))
        one_step[next] += prob;
      const RestrictedLaw jump = first_change_law(state, q, m, memo);
      const double tv = tv_distance(one_step, jump);
      if (tv > report.max_tv) {
        report.max_tv = tv;
        report.worst_state = pf_to_string(state);
      }
    }
    return report;
  }

  report.exact_mode = false;
  if (samples < 1)
    throw std::invalid_argument(
        "check_jump_consistency: samples required for n > 5");
  report.samples = samples;
  report.seed = seed;
  uint64_t stream_id = 0;
  for (const auto& state : mc_battery(n)) {
    const auto rst = state.restrict_to(m);
    if (state.active_count() == 0 || rst.active_count() == 0) continue;
    ++report.states_checked;
    std::map<PartiallyFrozenPartition, long> one_step, jump;
    for (long s = 0; s < samples; ++s) {
      RngStream rng = RngStream::for_run(seed, stream_id * 2 * samples + s);
      // restrict the matrix action: fm_step on the m-state uses row sizes <= m
      one_step[fm_step(rst, q, rng)] += 1;
    }
    for (long s = 0; s < samples; ++s) {
      RngStream rng =
          RngStream::for_run(seed, stream_id * 2 * samples + samples + s);
      PartiallyFrozenPartition cur = state;
      PartiallyFrozenPartition r = rst;
      while (r == rst) {
        cur = fm_step(cur, q, rng);
        r = cur.restrict_to(m);
      }
      jump[r] += 1;
    }
    size_t cells = 0;
    {
      std::map<PartiallyFrozenPartition, char> keys;
      for (const auto& [k, v] : one_step) keys[k] = 1;
      for (const auto& [k, v] : jump) keys[k] = 1;
      cells = keys.size();
    }
    const double tv = tv_distance_counts(one_step, jump, samples, samples);
    const double err = std::sqrt(static_cast<double>(cells) /
                                 (2.0 * static_cast<double>(samples)));
    report.mc_error = std::max(report.mc_error, err);
    if (tv > report.max_tv) {
      report.max_tv = tv;
      report.worst_state = pf_to_string(state);
    }
    ++stream_id;
  }
  return report;
}

}  // namespace coalfreeze
