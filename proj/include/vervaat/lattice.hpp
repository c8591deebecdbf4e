#ifndef VERVAAT_LATTICE_HPP_
#define VERVAAT_LATTICE_HPP_

#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "vervaat/path.hpp"

namespace vervaat {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Largest n accepted by the enumeration routines.
inline constexpr int kEnumerationLimit = 24;

inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// log C(n,k) through lgamma; for sizes beyond exact enumeration.
inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

namespace detail {

inline void check_bridge_args(int n, int a) {
  if (n < 1) throw std::invalid_argument("walk length must be positive");
  if (std::abs(a) > n) throw std::invalid_argument("endpoint out of reach: |a| > n");
  if ((n - a) % 2 != 0) throw std::invalid_argument("parity mismatch: a and n must have the same parity");
}

inline void check_enumeration_guard(int n) {
  if (n > kEnumerationLimit)
    throw std::length_error("enumeration capacity exceeded: n = " + std::to_string(n) +
                            " > " + std::to_string(kEnumerationLimit));
}

template <class Visit>
void enumerate_rec(std::vector<int>& steps, int n, int a, int value, Visit& visit) {
  const int j = static_cast<int>(steps.size());
  if (j == n) {
    visit(steps);
    return;
  }
  const int remaining = n - j - 1;
  for (int s : {-1, 1}) {
    if (std::abs(a - (value + s)) > remaining) continue;  // cannot reach a any more
    steps.push_back(s);
    enumerate_rec(steps, n, a, value + s, visit);
    steps.pop_back();
  }
}

}  // namespace detail

/// Calls visit(LatticeWalk) for every bridge of length n from 0 to a.
template <class Visit>
void for_each_bridge(int n, int a, Visit visit) {
  detail::check_bridge_args(n, a);
  detail::check_enumeration_guard(n);
  std::vector<int> steps;
  steps.reserve(static_cast<std::size_t>(n));
  auto adapter = [&](const std::vector<int>& s) { visit(LatticeWalk::from_steps(s)); };
  detail::enumerate_rec(steps, n, a, 0, adapter);
}

/// Calls visit(LatticeWalk) for all 2^n walks of length n.
template <class Visit>
void for_each_walk(int n, Visit visit) {
  if (n < 1) throw std::invalid_argument("walk length must be positive");
  detail::check_enumeration_guard(n);
  std::vector<int> steps(static_cast<std::size_t>(n));
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    for (int j = 0; j < n; ++j) steps[static_cast<std::size_t>(j)] = (mask >> j) & 1u ? 1 : -1;
    visit(LatticeWalk::from_steps(steps));
  }
}

struct BridgeEnsemble {
  int n = 0;
  int a = 0;
  std::vector<LatticeWalk> walks;
};

inline BridgeEnsemble enumerate_bridges(int n, int a) {
  BridgeEnsemble e{n, a, {}};
  for_each_bridge(n, a, [&](LatticeWalk w) { e.walks.push_back(std::move(w)); });
  return e;
}

/*
 * Walks of length m from 0 that first hit -k at time m: (k/m) C(m, (m+k)/2).
 * k = 0 is accepted as the empty passage (1 if m = 0, else 0).
 */
inline BigInt count_first_passage(int m, int k) {
  if (k < 0 || m < 0) throw std::invalid_argument("first passage needs m >= 0 and k >= 0");
  if (k == 0) return m == 0 ? 1 : 0;
  if (m < k) throw std::invalid_argument("first passage needs m >= k");
  if ((m - k) % 2 != 0) throw std::invalid_argument("parity mismatch: m and k must have the same parity");
  return binomial(m, (m + k) / 2) * k / m;
}

/// Exact probability mass function on integer support.
struct ExactPmf {
  std::map<int, Rational> mass;

  Rational total() const {
    Rational s = 0;
    for (const auto& [l, p] : mass) s += p;
    return s;
  }
  double at(int l) const {
    const auto it = mass.find(l);
    return it == mass.end() ? 0.0 : it->second.convert_to<double>();
  }
  bool operator==(const ExactPmf&) const = default;
};

/*
 * Law of Z^a, the first hitting time of -1 by the Vervaat image of a uniform
 * bridge 0 -> a (a < 0):
 *   P(Z = l) = C(l, (l+1)/2) * #fp(n-l, |a|-1) / C(n, (n+|a|)/2),  l odd,
 * i.e. each (excursion piece, passage piece) pair is counted l times.
 * The binomials are read as C(upper = length, lower = up-steps).
 */
inline ExactPmf z_pmf(int n, int a) {
  detail::check_bridge_args(n, a);
  if (a >= 0) throw std::invalid_argument("z_pmf needs a negative endpoint");
  const int depth = -a;
  const BigInt total = binomial(n, (n + depth) / 2);
  ExactPmf pmf;
  for (int l = 1; l <= n; l += 2) {
    const int rest = n - l;
    if (rest < depth - 1 || (rest - (depth - 1)) % 2 != 0) continue;
    const BigInt configs = binomial(l, (l + 1) / 2) * count_first_passage(rest, depth - 1);
    if (configs != 0) pmf.mass[l] = Rational(configs, total);
  }
  return pmf;
}

/// Same law as z_pmf in floating point via lgamma, usable for large n.
inline std::map<int, double> z_pmf_real(int n, int a) {
  detail::check_bridge_args(n, a);
  if (a >= 0) throw std::invalid_argument("z_pmf needs a negative endpoint");
  const int depth = -a;
  const double log_total = log_binomial(n, (n + depth) / 2);
  std::map<int, double> pmf;
  for (int l = 1; l <= n; l += 2) {
    const int rest = n - l;
    if (rest < depth - 1 || (rest - (depth - 1)) % 2 != 0) continue;
    if (depth == 1) {
      if (rest == 0) pmf[l] = std::exp(log_binomial(l, (l + 1) / 2) - log_total);
      continue;
    }
    const double log_fp = std::log(depth - 1.0) - std::log(static_cast<double>(rest)) +
                          log_binomial(rest, (rest + depth - 1) / 2);
    pmf[l] = std::exp(log_binomial(l, (l + 1) / 2) + log_fp - log_total);
  }
  return pmf;
}

/// Z of a Vervaat image: first index j > 0 with v(j) = -1.
inline int vervaat_first_return(const LatticeWalk& v) {
  const auto z = first_hit(v, -1);
  if (!z) throw std::logic_error("Vervaat image of a bridge to a < 0 must reach -1");
  return static_cast<int>(*z);
}

/// Law of Z obtained by enumerating every bridge and transforming it.
inline ExactPmf empirical_z_pmf(int n, int a) {
  if (a >= 0) throw std::invalid_argument("empirical_z_pmf needs a negative endpoint");
  std::map<int, BigInt> counts;
  BigInt total = 0;
  for_each_bridge(n, a, [&](const LatticeWalk& w) {
    ++counts[vervaat_first_return(vervaat_discrete(w).walk)];
    ++total;
  });
  ExactPmf pmf;
  for (const auto& [l, c] : counts) pmf.mass[l] = Rational(c, total);
  return pmf;
}

/// Membership in the image set of (V, K) for bridges ending at a < 0.
inline bool in_vervaat_image(const LatticeWalk& v, std::size_t k, int a) {
  const std::size_t n = v.length();
  if (v.endpoint() != a || k > n) return false;
  for (std::size_t j = 0; j <= k; ++j)
    if (v[j] < 0) return false;
  for (std::size_t j = k; j < n; ++j)
    if (v[j] <= a) return false;
  return true;
}

/*
 * Exhaustive check that w -> (V(w), K(w)) maps the bridges 0 -> a (a < 0)
 * one-to-one onto {(v,k): v(j) >= 0 for j <= k, v(j) > a for k <= j < n, v(n) = a}.
 */
inline bool bijection_holds(int n, int a) {
  if (a >= 0) throw std::invalid_argument("bijection check needs a negative endpoint");
  std::set<std::pair<LatticeWalk, std::size_t>> images;
  bool ok = true;
  std::size_t count = 0;
  for_each_bridge(n, a, [&](const LatticeWalk& w) {
    const auto [v, k] = vervaat_discrete(w);
    ok = ok && in_vervaat_image(v, k.value, a);
    images.emplace(v, k.value);
    ++count;
  });
  if (!ok || images.size() != count) return false;
  std::size_t target = 0;
  for_each_bridge(n, a, [&](const LatticeWalk& v) {
    for (std::size_t k = 0; k <= v.length(); ++k) {
      if (!in_vervaat_image(v, k, a)) continue;
      ++target;
      if (!images.contains({v, k})) ok = false;
    }
  });
  return ok && target == count;
}

/// Conditional laws of the two pieces of V(w) given Z = l.
struct PieceLaws {
  int l = 0;
  std::map<LatticeWalk, Rational> first;   // V on [0, l]
  std::map<LatticeWalk, Rational> second;  // V on [l, n], re-based at 0
  bool independent = false;                // joint law == product of marginals
  bool uniform = false;                    // both marginals uniform on the full passage sets
};

inline PieceLaws conditional_piece_laws(int n, int a, int l) {
  if (a >= 0) throw std::invalid_argument("piece laws need a negative endpoint");
  std::map<std::pair<LatticeWalk, LatticeWalk>, BigInt> joint;
  std::map<LatticeWalk, BigInt> first, second;
  BigInt total = 0;
  for_each_bridge(n, a, [&](const LatticeWalk& w) {
    const LatticeWalk v = vervaat_discrete(w).walk;
    if (vervaat_first_return(v) != l) return;
    auto p1 = v.slice(0, static_cast<std::size_t>(l));
    auto p2 = v.slice(static_cast<std::size_t>(l), v.length());
    ++first[p1];
    ++second[p2];
    ++joint[{std::move(p1), std::move(p2)}];
    ++total;
  });
  if (total == 0) throw std::invalid_argument("l is not in the support of Z");
  PieceLaws out;
  out.l = l;
  for (const auto& [p, c] : first) out.first[p] = Rational(c, total);
  for (const auto& [p, c] : second) out.second[p] = Rational(c, total);
  bool independent = joint.size() == first.size() * second.size();
  for (const auto& [pair, c] : joint) {
    if (!independent) break;
    independent = Rational(c, total) == out.first[pair.first] * out.second[pair.second];
  }
  out.independent = independent;
  auto is_uniform = [](const std::map<LatticeWalk, Rational>& m, const BigInt& expected_size) {
    if (BigInt(m.size()) != expected_size) return false;
    for (const auto& [p, q] : m)
      if (q != Rational(1, expected_size)) return false;
    return true;
  };
  out.uniform = is_uniform(out.first, count_first_passage(l, 1)) &&
                is_uniform(out.second, count_first_passage(n - l, -a - 1));
  return out;
}

/// Law of the helper variable K over the preimages of one Vervaat image.
struct HelperLaw {
  int first_return = 0;                // Z(v)
  std::map<std::size_t, Rational> k;   // K value -> conditional mass
  bool uniform_over_first_return = false;  // K uniform on {0, ..., Z(v) - 1}
};

inline std::map<LatticeWalk, HelperLaw> helper_distribution(int n, int a) {
  if (a >= 0) throw std::invalid_argument("helper distribution needs a negative endpoint");
  std::map<LatticeWalk, std::vector<std::size_t>> preimages;
  for_each_bridge(n, a, [&](const LatticeWalk& w) {
    auto [v, k] = vervaat_discrete(w);
    preimages[std::move(v)].push_back(k.value);
  });
  std::map<LatticeWalk, HelperLaw> out;
  for (const auto& [v, ks] : preimages) {
    HelperLaw law;
    law.first_return = vervaat_first_return(v);
    for (std::size_t k : ks) law.k[k] += Rational(1, static_cast<long>(ks.size()));
    bool ok = ks.size() == static_cast<std::size_t>(law.first_return) && law.k.size() == ks.size();
    for (std::size_t expected = 0; ok && expected < ks.size(); ++expected) ok = law.k.contains(expected);
    law.uniform_over_first_return = ok;
    out.emplace(v, std::move(law));
  }
  return out;
}

/// Multiset {Q(w)} equals multiset {V(w)} over all walks of length n.
inline bool quantile_vervaat_multisets_equal(int n) {
  std::map<LatticeWalk, long> balance;
  for_each_walk(n, [&](const LatticeWalk& w) {
    ++balance[quantile_discrete(w)];
    --balance[vervaat_discrete(w).walk];
  });
  for (const auto& [v, c] : balance)
    if (c != 0) return false;
  return true;
}

/// All admissible negative endpoints for length n.
inline std::vector<int> negative_endpoints(int n) {
  std::vector<int> out;
  for (int a = -1; a >= -n; --a)
    if ((n - a) % 2 == 0) out.push_back(a);
  return out;
}

}  // namespace vervaat

#endif  // VERVAAT_LATTICE_HPP_
