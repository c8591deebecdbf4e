#ifndef VERVAAT_PATH_HPP_
#define VERVAAT_PATH_HPP_

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vervaat {

/// Position on a lattice walk (0..n) or on a sampling grid (0..N).
struct SplitIndex {
  std::size_t value = 0;
  auto operator<=>(const SplitIndex&) const = default;
};

/*
 * Simple walk of length n with +-1 increments, stored as its values
 * w(0) = 0, w(1), ..., w(n).
 */
class LatticeWalk {
 public:
  LatticeWalk() : values_{0} {}

  /// Builds from increments; every step must be +1 or -1.
  static LatticeWalk from_steps(std::span<const int> steps) {
    LatticeWalk w;
    w.values_.reserve(steps.size() + 1);
    for (int s : steps) {
      if (s != 1 && s != -1) throw std::invalid_argument("walk steps must be +1 or -1");
      w.values_.push_back(w.values_.back() + s);
    }
    return w;
  }

  /// Builds from w(1..n); w(0) = 0 is implied.
  static LatticeWalk from_values(std::span<const int> tail) {
    std::vector<int> steps(tail.size());
    int prev = 0;
    for (std::size_t j = 0; j < tail.size(); ++j) {
      steps[j] = tail[j] - prev;
      prev = tail[j];
    }
    return from_steps(steps);
  }

  std::size_t length() const { return values_.size() - 1; }
  int operator[](std::size_t j) const { return values_[j]; }
  int endpoint() const { return values_.back(); }
  int step(std::size_t j) const { return values_[j] - values_[j - 1]; }  // j in [1,n]
  std::span<const int> values() const { return values_; }

  std::vector<int> steps() const {
    std::vector<int> out(length());
    for (std::size_t j = 1; j <= length(); ++j) out[j - 1] = step(j);
    return out;
  }

  /// Sub-walk on [from, to], re-based to start at 0.
  LatticeWalk slice(std::size_t from, std::size_t to) const {
    LatticeWalk w;
    w.values_.clear();
    for (std::size_t j = from; j <= to; ++j) w.values_.push_back(values_[j] - values_[from]);
    return w;
  }

  auto operator<=>(const LatticeWalk&) const = default;
  bool operator==(const LatticeWalk&) const = default;

 private:
  std::vector<int> values_;
};

/*
 * Real path on the uniform grid t_i = i * duration / N, i = 0..N.
 */
class SampledPath {
 public:
  SampledPath(double duration, std::vector<double> values)
      : duration_(duration), values_(std::move(values)) {
    if (values_.size() < 2) throw std::invalid_argument("a sampled path needs at least 2 grid values");
    if (!(duration_ > 0.0)) throw std::invalid_argument("path duration must be positive");
  }

  std::size_t n_steps() const { return values_.size() - 1; }
  double duration() const { return duration_; }
  double dt() const { return duration_ / static_cast<double>(n_steps()); }
  double time(std::size_t i) const {
    return duration_ * static_cast<double>(i) / static_cast<double>(n_steps());
  }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Grid index nearest to time t (clamped to the grid).
  std::size_t nearest_index(double t) const {
    const double x = std::round(t / duration_ * static_cast<double>(n_steps()));
    if (x <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(x), n_steps());
  }

  /// Linear interpolation of the grid values at time t in [0, duration].
  double at_time(double t) const {
    const double x = std::clamp(t / duration_, 0.0, 1.0) * static_cast<double>(n_steps());
    const auto i = std::min(static_cast<std::size_t>(x), n_steps() - 1);
    const double frac = x - static_cast<double>(i);
    return values_[i] + frac * (values_[i + 1] - values_[i]);
  }

 private:
  double duration_;
  std::vector<double> values_;
};

// --- functionals -----------------------------------------------------------

/// First index in [1,n] attaining the minimum of the walk.
inline SplitIndex argmin_first(const LatticeWalk& w) {
  if (w.length() == 0) throw std::invalid_argument("argmin of an empty walk");
  std::size_t best = 1;
  for (std::size_t j = 2; j <= w.length(); ++j)
    if (w[j] < w[best]) best = j;
  return {best};
}

/// First grid index in [0,N] attaining the minimum. Exact comparisons.
inline SplitIndex argmin_first(const SampledPath& path) {
  const auto v = path.values();
  return {static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin())};
}

/*
 * Smallest grid time strictly after `after` at which the linearly interpolated
 * path touches or crosses `level`. A crossing inside a cell is reported at the
 * cell's right end.
 */
inline std::optional<double> first_return_time(const SampledPath& path, double level, double after) {
  const std::size_t n = path.n_steps();
  const double pos = std::max(after / path.dt(), 0.0);
  std::size_t start = std::min(static_cast<std::size_t>(std::floor(pos)), n) + 1;
  // after/dt may round to either side of an integer
  while (start > 1 && path.time(start - 1) > after) --start;
  while (start <= n && path.time(start) <= after) ++start;
  for (std::size_t i = start; i <= n; ++i) {
    const double cur = path[i] - level;
    const double prev = path[i - 1] - level;
    if (cur == 0.0 || (cur < 0.0 && prev > 0.0) || (cur > 0.0 && prev < 0.0)) return path.time(i);
  }
  return std::nullopt;
}

/*
 * Last grid time t_i < before at which path - level is zero or changes sign
 * on [t_i, t_{i+1}]; a crossing is reported at the left end of its cell, the
 * mirror image of first_return_time.
 */
inline std::optional<double> last_hit_time(const SampledPath& path, double level, double before) {
  const std::size_t n = path.n_steps();
  std::size_t i = n;
  while (i > 0 && path.time(i) >= before) --i;
  if (path.time(i) >= before) return std::nullopt;
  for (;; --i) {
    const double cur = path[i] - level;
    const double next = path[i + 1] - level;
    if (cur == 0.0 || (cur < 0.0 && next > 0.0) || (cur > 0.0 && next < 0.0)) return path.time(i);
    if (i == 0) return std::nullopt;
  }
}

/// First lattice index j > after with w(j) == level.
inline std::optional<std::size_t> first_hit(const LatticeWalk& w, int level, std::size_t after = 0) {
  for (std::size_t j = after + 1; j <= w.length(); ++j)
    if (w[j] == level) return j;
  return std::nullopt;
}

// --- transforms ------------------------------------------------------------

namespace detail {

// Cyclic rotation of the increment sequence by k, rebased to start at 0.
inline std::vector<double> rotate_increments(std::span<const double> f, std::size_t k) {
  const std::size_t n = f.size() - 1;
  std::vector<double> out(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    out[j] = (k + j <= n) ? f[k + j] - f[k] : f[k + j - n] - f[0] + f[n] - f[k];
  }
  return out;
}

}  // namespace detail

struct DiscreteVervaat {
  LatticeWalk walk;
  SplitIndex helper;  // K(w) = n - tau_n
};

/*
 * Discrete Vervaat transform: rotation at the first minimum over [1,n].
 * Index 0 is excluded from the argmin, so a walk whose minimum is only at 0 is
 * rotated at its first minimum over [1,n].
 */
inline DiscreteVervaat vervaat_discrete(const LatticeWalk& w) {
  const std::size_t n = w.length();
  if (n == 0) throw std::invalid_argument("vervaat_discrete needs n >= 1");
  const std::size_t tau = argmin_first(w).value;
  std::vector<int> tail(n);
  for (std::size_t i = 1; i <= n; ++i)
    tail[i - 1] = (tau + i <= n) ? w[tau + i] - w[tau] : w[tau + i - n] + w[n] - w[tau];
  return {LatticeWalk::from_values(tail), {n - tau}};
}

/// Vervaat transform of a grid path on [0,1], rotated at the first grid minimum.
inline SampledPath vervaat_grid(const SampledPath& path) {
  if (std::fabs(path.duration() - 1.0) > 1e-12)
    throw std::invalid_argument("vervaat_grid is defined on paths of duration 1");
  return SampledPath(1.0, detail::rotate_increments(path.values(), argmin_first(path).value));
}

/// Quantile transform: increments reordered by the stable sort on (w(j-1), j).
inline LatticeWalk quantile_discrete(const LatticeWalk& w) {
  const std::size_t n = w.length();
  if (n == 0) throw std::invalid_argument("quantile_discrete needs n >= 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{1});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return w[i - 1] < w[j - 1]; });
  std::vector<int> steps(n);
  for (std::size_t i = 0; i < n; ++i) steps[i] = w.step(order[i]);
  return LatticeWalk::from_steps(steps);
}

/*
 * theta(f, u): cyclic shift at time u (snapped to the grid). The wrapped part
 * carries the f(1) - f(0) correction, so the endpoint is preserved and
 * theta(V(w), K/n) gives back w.
 */
inline SampledPath shift_cyclic(const SampledPath& path, double u) {
  if (std::fabs(path.duration() - 1.0) > 1e-12)
    throw std::invalid_argument("shift_cyclic is defined on paths of duration 1");
  if (u < 0.0 || u > 1.0) throw std::invalid_argument("shift time must lie in [0,1]");
  return SampledPath(1.0, detail::rotate_increments(path.values(), path.nearest_index(u)));
}

/// Time reversal plus vertical shift: out[i] = path[N - i] + lambda.
inline SampledPath dual_reverse(const SampledPath& path, double lambda) {
  if (std::fabs(path.duration() - 1.0) > 1e-12)
    throw std::invalid_argument("dual_reverse is defined on paths of duration 1");
  const std::size_t n = path.n_steps();
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = path[n - i] + lambda;
  return SampledPath(1.0, std::move(out));
}

/// Grid indices of the zero set: exact zeros plus sign changes (right end).
inline std::vector<std::size_t> grid_zeros(const SampledPath& path) {
  std::vector<std::size_t> zeros;
  for (std::size_t i = 0; i <= path.n_steps(); ++i) {
    if (path[i] == 0.0 || (i > 0 && ((path[i] < 0.0 && path[i - 1] > 0.0) ||
                                     (path[i] > 0.0 && path[i - 1] < 0.0))))
      zeros.push_back(i);
  }
  return zeros;
}

/*
 * Swaps the excursion straddling u, [G_u, D_u], with the path on [0, G_u].
 * On the grid this is the rotation of the index block [0, D_u) by G_u.
 * If no zero follows u, D_u is the terminal index.
 */
inline SampledPath exchange_straddling(const SampledPath& path, double u) {
  if (path[0] != 0.0) throw std::invalid_argument("exchange_straddling needs path[0] == 0");
  if (!(u > 0.0 && u < path.duration())) throw std::invalid_argument("straddle time must lie in (0, duration)");
  const std::size_t iu = path.nearest_index(u);
  const auto zeros = grid_zeros(path);
  if (std::binary_search(zeros.begin(), zeros.end(), iu))
    throw std::domain_error("degenerate straddle point");
  const auto after = std::upper_bound(zeros.begin(), zeros.end(), iu);
  const std::size_t g = *std::prev(after);  // index 0 is always a zero
  const std::size_t d = after == zeros.end() ? path.n_steps() : *after;
  std::vector<double> out(path.values().begin(), path.values().end());
  std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(g),
              out.begin() + static_cast<std::ptrdiff_t>(d));
  return SampledPath(path.duration(), std::move(out));
}

}  // namespace vervaat

#endif  // VERVAAT_PATH_HPP_
