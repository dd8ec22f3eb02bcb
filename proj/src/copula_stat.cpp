#include "hobmi/copula_stat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "hobmi/detail/parallel.hpp"
#include "hobmi/error.hpp"

namespace hobmi {
namespace {

constexpr std::size_t kMinSamples = 10;

void check_sample(std::span<const double> x) {
  for (double value : x) {
    if (!std::isfinite(value)) throw InputError("invalid sample");
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) throw InputError("zero-variance input");
}

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("sample length mismatch");
  if (x.size() < kMinSamples) throw InputError("insufficient samples");
}

// 0-based ranks; equal values keep their index order.
std::vector<std::size_t> ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<std::size_t> rank(x.size());
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;
  return rank;
}

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  // Number of inserted positions <= i.
  std::int64_t prefix(std::size_t i) const {
    std::int64_t sum = 0;
    for (++i; i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
  }

 private:
  std::vector<std::int64_t> tree_;
};

// Frechet ratio on the rank grid: u = a/n, v = b/n, C = k/n. Integer
// arithmetic keeps the equality cases (C on a bound, C = uv) exact.
double frechet_ratio_grid(std::int64_t k, std::int64_t a, std::int64_t b, std::int64_t n) {
  const std::int64_t num = n * k - a * b;
  std::int64_t den;
  if (num >= 0) {
    den = n * std::min(a, b) - a * b;
  } else {
    den = n * std::max<std::int64_t>(a + b - n, 0) - a * b;
  }
  // den == 0 only at u = 1 or v = 1 where C = uv, or where C lies outside
  // the bound it would be divided by; both limits are 1.
  if (den == 0) return 1.0;
  return std::clamp(static_cast<double>(num) / static_cast<double>(den), 0.0, 1.0);
}

// Sign-carrying part of the Spearman correlation: sum of centred rank
// products, scaled by 2 to stay integral.
std::int64_t rank_covariance(std::span<const std::size_t> rx, std::span<const std::size_t> ry) {
  const auto centre = static_cast<std::int64_t>(rx.size()) - 1;
  std::int64_t sum = 0;
  for (std::size_t j = 0; j < rx.size(); ++j) {
    sum += (2 * static_cast<std::int64_t>(rx[j]) - centre) *
           (2 * static_cast<std::int64_t>(ry[j]) - centre);
  }
  return sum;
}

// Core procedure on rank permutations rx, ry (0-based, no ties).
CosBreakdown cos_from_ranks(std::span<const std::size_t> rx, std::span<const std::size_t> ry) {
  const std::size_t n = rx.size();
  const auto nn = static_cast<std::int64_t>(n);

  // Walk the sample in increasing u; count[k] = n * C_n(u_(k), v_[k]) where
  // v_[k] is the v paired with the k-th smallest u.
  std::vector<std::size_t> by_u(n);
  for (std::size_t j = 0; j < n; ++j) by_u[rx[j]] = j;
  std::vector<std::int64_t> count(n);
  std::vector<std::int64_t> vrank(n);
  Fenwick seen(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = by_u[k];
    seen.add(ry[j]);
    count[k] = seen.prefix(ry[j]);
    vrank[k] = static_cast<std::int64_t>(ry[j]) + 1;
  }

  CosBreakdown out;
  out.n = n;

  // Monotone runs; plateaus extend the current run and neighbours share
  // their turning point.
  auto close = [&](std::size_t first, std::size_t last) {
    CosDomain d;
    d.first = first;
    d.last = last;
    d.count = last - first + 1;
    d.argmin = d.argmax = first;
    for (std::size_t k = first + 1; k <= last; ++k) {
      if (count[k] < count[d.argmin]) d.argmin = k;
      if (count[k] > count[d.argmax]) d.argmax = k;
    }
    d.c_min = static_cast<double>(count[d.argmin]) / static_cast<double>(n);
    d.c_max = static_cast<double>(count[d.argmax]) / static_cast<double>(n);
    d.lambda_min = frechet_ratio_grid(count[d.argmin], static_cast<std::int64_t>(d.argmin) + 1,
                                      vrank[d.argmin], nn);
    d.lambda_max = frechet_ratio_grid(count[d.argmax], static_cast<std::int64_t>(d.argmax) + 1,
                                      vrank[d.argmax], nn);
    out.domains.push_back(d);
  };
  std::size_t start = 0;
  int direction = 0;
  for (std::size_t k = 1; k < n; ++k) {
    const std::int64_t step = count[k] - count[k - 1];
    const int sign = (step > 0) - (step < 0);
    if (sign == 0 || direction == 0 || sign == direction) {
      if (direction == 0) direction = sign;
      continue;
    }
    close(start, k - 1);
    start = k - 1;
    direction = sign;
  }
  close(start, n - 1);

  // Flat neighbourhood test around an extremum: both one-step changes are at
  // most 1/n and the domain together with its successor holds more than four
  // points. Not evaluated at the ends of the sequence or on the last domain.
  auto flat_optimum = [&](std::size_t i, std::size_t center) {
    if (i + 1 >= out.domains.size()) return false;
    if (center == 0 || center + 1 >= n) return false;
    const std::size_t joint = out.domains[i].count + out.domains[i + 1].count - 1;
    if (joint <= 4) return false;
    return std::llabs(count[center] - count[center - 1]) <= 1 &&
           std::llabs(count[center + 1] - count[center]) <= 1;
  };

  double weighted = 0.0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < out.domains.size(); ++i) {
    CosDomain& d = out.domains[i];
    if (d.lambda_min == 1.0 && d.lambda_max == 1.0) {
      d.gamma = 1.0;
    } else if (flat_optimum(i, d.argmin) || flat_optimum(i, d.argmax)) {
      d.local_optimum = true;
      d.gamma = 1.0;
    } else {
      d.gamma = 0.5 * (d.lambda_min + d.lambda_max);
    }
    weighted += static_cast<double>(d.count) * d.gamma;
    total += d.count;
  }
  out.value = std::clamp(weighted / static_cast<double>(total), 0.0, 1.0);
  return out;
}

}  // namespace

PseudoObservations pseudo_observations(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("sample length mismatch");
  if (x.empty()) throw InputError("insufficient samples");
  for (double value : x) {
    if (!std::isfinite(value)) throw InputError("invalid sample");
  }
  for (double value : y) {
    if (!std::isfinite(value)) throw InputError("invalid sample");
  }
  PseudoObservations p;
  p.n = x.size();
  const double n = static_cast<double>(p.n);
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  p.u.resize(p.n);
  p.v.resize(p.n);
  for (std::size_t j = 0; j < p.n; ++j) {
    p.u[j] = static_cast<double>(rx[j] + 1) / n;
    p.v[j] = static_cast<double>(ry[j] + 1) / n;
  }
  return p;
}

double empirical_copula(const PseudoObservations& p, double u, double v) {
  std::size_t inside = 0;
  for (std::size_t j = 0; j < p.n; ++j) {
    if (p.u[j] <= u && p.v[j] <= v) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(p.n);
}

double frechet_ratio(double c, double u, double v) {
  const double uv = u * v;
  const double num = c - uv;
  const double den = num >= 0.0 ? std::min(u, v) - uv : std::max(u + v - 1.0, 0.0) - uv;
  if (den == 0.0) return 1.0;
  return std::clamp(num / den, 0.0, 1.0);
}

double CosBreakdown::aggregate() const {
  double weighted = 0.0;
  for (const CosDomain& d : domains) weighted += static_cast<double>(d.count) * d.gamma;
  return weighted / static_cast<double>(n + domains.size() - 1);
}

CosBreakdown copula_statistic_breakdown(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  check_sample(x);
  check_sample(y);
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  return cos_from_ranks(rx, ry);
}

double copula_statistic(std::span<const double> x, std::span<const double> y) {
  return copula_statistic_breakdown(x, y).value;
}

std::vector<DependencyMatrix> dependency_matrices(const RowMatrix& x,
                                                  std::span<const std::size_t> lags,
                                                  DependencySign sign) {
  const auto q = static_cast<std::size_t>(x.rows());
  const auto t = static_cast<std::size_t>(x.cols());
  if (q < 2) throw InputError("need >=2 channels (use Takens embedding)");
  for (std::size_t lag : lags) {
    if (lag + kMinSamples > t) throw InputError("lag too large");
  }
  auto row = [&](std::size_t i, std::size_t offset, std::size_t len) {
    return std::span<const double>(x.data() + i * t + offset, len);
  };

  std::vector<DependencyMatrix> out(lags.size());
  for (std::size_t a = 0; a < lags.size(); ++a) {
    out[a].lag = lags[a];
    out[a].entries = Matrix::Identity(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
  }

  // Ranks of the leading and trailing segments per (lag, row), then one CoS
  // per (lag, i, j). Every task writes to its own slot.
  std::vector<std::vector<std::size_t>> lead(lags.size() * q);
  std::vector<std::vector<std::size_t>> trail(lags.size() * q);
  detail::parallel_for(lags.size() * q, [&](std::size_t task) {
    const std::size_t a = task / q;
    const std::size_t i = task % q;
    const std::size_t lag = lags[a];
    const std::size_t len = t - lag;
    const auto head = row(i, lag, len);
    const auto tail = row(i, 0, len);
    check_sample(head);
    lead[task] = ranks(head);
    if (lag == 0) return;
    check_sample(tail);
    trail[task] = ranks(tail);
  });

  detail::parallel_for(lags.size() * q * q, [&](std::size_t task) {
    const std::size_t a = task / (q * q);
    const std::size_t i = (task / q) % q;
    const std::size_t j = task % q;
    const std::size_t lag = lags[a];
    if (lag == 0 && i == j) return;
    const auto& ry = lag == 0 ? lead[a * q + j] : trail[a * q + j];
    const auto& rx = lead[a * q + i];
    double value = cos_from_ranks(rx, ry).value;
    if (sign == DependencySign::Spearman && rank_covariance(rx, ry) < 0) value = -value;
    out[a].entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
  });
  return out;
}

DependencyMatrix dependency_matrix(const RowMatrix& x, std::size_t lag, DependencySign sign) {
  const std::size_t lags[] = {lag};
  return std::move(dependency_matrices(x, lags, sign).front());
}

}  // namespace hobmi
