// SPDX-License-Identifier: Apache-2.0

#include "qvqt/lbfgsb.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace qvqt {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(double f, const std::vector<double>& g) {
  if (!std::isfinite(f)) return false;
  for (double x : g)
    if (!std::isfinite(x)) return false;
  return true;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

// Gradient with components pointing out of the box at active bounds zeroed.
std::vector<double> projected_gradient(const std::vector<double>& x,
                                       const std::vector<double>& g,
                                       const std::vector<double>& lower,
                                       const std::vector<double>& upper) {
  std::vector<double> pg(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double eps = 1e-12 * (1.0 + std::abs(x[i]));
    if (x[i] <= lower[i] + eps && g[i] > 0.0)
      pg[i] = 0.0;
    else if (x[i] >= upper[i] - eps && g[i] < 0.0)
      pg[i] = 0.0;
    else
      pg[i] = g[i];
  }
  return pg;
}

std::vector<double> two_loop(const std::deque<Pair>& pairs, const std::vector<double>& g) {
  std::vector<double> q = g;
  std::vector<double> alpha(pairs.size());
  for (std::size_t k = pairs.size(); k-- > 0;) {
    alpha[k] = pairs[k].rho * dot(pairs[k].s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * pairs[k].y[i];
  }
  if (!pairs.empty()) {
    const Pair& last = pairs.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : q) v *= gamma;
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double beta = pairs[k].rho * dot(pairs[k].y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * pairs[k].s[i];
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

LbfgsbResult lbfgsb_minimize(const Objective& objective, std::vector<double> x0,
                             const std::vector<double>& lower,
                             const std::vector<double>& upper,
                             const LbfgsbOptions& options) {
  const std::size_t n = x0.size();
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("bound vectors must match the variable count");
  for (std::size_t i = 0; i < n; ++i) {
    if (lower[i] > upper[i]) throw std::invalid_argument("lower bound exceeds upper bound");
    x0[i] = std::clamp(x0[i], lower[i], upper[i]);
  }

  LbfgsbResult res;
  res.x = std::move(x0);
  res.gradient.assign(n, 0.0);
  res.f = objective(res.x, res.gradient);
  if (!all_finite(res.f, res.gradient)) {
    res.failed = true;
    return res;
  }

  std::deque<Pair> pairs;
  std::vector<double> trial(n), trial_grad(n);

  // phi(a) = f(clip(x + a*d)); steps are capped at the first bound crossing so
  // the clip is a no-op within the searched interval.
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const std::vector<double> pg = projected_gradient(res.x, res.gradient, lower, upper);
    const double pg_norm = inf_norm(pg);
    res.history.emplace_back(res.f, pg_norm);
    if (pg_norm < options.grad_tolerance) {
      res.converged = true;
      break;
    }

    std::vector<double> d = two_loop(pairs, res.gradient);
    // Do not move out of the box along active bounds.
    for (std::size_t i = 0; i < n; ++i) {
      const double eps = 1e-12 * (1.0 + std::abs(res.x[i]));
      if ((res.x[i] <= lower[i] + eps && d[i] < 0.0) ||
          (res.x[i] >= upper[i] - eps && d[i] > 0.0))
        d[i] = 0.0;
    }
    double dg = dot(d, res.gradient);
    if (!(dg < 0.0)) {
      pairs.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -pg[i];
      dg = dot(d, res.gradient);
      if (!(dg < 0.0)) break;  // stationary up to bound activity
    }

    double alpha_max = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i] > 0.0)
        alpha_max = std::min(alpha_max, (upper[i] - res.x[i]) / d[i]);
      else if (d[i] < 0.0)
        alpha_max = std::min(alpha_max, (lower[i] - res.x[i]) / d[i]);
    }
    if (!(alpha_max > 0.0)) break;

    double alpha = pairs.empty() ? std::min(1.0 / std::max(1.0, pg_norm), alpha_max)
                                 : std::min(1.0, alpha_max);

    double last_alpha = -1.0;
    double last_f = res.f;
    auto eval_at = [&](double a) {
      for (std::size_t i = 0; i < n; ++i)
        trial[i] = std::clamp(res.x[i] + a * d[i], lower[i], upper[i]);
      last_alpha = a;
      last_f = objective(trial, trial_grad);
      return last_f;
    };

    // Strong Wolfe line search with bracketing and bisection-based zoom.
    const double f0 = res.f;
    double lo = 0.0, hi = 0.0;
    double f_lo = f0;
    bool bracketed = false;
    double best_alpha = 0.0, best_f = f0;
    std::vector<double> best_grad;
    double prev_a = 0.0, prev_f = f0;
    bool accepted = false;
    bool broke_down = false;

    for (int ls = 0; ls < options.max_line_search_steps; ++ls) {
      double ft = eval_at(alpha);
      if (!all_finite(ft, trial_grad)) {
        // Retreat towards the last good point.
        alpha = 0.5 * (prev_a + alpha);
        if (alpha < 1e-16) {
          broke_down = true;
          break;
        }
        continue;
      }
      if (ft < best_f) {
        best_f = ft;
        best_alpha = alpha;
        best_grad = trial_grad;
      }
      const double dgt = dot(d, trial_grad);
      if (ft > f0 + options.wolfe_c1 * alpha * dg || (ls > 0 && ft >= prev_f)) {
        lo = prev_a;
        f_lo = prev_f;
        hi = alpha;
        bracketed = true;
        break;
      }
      if (std::abs(dgt) <= -options.wolfe_c2 * dg) {
        accepted = true;
        break;
      }
      if (dgt >= 0.0) {
        lo = alpha;
        f_lo = ft;
        hi = prev_a;
        bracketed = true;
        break;
      }
      if (alpha >= alpha_max) {
        accepted = ft < f0;  // ran into the box; take the boundary point if it helps
        break;
      }
      prev_a = alpha;
      prev_f = ft;
      alpha = std::min(2.0 * alpha, alpha_max);
    }

    if (bracketed && !accepted && !broke_down) {
      for (int z = 0; z < options.max_line_search_steps; ++z) {
        alpha = 0.5 * (lo + hi);
        double ft = eval_at(alpha);
        if (!all_finite(ft, trial_grad)) {
          hi = alpha;
          continue;
        }
        if (ft < best_f) {
          best_f = ft;
          best_alpha = alpha;
          best_grad = trial_grad;
        }
        const double dgt = dot(d, trial_grad);
        if (ft > f0 + options.wolfe_c1 * alpha * dg || ft >= f_lo) {
          hi = alpha;
        } else {
          if (std::abs(dgt) <= -options.wolfe_c2 * dg) {
            accepted = true;
            break;
          }
          if (dgt * (hi - lo) >= 0.0) hi = lo;
          lo = alpha;
          f_lo = ft;
        }
        if (std::abs(hi - lo) < 1e-16) break;
      }
    }

    if (!accepted) {
      if (best_alpha > 0.0 && best_f < f0) {
        alpha = best_alpha;  // sufficient decrease only; still a usable step
      } else if (!pairs.empty()) {
        pairs.clear();  // restart with steepest descent next iteration
        res.iterations = iter + 1;
        continue;
      } else if (broke_down) {
        res.failed = true;
        break;
      } else {
        break;  // no progress possible
      }
    }
    if (last_alpha != alpha) eval_at(alpha);
    if (!all_finite(last_f, trial_grad)) {
      res.failed = true;
      break;
    }

    Pair p;
    p.s.resize(n);
    p.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = trial[i] - res.x[i];
      p.y[i] = trial_grad[i] - res.gradient[i];
    }
    res.x = trial;
    res.f = last_f;
    res.gradient = trial_grad;
    const double sy = dot(p.s, p.y);
    const double ss = std::sqrt(dot(p.s, p.s));
    const double yy = std::sqrt(dot(p.y, p.y));
    if (sy > 1e-10 * ss * yy) {
      p.rho = 1.0 / sy;
      pairs.push_back(std::move(p));
      if (static_cast<int>(pairs.size()) > options.memory) pairs.pop_front();
    }
    res.iterations = iter + 1;
  }

  if (res.history.empty()) res.history.emplace_back(res.f, inf_norm(res.gradient));
  return res;
}

}  // namespace qvqt
