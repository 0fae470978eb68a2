// SPDX-License-Identifier: Apache-2.0

#include "qvqt/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace qvqt {

namespace {

constexpr double kShift = std::numbers::pi / 2;  // parameter-shift angle

// Per-state energies <b_i| U2^dag H U2 |b_i> for the given basis indices,
// propagated as columns of one matrix.
std::vector<double> state_energies_at(const Circuit& vqc2, const std::vector<double>& theta,
                                      const std::vector<std::uint64_t>& indices,
                                      const PauliSum& h) {
  const std::size_t dim = std::size_t{1} << vqc2.n_qubits;
  Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(dim, indices.size());
  for (std::size_t c = 0; c < indices.size(); ++c) cols(indices[c], c) = Complex{1, 0};
  apply_circuit_to_matrix(vqc2, theta, cols);
  std::vector<double> energies(indices.size());
  std::vector<Complex> hv(dim);
  for (std::size_t c = 0; c < indices.size(); ++c) {
    std::fill(hv.begin(), hv.end(), Complex{0, 0});
    pauli_sum_apply(h, cols.col(c).data(), hv.data(), dim);
    Complex acc{0, 0};
    for (std::size_t i = 0; i < dim; ++i) acc += std::conj(cols(i, c)) * hv[i];
    energies[c] = acc.real();
  }
  return energies;
}

struct Evaluation {
  ProbDist dist;
  std::vector<std::uint64_t> retained;
  std::vector<double> state_energies;
  double retained_mass = 0.0;
  double energy = 0.0;
  double entropy_value = 0.0;
  double free_energy = 0.0;
};

Evaluation evaluate(const Circuit& vqc1, const Circuit& vqc2, const ParameterVector& params,
                    const PauliSum& h, const QvqtConfig& config) {
  Evaluation ev;
  ev.dist = intermediate_distribution(vqc1, params.phi);
  for (std::size_t i = 0; i < ev.dist.probs.size(); ++i)
    if (ev.dist.probs[i] > config.prob_cutoff) ev.retained.push_back(i);
  if (ev.retained.empty()) throw std::invalid_argument("probability cutoff retains no states");
  ev.state_energies = state_energies_at(vqc2, params.theta, ev.retained, h);
  double mass = 0.0, acc = 0.0;
  for (std::size_t c = 0; c < ev.retained.size(); ++c) {
    const double p = ev.dist.probs[ev.retained[c]];
    mass += p;
    acc += p * ev.state_energies[c];
  }
  ev.retained_mass = mass;
  ev.energy = acc / mass;
  ev.entropy_value = entropy(ev.dist);
  ev.free_energy = ev.energy - ev.entropy_value / config.beta;
  if (config.eval_observer) config.eval_observer(ev.free_energy);
  return ev;
}

}  // namespace

double entropy(const ProbDist& dist) {
  double s = 0.0;
  for (double p : dist.probs)
    if (p > 0.0) s -= p * std::log(p);
  return s;
}

double subsystem_entropy(const ProbDist& dist, int subsystem_size) {
  const int n = dist.n_qubits;
  if (subsystem_size < 1 || n % subsystem_size != 0)
    throw std::invalid_argument("subsystem size must divide the qubit count");
  const int blocks = n / subsystem_size;
  const std::size_t block_dim = std::size_t{1} << subsystem_size;
  double total = 0.0;
  std::vector<double> marginal(block_dim);
  for (int b = 0; b < blocks; ++b) {
    std::fill(marginal.begin(), marginal.end(), 0.0);
    const int shift = b * subsystem_size;
    for (std::size_t i = 0; i < dist.probs.size(); ++i)
      marginal[(i >> shift) & (block_dim - 1)] += dist.probs[i];
    for (double p : marginal)
      if (p > 0.0) total -= p * std::log(p);
  }
  return total;
}

ProbDist intermediate_distribution(const Circuit& vqc1, const std::vector<double>& phi) {
  return measure_probabilities(apply_circuit(vqc1, phi, basis_state(vqc1.n_qubits, 0)));
}

ProbDist intermediate_distribution_sampled(const Circuit& vqc1, const std::vector<double>& phi,
                                           std::uint64_t shots, std::uint64_t seed) {
  const ProbDist exact = intermediate_distribution(vqc1, phi);
  const std::vector<std::uint64_t> counts = sample_counts(exact, shots, seed);
  ProbDist d{exact.n_qubits, std::vector<double>(exact.probs.size())};
  for (std::size_t i = 0; i < counts.size(); ++i)
    d.probs[i] = static_cast<double>(counts[i]) / static_cast<double>(shots);
  return d;
}

ModelEnergy model_energy(const Circuit& vqc2, const std::vector<double>& theta,
                         const ProbDist& dist, const PauliSum& h, double cutoff) {
  if (vqc2.n_qubits != dist.n_qubits || vqc2.n_qubits != h.n_qubits)
    throw std::invalid_argument("qubit counts differ");
  ModelEnergy me;
  for (std::size_t i = 0; i < dist.probs.size(); ++i)
    if (dist.probs[i] > cutoff) me.retained_indices.push_back(i);
  if (me.retained_indices.empty())
    throw std::invalid_argument("probability cutoff retains no states");
  me.state_energies = state_energies_at(vqc2, theta, me.retained_indices, h);
  double mass = 0.0, acc = 0.0;
  for (std::size_t c = 0; c < me.retained_indices.size(); ++c) {
    const double p = dist.probs[me.retained_indices[c]];
    mass += p;
    acc += p * me.state_energies[c];
  }
  me.energy = acc / mass;
  return me;
}

DensityMatrix model_density(const Circuit& vqc1, const Circuit& vqc2,
                            const ParameterVector& params) {
  const ProbDist p = intermediate_distribution(vqc1, params.phi);
  const std::size_t dim = p.probs.size();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  apply_circuit_to_matrix(vqc2, params.theta, u);
  Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(p.probs.data(), dim);
  DensityMatrix rho{vqc1.n_qubits, u * pv.asDiagonal() * u.adjoint()};
  return rho;
}

double free_energy(const Circuit& vqc1, const Circuit& vqc2, const ParameterVector& params,
                   const PauliSum& h, const QvqtConfig& config) {
  if (!(config.beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  return evaluate(vqc1, vqc2, params, h, config).free_energy;
}

namespace {

std::vector<double> gradient_from(const Evaluation& base, const Circuit& vqc1,
                                  const Circuit& vqc2, const ParameterVector& params,
                                  const PauliSum& h, const QvqtConfig& config) {
  const double beta = config.beta;
  std::vector<double> grad(params.phi.size() + params.theta.size());

  // phi entries: shift the probability vector, chain through E and S.
  std::vector<double> phi = params.phi;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double saved = phi[k];
    phi[k] = saved + kShift;
    const ProbDist plus = intermediate_distribution(vqc1, phi);
    phi[k] = saved - kShift;
    const ProbDist minus = intermediate_distribution(vqc1, phi);
    phi[k] = saved;

    double d_mass = 0.0, d_acc = 0.0;
    for (std::size_t c = 0; c < base.retained.size(); ++c) {
      const std::uint64_t i = base.retained[c];
      const double dp = 0.5 * (plus.probs[i] - minus.probs[i]);
      d_mass += dp;
      d_acc += dp * base.state_energies[c];
    }
    const double d_energy = (d_acc - base.energy * d_mass) / base.retained_mass;
    double d_entropy = 0.0;
    for (std::size_t i = 0; i < base.dist.probs.size(); ++i) {
      const double p = base.dist.probs[i];
      if (p <= 0.0) continue;  // dp/dphi vanishes where p does
      const double dp = 0.5 * (plus.probs[i] - minus.probs[i]);
      d_entropy -= dp * (std::log(p) + 1.0);
    }
    grad[k] = d_energy - d_entropy / beta;
  }

  // theta entries: shift the per-state energies.
  std::vector<double> theta = params.theta;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double saved = theta[k];
    theta[k] = saved + kShift;
    const std::vector<double> e_plus = state_energies_at(vqc2, theta, base.retained, h);
    theta[k] = saved - kShift;
    const std::vector<double> e_minus = state_energies_at(vqc2, theta, base.retained, h);
    theta[k] = saved;
    double acc = 0.0;
    for (std::size_t c = 0; c < base.retained.size(); ++c)
      acc += base.dist.probs[base.retained[c]] * 0.5 * (e_plus[c] - e_minus[c]);
    grad[params.phi.size() + k] = acc / base.retained_mass;
  }
  return grad;
}

}  // namespace

std::vector<double> gradient(const Circuit& vqc1, const Circuit& vqc2,
                             const ParameterVector& params, const PauliSum& h,
                             const QvqtConfig& config) {
  QvqtConfig silent = config;
  silent.eval_observer = nullptr;
  const Evaluation base = evaluate(vqc1, vqc2, params, h, silent);
  return gradient_from(base, vqc1, vqc2, params, h, config);
}

QvqtResult optimize(const Circuit& vqc1, const Circuit& vqc2, const PauliSum& h,
                    const QvqtConfig& config, const ParameterVector& initial) {
  if (static_cast<int>(initial.phi.size()) != vqc1.n_params ||
      static_cast<int>(initial.theta.size()) != vqc2.n_params)
    throw std::invalid_argument("initial parameter lengths do not match circuits");
  if (!(config.beta > 0.0)) throw std::invalid_argument("beta must be > 0");

  const std::size_t n_phi = initial.phi.size();
  const std::size_t n_total = n_phi + initial.theta.size();
  const std::vector<double> lower(n_total, -2.0 * std::numbers::pi);
  const std::vector<double> upper(n_total, 2.0 * std::numbers::pi);

  Objective objective = [&](const std::vector<double>& x, std::vector<double>& g) {
    const ParameterVector p = ParameterVector::split(x, n_phi);
    const Evaluation base = evaluate(vqc1, vqc2, p, h, config);
    g = gradient_from(base, vqc1, vqc2, p, h, config);
    return base.free_energy;
  };

  LbfgsbOptions opts;
  opts.grad_tolerance = config.grad_tolerance;
  opts.max_iterations = config.max_iterations;
  LbfgsbResult lb = lbfgsb_minimize(objective, initial.joined(), lower, upper, opts);

  QvqtResult res;
  res.params = ParameterVector::split(lb.x, n_phi);
  res.iterations = lb.iterations;
  res.converged = lb.converged;
  res.failed = lb.failed;
  res.history = std::move(lb.history);
  QvqtConfig silent = config;
  silent.eval_observer = nullptr;
  const Evaluation final_eval = evaluate(vqc1, vqc2, res.params, h, silent);
  res.probabilities = final_eval.dist;
  res.state_energies = final_eval.state_energies;
  res.retained_indices = final_eval.retained;
  res.energy = final_eval.energy;
  res.entropy = final_eval.entropy_value;
  res.free_energy = final_eval.free_energy;
  return res;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  // splitmix64 over the master seed advanced by the run index
  std::uint64_t z = master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> random_angles(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(count);
  for (double& a : out) {
    const double u = std::ldexp(static_cast<double>(rng() >> 11), -53);
    a = -std::numbers::pi + 2.0 * std::numbers::pi * u;
  }
  return out;
}

MultistartSummary summarize(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("no values to summarize");
  std::sort(values.begin(), values.end());
  MultistartSummary s;
  s.best = values.front();
  const std::size_t rank =
      values.size() == 1 ? 0
                         : std::max<std::size_t>(
                               1, static_cast<std::size_t>(std::ceil(0.2 * values.size()))) -
                               1;
  s.p20 = values[rank];
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  return s;
}

MultistartOutcome multistart(const Circuit& vqc1, const Circuit& vqc2, const PauliSum& h,
                             const QvqtConfig& config, int threads) {
  if (config.n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
  MultistartOutcome out;
  out.runs.resize(config.n_starts);

  std::mutex observer_mutex;
  QvqtConfig run_config = config;
  if (config.eval_observer && threads > 1) {
    auto inner = config.eval_observer;
    run_config.eval_observer = [&observer_mutex, inner](double f) {
      std::lock_guard<std::mutex> lock(observer_mutex);
      inner(f);
    };
  }

  auto run_one = [&](int r) {
    const std::uint64_t seed = derive_seed(config.master_seed, r);
    ParameterVector init;
    init.phi = random_angles(vqc1.n_params, seed);
    init.theta = random_angles(vqc2.n_params, derive_seed(seed, 0));
    try {
      out.runs[r] = optimize(vqc1, vqc2, h, run_config, init);
    } catch (const std::exception&) {
      out.runs[r].failed = true;
      out.runs[r].free_energy = std::numeric_limits<double>::infinity();
    }
  };

  if (threads <= 1) {
    for (int r = 0; r < config.n_starts; ++r) run_one(r);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < config.n_starts; r = next.fetch_add(1)) run_one(r);
      });
    for (std::thread& t : pool) t.join();
  }

  std::vector<double> finals;
  bool any_ok = false;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < out.runs.size(); ++r) {
    const QvqtResult& run = out.runs[r];
    const double f = (run.failed && !std::isfinite(run.free_energy))
                         ? std::numeric_limits<double>::infinity()
                         : run.free_energy;
    finals.push_back(f);
    if (std::isfinite(f)) any_ok = true;
    if (f < best) {
      best = f;
      out.best_index = r;
    }
  }
  if (!any_ok) throw std::runtime_error("all multistart runs failed");
  out.free_energy_summary = summarize(finals);
  return out;
}

std::vector<ExtractedState> extract_eigenstates(const Circuit& vqc1, const Circuit& vqc2,
                                                const PauliSum& h, const QvqtResult& result,
                                                std::size_t k) {
  (void)vqc1;
  if (k == 0 || k > result.retained_indices.size())
    throw std::invalid_argument("k out of range");
  std::vector<std::size_t> order(result.retained_indices.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.probabilities.probs[result.retained_indices[a]] >
           result.probabilities.probs[result.retained_indices[b]];
  });
  std::vector<ExtractedState> states;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t c = order[j];
    const std::uint64_t idx = result.retained_indices[c];
    ExtractedState es;
    es.probability = result.probabilities.probs[idx];
    es.state = apply_circuit(vqc2, result.params.theta, basis_state(vqc2.n_qubits, idx));
    es.energy = expectation(es.state, h);
    states.push_back(std::move(es));
  }
  std::stable_sort(states.begin(), states.end(),
                   [](const ExtractedState& a, const ExtractedState& b) {
                     return a.energy < b.energy;
                   });
  return states;
}

}  // namespace qvqt
