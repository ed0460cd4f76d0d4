#include "plimit/penergy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include "plimit/error.hpp"

namespace plimit {

void PEnergyConfig::validate() const {
  if (!(p >= 2.0) || !std::isfinite(p)) throw InvalidArgument("exponent p must be >= 2");
  if (!(eps_reg >= 0.0)) throw InvalidArgument("eps_reg must be >= 0");
  if (!(newton_tol > 0.0)) throw InvalidArgument("newton_tol must be > 0");
  if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  if (!continuation.empty()) {
    for (std::size_t i = 0; i < continuation.size(); ++i) {
      if (continuation[i] < 2.0) throw InvalidArgument("ladder exponents must be >= 2");
      if (i > 0 && !(continuation[i] > continuation[i - 1])) {
        throw InvalidArgument("continuation ladder must be strictly increasing");
      }
    }
    if (continuation.back() != p) throw InvalidArgument("continuation ladder must end at p");
  }
}

std::vector<double> PEnergyConfig::ladder() const {
  if (!continuation.empty()) return continuation;
  std::vector<double> l;
  for (double q = 2.0; q < p; q *= 2.0) l.push_back(q);
  l.push_back(p);
  return l;
}

PEnergyConfig with_exponent(const PEnergyConfig& cfg, double p) {
  PEnergyConfig c = cfg;
  c.p = p;
  c.continuation.clear();
  return c;
}

namespace {

struct ElementTerms {
  double energy;   // |T| (1/p) s^{p/2}
  double w1;       // |T| s^{p/2-1}
  double w2;       // |T| (p-2) s^{p/2-2}
  Point grad;      // element gradient of v
};

ElementTerms element_terms(const DomainMesh& mesh, std::size_t e,
                           const Eigen::VectorXd& v, double p, double eps) {
  const auto& el = mesh.elements()[e];
  const auto& gphi = mesh.basis_gradients()[e];
  const double vol = mesh.volumes()[e];
  Point g = Point::Zero();
  for (int a = 0; a < mesh.vertices_per_element(); ++a) g += v[el[a]] * gphi[a];
  const double s = g.squaredNorm() + eps * eps;
  ElementTerms t{};
  t.grad = g;
  if (s == 0.0) {
    t.energy = 0.0;
    t.w1 = p == 2.0 ? vol : 0.0;
    t.w2 = 0.0;
    return t;
  }
  const double sp = std::pow(s, 0.5 * p - 1.0);
  t.energy = vol * sp * s / p;
  t.w1 = vol * sp;
  t.w2 = p == 2.0 ? 0.0 : vol * (p - 2.0) * sp / s;
  return t;
}

// Objective E(v) + (1/(2 lambda)) sum_b sigma_b (v_b - g_b)^2 over the free
// node values. Pinned nodes keep their current values.
class Problem {
 public:
  Problem(const DomainMesh& mesh, double p, double eps, bool boundary_free,
          const Eigen::VectorXd* target, double lambda)
      : mesh_(mesh), p_(p), eps_(eps), target_(target), lambda_(lambda) {
    const int n = static_cast<int>(mesh.node_count());
    free_id_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
      if (boundary_free || !mesh.is_boundary(i)) {
        free_id_[i] = nfree_++;
      }
    }
  }

  int free_count() const { return nfree_; }

  double value(const Eigen::VectorXd& v) const {
    double j = 0.0;
    for (std::size_t e = 0; e < mesh_.element_count(); ++e) {
      j += element_terms(mesh_, e, v, p_, eps_).energy;
    }
    if (target_ != nullptr) {
      const auto& bn = mesh_.boundary_nodes();
      const auto& w = mesh_.boundary_weights();
      double pen = 0.0;
      for (std::size_t b = 0; b < bn.size(); ++b) {
        const double d = v[bn[b]] - (*target_)[static_cast<Eigen::Index>(b)];
        pen += w[b] * d * d;
      }
      j += pen / (2.0 * lambda_);
    }
    return j;
  }

  // Gradient restricted to free values; Hessian assembled when requested.
  Eigen::VectorXd gradient(const Eigen::VectorXd& v,
                           Eigen::SparseMatrix<double>* hessian) const {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(nfree_);
    std::vector<Eigen::Triplet<double>> trip;
    const int nv = mesh_.vertices_per_element();
    for (std::size_t e = 0; e < mesh_.element_count(); ++e) {
      const auto t = element_terms(mesh_, e, v, p_, eps_);
      const auto& el = mesh_.elements()[e];
      const auto& gphi = mesh_.basis_gradients()[e];
      std::array<double, 3> proj{};
      for (int a = 0; a < nv; ++a) proj[a] = t.grad.dot(gphi[a]);
      for (int a = 0; a < nv; ++a) {
        const int ia = free_id_[el[a]];
        if (ia < 0) continue;
        grad[ia] += t.w1 * proj[a];
        if (hessian == nullptr) continue;
        for (int b = 0; b < nv; ++b) {
          const int ib = free_id_[el[b]];
          if (ib < 0) continue;
          trip.emplace_back(ia, ib, t.w1 * gphi[a].dot(gphi[b]) + t.w2 * proj[a] * proj[b]);
        }
      }
    }
    if (target_ != nullptr) {
      const auto& bn = mesh_.boundary_nodes();
      const auto& w = mesh_.boundary_weights();
      for (std::size_t b = 0; b < bn.size(); ++b) {
        const int ib = free_id_[bn[b]];
        if (ib < 0) continue;
        grad[ib] += w[b] * (v[bn[b]] - (*target_)[static_cast<Eigen::Index>(b)]) / lambda_;
        if (hessian != nullptr) trip.emplace_back(ib, ib, w[b] / lambda_);
      }
    }
    if (hessian != nullptr) {
      hessian->resize(nfree_, nfree_);
      hessian->setFromTriplets(trip.begin(), trip.end());
    }
    return grad;
  }

  void apply_step(Eigen::VectorXd& v, const Eigen::VectorXd& step, double alpha) const {
    for (std::size_t i = 0; i < free_id_.size(); ++i) {
      if (free_id_[i] >= 0) v[static_cast<Eigen::Index>(i)] += alpha * step[free_id_[i]];
    }
  }

 private:
  const DomainMesh& mesh_;
  double p_;
  double eps_;
  const Eigen::VectorXd* target_;
  double lambda_;
  std::vector<int> free_id_;
  int nfree_ = 0;
};

struct NewtonOutcome {
  double residual;
  int iterations;
  bool converged;
};

// Damped Newton with Armijo backtracking and a diagonal shift for the
// degenerate Hessian at vanishing element gradients.
NewtonOutcome newton(const Problem& prob, Eigen::VectorXd& v, double tol, int max_iter) {
  if (prob.free_count() == 0) return {0.0, 0, true};
  Eigen::SparseMatrix<double> hess;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd grad = prob.gradient(v, &hess);
    residual = grad.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(residual)) return {residual, it, false};
    if (residual <= tol) return {residual, it, true};

    const double maxdiag = hess.diagonal().cwiseAbs().maxCoeff();
    double shift = std::max(1e-13 * maxdiag, 1e-300);
    Eigen::VectorXd step;
    bool have_step = false;
    for (int attempt = 0; attempt < 12 && !have_step; ++attempt, shift *= 100.0) {
      Eigen::SparseMatrix<double> shifted = hess;
      for (int i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) += shift;
      solver.compute(shifted);
      if (solver.info() != Eigen::Success) continue;
      step = -solver.solve(grad);
      if (solver.info() != Eigen::Success || !step.allFinite()) continue;
      have_step = grad.dot(step) < 0.0;
    }
    if (!have_step) step = -grad;

    const double j0 = prob.value(v);
    const double slope = grad.dot(step);
    double alpha = 1.0;
    Eigen::VectorXd trial = v;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      trial = v;
      prob.apply_step(trial, step, alpha);
      const double j1 = prob.value(trial);
      if (std::isfinite(j1) && j1 <= j0 + 1e-4 * alpha * slope + 8e-16 * std::abs(j0)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return {residual, it, false};
    v = trial;
  }
  const Eigen::VectorXd grad = prob.gradient(v, nullptr);
  residual = grad.lpNorm<Eigen::Infinity>();
  return {residual, max_iter, residual <= tol};
}

// Runs the exponent ladder. With a warm start, tries the target exponent
// directly first.
NewtonOutcome solve_ladder(const DomainMesh& mesh, const PEnergyConfig& cfg,
                           bool boundary_free, const Eigen::VectorXd* target,
                           double lambda, Eigen::VectorXd& v, bool warm) {
  int total = 0;
  if (warm) {
    Eigen::VectorXd trial = v;
    const Problem prob(mesh, cfg.p, cfg.eps_reg, boundary_free, target, lambda);
    const auto out = newton(prob, trial, cfg.newton_tol, cfg.max_iter);
    if (out.converged) {
      v = trial;
      return out;
    }
    total += out.iterations;
  }
  NewtonOutcome out{};
  for (double q : cfg.ladder()) {
    const Problem prob(mesh, q, cfg.eps_reg, boundary_free, target, lambda);
    out = newton(prob, v, cfg.newton_tol, cfg.max_iter);
    total += out.iterations;
  }
  out.iterations = total;
  return out;
}

}  // namespace

double discrete_energy(const DomainMesh& mesh, const InteriorField& v,
                       const PEnergyConfig& cfg) {
  cfg.validate();
  if (v.size() != static_cast<Eigen::Index>(mesh.node_count())) {
    throw InvalidArgument("interior field size does not match the mesh");
  }
  double e = 0.0;
  for (std::size_t k = 0; k < mesh.element_count(); ++k) {
    e += element_terms(mesh, k, v.values, cfg.p, cfg.eps_reg).energy;
  }
  return e;
}

Eigen::VectorXd energy_gradient(const DomainMesh& mesh, const InteriorField& v,
                                const PEnergyConfig& cfg) {
  cfg.validate();
  if (v.size() != static_cast<Eigen::Index>(mesh.node_count())) {
    throw InvalidArgument("interior field size does not match the mesh");
  }
  const Problem prob(mesh, cfg.p, cfg.eps_reg, true, nullptr, 1.0);
  return prob.gradient(v.values, nullptr);
}

ExtensionResult p_extension(const DomainMesh& mesh, const BoundaryField& u,
                            const PEnergyConfig& cfg, const InteriorField* warm_start) {
  cfg.validate();
  if (u.size() != static_cast<Eigen::Index>(mesh.boundary_count())) {
    throw InvalidArgument("boundary field size does not match the mesh");
  }
  if (!u.values.allFinite()) throw InvalidArgument("boundary field has non-finite values");
  const bool warm = warm_start != nullptr &&
                    warm_start->size() == static_cast<Eigen::Index>(mesh.node_count());
  Eigen::VectorXd v = warm ? warm_start->values
                           : Eigen::VectorXd::Constant(static_cast<Eigen::Index>(mesh.node_count()),
                                                       u.values.mean());
  const auto& bn = mesh.boundary_nodes();
  for (std::size_t b = 0; b < bn.size(); ++b) v[bn[b]] = u[static_cast<Eigen::Index>(b)];

  const auto out = solve_ladder(mesh, cfg, false, nullptr, 1.0, v, warm);
  if (!out.converged) throw NonConvergence(out.residual, out.iterations, "p_extension");
  return {InteriorField{std::move(v)}, out.residual, out.iterations};
}

double energy_Ep(const DomainMesh& mesh, const BoundaryField& u, const PEnergyConfig& cfg) {
  return discrete_energy(mesh, p_extension(mesh, u, cfg).field, cfg);
}

ProxResult prox_Ep(const DomainMesh& mesh, const BoundaryField& g, double lambda,
                   const PEnergyConfig& cfg, const InteriorField* warm_start) {
  cfg.validate();
  if (!(lambda > 0.0)) throw InvalidArgument("prox step lambda must be positive");
  if (g.size() != static_cast<Eigen::Index>(mesh.boundary_count())) {
    throw InvalidArgument("boundary field size does not match the mesh");
  }
  if (!g.values.allFinite()) throw InvalidArgument("boundary field has non-finite values");
  const bool warm = warm_start != nullptr &&
                    warm_start->size() == static_cast<Eigen::Index>(mesh.node_count());
  Eigen::VectorXd v;
  if (warm) {
    v = warm_start->values;
  } else {
    v = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(mesh.node_count()), g.values.mean());
    const auto& bn = mesh.boundary_nodes();
    for (std::size_t b = 0; b < bn.size(); ++b) v[bn[b]] = g[static_cast<Eigen::Index>(b)];
  }
  const auto out = solve_ladder(mesh, cfg, true, &g.values, lambda, v, warm);
  if (!out.converged) throw NonConvergence(out.residual, out.iterations, "prox_Ep");

  const auto& bn = mesh.boundary_nodes();
  Eigen::VectorXd tr(static_cast<Eigen::Index>(bn.size()));
  for (std::size_t b = 0; b < bn.size(); ++b) tr[static_cast<Eigen::Index>(b)] = v[bn[b]];
  return {BoundaryField{std::move(tr)}, InteriorField{std::move(v)}, out.residual,
          out.iterations};
}

double gradient_check(const DomainMesh& mesh, const InteriorField& v,
                      const PEnergyConfig& cfg, std::uint64_t seed, int samples) {
  if (!(cfg.eps_reg > 0.0)) throw InvalidArgument("gradient_check requires eps_reg > 0");
  const Eigen::VectorXd grad = energy_gradient(mesh, v, cfg);
  const double scale = std::max(1.0, v.values.cwiseAbs().maxCoeff());
  const double step = 1e-6 * scale;
  const double floor = std::max(1e-6 * grad.lpNorm<Eigen::Infinity>(), 1e-300);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, v.size() - 1);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::Index i = pick(rng);
    InteriorField plus = v, minus = v;
    plus[i] += step;
    minus[i] -= step;
    const double fd = (discrete_energy(mesh, plus, cfg) - discrete_energy(mesh, minus, cfg)) /
                      (2.0 * step);
    const double denom = std::max({std::abs(grad[i]), std::abs(fd), floor});
    worst = std::max(worst, std::abs(grad[i] - fd) / denom);
  }
  return worst;
}

}  // namespace plimit
