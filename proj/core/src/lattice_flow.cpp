#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "gpwb/lattice.hpp"

namespace gpwb {

namespace {

// Orthonormal basis of Hermitian n x n matrices for <a,b> = Re Tr(a b).
std::vector<Matrix> hermitian_basis(int n) {
  std::vector<Matrix> out;
  const double r = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < n; ++k) {
    Matrix e = Matrix::Zero(n, n);
    e(k, k) = 1.0;
    out.push_back(e);
  }
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      Matrix s = Matrix::Zero(n, n);
      s(k, l) = r;
      s(l, k) = r;
      out.push_back(s);
      Matrix a = Matrix::Zero(n, n);
      a(k, l) = Complex(0.0, r);
      a(l, k) = Complex(0.0, -r);
      out.push_back(a);
    }
  return out;
}

// Coordinates of the Hermitian gauge directions: per-site blocks for full
// factors followed by one global block per constant factor.
struct Layout {
  struct Block {
    std::size_t factor;
    bool constant;
    int local_offset;
    int global_offset;
    std::vector<Matrix> basis;
  };
  std::vector<Block> blocks;
  int local = 0;
  int per_site = 0;
  int global = 0;
  int sites = 0;

  Layout(const LatticePairState& state) : sites(state.lattice.sites()) {
    for (std::size_t f = 0; f < state.factors.size(); ++f) {
      const FactorMode m = state.setting.mode(f);
      if (m == FactorMode::frozen) continue;
      Block b{f, m == FactorMode::constant, local, 0, hermitian_basis(state.factors[f].rank)};
      local += static_cast<int>(b.basis.size());
      if (!b.constant) per_site += static_cast<int>(b.basis.size());
      blocks.push_back(std::move(b));
    }
    int site_off = 0;
    int const_off = sites * per_site;
    for (auto& b : blocks) {
      if (b.constant) {
        b.global_offset = const_off;
        const_off += static_cast<int>(b.basis.size());
      } else {
        b.global_offset = site_off;
        site_off += static_cast<int>(b.basis.size());
      }
    }
    global = const_off;
  }

  int index(const Block& b, int site, int k) const {
    return b.constant ? b.global_offset + k : site * per_site + b.global_offset + k;
  }
};

Eigen::VectorXd local_coords(const Layout& lay, const AlgebraElement& herm) {
  Eigen::VectorXd out(lay.local);
  for (const auto& b : lay.blocks)
    for (std::size_t k = 0; k < b.basis.size(); ++k)
      out(b.local_offset + static_cast<int>(k)) = (b.basis[k] * herm.blocks[b.factor]).trace().real();
  return out;
}

// Linearisation of i*mu along the Hermitian directions at one site.
Eigen::MatrixXd moment_hessian(const Layout& lay, const LatticePairState& state, const CVector& phi) {
  const ProductGroupSpec& spec = state.group();
  Eigen::MatrixXd h(lay.local, lay.local);
  for (const auto& b : lay.blocks)
    for (std::size_t k = 0; k < b.basis.size(); ++k) {
      AlgebraElement s = AlgebraElement::zero(spec, AlgebraFlavor::general);
      s.blocks[b.factor] = b.basis[k];
      const CVector d = infinitesimal_act(s, phi, state.rep);
      AlgebraElement diff = mu_full(phi + d, state.rep, spec);
      diff -= mu_full(phi - d, state.rep, spec);
      for (auto& blk : diff.blocks) blk = (0.5 * kI) * blk;
      h.col(b.local_offset + static_cast<int>(k)) = local_coords(lay, diff);
    }
  return 0.5 * (h + h.transpose());
}

struct StepSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
};

StepSystem build_system(const Layout& lay, const LatticePairState& state, const ResidualField& r, double dt) {
  const TorusLattice& lat = state.lattice;
  const double area = lat.cell_area();
  const double inv_a2 = 1.0 / area;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(lay.global);

  std::vector<std::array<std::vector<Matrix>, 2>> chern(state.factors.size());
  for (const auto& b : lay.blocks)
    if (!b.constant) chern[b.factor] = chern_links(state.factors[b.factor], lat);

  for (int s = 0; s < lat.sites(); ++s) {
    Eigen::MatrixXd local = moment_hessian(lay, state, state.section[s]);
    local.diagonal().array() += 1.0 / dt;
    for (const auto& b : lay.blocks)
      if (!b.constant)
        for (std::size_t k = 0; k < b.basis.size(); ++k) local(b.local_offset + k, b.local_offset + k) += 4.0 * inv_a2;
    AlgebraElement ir = r.sites[s];
    for (auto& blk : ir.blocks) blk = kI * blk;
    const Eigen::VectorXd c = local_coords(lay, ir);
    for (const auto& bi : lay.blocks)
      for (std::size_t i = 0; i < bi.basis.size(); ++i) {
        const int gi = lay.index(bi, s, static_cast<int>(i));
        rhs(gi) -= area * c(bi.local_offset + i);
        for (const auto& bj : lay.blocks)
          for (std::size_t j = 0; j < bj.basis.size(); ++j) {
            const double v = local(bi.local_offset + i, bj.local_offset + j);
            if (v != 0.0) trip.emplace_back(gi, lay.index(bj, s, static_cast<int>(j)), area * v);
          }
      }
    // Covariant Laplacian couplings along the links leaving s.
    for (const auto& b : lay.blocks) {
      if (b.constant) continue;
      for (int dir = 0; dir < 2; ++dir) {
        const Matrix& u = chern[b.factor][dir][s];
        const int t = lat.shift(s, dir);
        for (std::size_t j = 0; j < b.basis.size(); ++j) {
          const Matrix moved = u.adjoint() * b.basis[j] * u;
          for (std::size_t i = 0; i < b.basis.size(); ++i) {
            const double v = -(b.basis[i] * moved).trace().real();
            if (v == 0.0) continue;
            const int gi = lay.index(b, s, static_cast<int>(i));
            const int gj = lay.index(b, t, static_cast<int>(j));
            trip.emplace_back(gi, gj, v);
            trip.emplace_back(gj, gi, v);
          }
        }
      }
    }
  }
  StepSystem sys;
  sys.matrix.resize(lay.global, lay.global);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.rhs = std::move(rhs);
  return sys;
}

std::vector<GroupElement> gauge_from(const Layout& lay, const LatticePairState& state, const Eigen::VectorXd& x) {
  std::vector<GroupElement> out;
  out.reserve(state.lattice.sites());
  for (int s = 0; s < state.lattice.sites(); ++s) {
    GroupElement g = GroupElement::identity(state.group());
    g.flavor = GroupFlavor::complexified;
    for (const auto& b : lay.blocks) {
      const int n = state.factors[b.factor].rank;
      Matrix sigma = Matrix::Zero(n, n);
      for (std::size_t k = 0; k < b.basis.size(); ++k) sigma += x(lay.index(b, s, static_cast<int>(k))) * b.basis[k];
      g.blocks[b.factor] = linalg::exp_hermitian(sigma);
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<double> degrees_of(const LatticePairState& state) {
  std::vector<double> out;
  for (const auto& b : state.factors) out.push_back(lattice_degree(b, state.lattice) / (2.0 * std::numbers::pi));
  return out;
}

void finish_report(LatticeFlowReport& rep, const LatticePairState& state, const ResidualField& r) {
  rep.final_residual = r.l2;
  rep.final_linf = r.linf;
  rep.site_residual_norms = r.site_norms;
  rep.sup_log_metric = sup_log_metric(state);
  rep.degrees_after = degrees_of(state);
  rep.holomorphicity_after = holomorphicity_defect(state);
  for (std::size_t f = 0; f < state.factors.size(); ++f)
    rep.residual_traces.push_back(state.setting.frozen(f) ? 0.0 : integrated_residual_trace(state, f));
  rep.factor_residual_linf.assign(state.factors.size(), 0.0);
  for (const auto& site : r.sites)
    for (std::size_t f = 0; f < site.blocks.size(); ++f)
      rep.factor_residual_linf[f] = std::max(rep.factor_residual_linf[f], site.blocks[f].norm());
  rep.metric.resize(state.factors.size());
  for (std::size_t f = 0; f < state.factors.size(); ++f)
    for (int s = 0; s < state.lattice.sites(); ++s) rep.metric[f].push_back(state.factors[f].metric(s));
}

}  // namespace

LatticeFlowReport heat_flow(LatticePairState& state, const LatticeFlowOptions& opts) {
  state.validate();
  const Layout lay(state);
  LatticeFlowReport rep;
  rep.degrees_before = degrees_of(state);
  rep.holomorphicity_before = holomorphicity_defect(state);

  ResidualField r = pointwise_residual(state);
  double dt = opts.step;
  double metric_size = sup_log_metric(state);
  int streak = 0;
  while (true) {
    if (r.l2 < opts.tol) {
      rep.converged = true;
      break;
    }
    if (metric_size > opts.divergence_log_metric) {
      rep.diverged = true;
      break;
    }
    if (rep.iterations >= opts.max_iter) break;

    const StepSystem sys = build_system(lay, state, r, dt);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(sys.matrix);
    bool accepted = false;
    if (solver.info() == Eigen::Success) {
      const Eigen::VectorXd x = solver.solve(sys.rhs);
      if (x.allFinite()) {
        LatticePairState trial = state;
        apply_gauge(trial, gauge_from(lay, trial, x));
        ResidualField rt = pointwise_residual(trial);
        const double slm = sup_log_metric(trial);
        if (std::isfinite(rt.l2) && std::isfinite(slm) && rt.l2 <= r.l2 * (1.0 + 1e-10)) {
          state = std::move(trial);
          r = std::move(rt);
          metric_size = slm;
          accepted = true;
        }
      }
    }
    if (accepted) {
      ++rep.iterations;
      rep.trajectory.push_back({rep.iterations, r.l2, r.linf, metric_size});
      if (++streak >= opts.grow_after) {
        dt = std::min(2.0 * dt, opts.max_step);
        streak = 0;
      }
    } else {
      ++rep.rejections;
      streak = 0;
      dt *= 0.5;
      if (dt < opts.min_step) {
        rep.stalled = true;
        break;
      }
    }
  }
  finish_report(rep, state, r);
  return rep;
}

LatticeFlowReport newton_abelian(const LatticePairState& state, const LatticeFlowOptions& opts) {
  state.validate();
  const TorusLattice& lat = state.lattice;
  const int sites = lat.sites();
  std::size_t factor = state.factors.size();
  for (std::size_t f = 0; f < state.factors.size(); ++f) {
    if (state.setting.frozen(f)) continue;
    if (factor != state.factors.size() || state.setting.mode(f) != FactorMode::full || state.factors[f].rank != 1)
      throw std::invalid_argument("abelian solver needs exactly one full rank-one factor");
    factor = f;
  }
  if (factor == state.factors.size()) throw std::invalid_argument("abelian solver needs a gauge-varying factor");
  int weight = 0;
  for (const auto& slot : state.rep.slots())
    if (slot.factor == factor && slot.action != SlotAction::trivial) {
      if (slot.action != SlotAction::standard) throw std::invalid_argument("abelian solver needs standard slots");
      ++weight;
    }
  if (weight != 1) throw std::invalid_argument("abelian solver needs the factor on exactly one slot");

  const double a2 = lat.cell_area();
  const double c0 = state.setting.level(factor);
  const auto& b = state.factors[factor];
  // Plaquette angles of the Chern connection, straight from the links.
  auto arg_of = [&](int dir, int s) { return std::arg(b.links[dir][s](0, 0)); };
  auto log_abs = [&](int dir, int s) { return std::log(std::abs(b.links[dir][s](0, 0))); };
  Eigen::VectorXd f0(sites);
  Eigen::VectorXd rho(sites);
  double total_angle = 0.0;
  for (int s = 0; s < sites; ++s) {
    const int sx = lat.shift(s, 0);
    const int sy = lat.shift(s, 1);
    auto ax = [&](int t) { return arg_of(0, t) + log_abs(1, lat.shift(t, 1, -1)); };
    auto ay = [&](int t) { return arg_of(1, t) - log_abs(0, lat.shift(t, 0, -1)); };
    const double raw = ax(s) + ay(sx) - ax(sy) - ay(s);
    const double theta = std::remainder(raw, 2.0 * std::numbers::pi);
    total_angle += theta;
    f0(s) = theta / a2;
    rho(s) = state.section[s].squaredNorm();
  }

  LatticeFlowReport rep;
  rep.degrees_before.assign(state.factors.size(), 0.0);
  rep.degrees_before[factor] = total_angle / (2.0 * std::numbers::pi);
  rep.degrees_after = rep.degrees_before;
  const double obstruction = (c0 - total_angle) / (2.0 * std::numbers::pi);
  rep.obstruction = obstruction;
  rep.marginal = std::abs(obstruction) <= 1e-9;

  Eigen::VectorXd u = Eigen::VectorXd::Zero(sites);
  auto residual = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(sites);
    for (int s = 0; s < sites; ++s) {
      double lap = -4.0 * v(s);
      for (int dir = 0; dir < 2; ++dir) lap += v(lat.shift(s, dir)) + v(lat.shift(s, dir, -1));
      out(s) = -lap / a2 + rho(s) * std::exp(2.0 * v(s)) + f0(s) - c0;
    }
    return out;
  };
  auto l2 = [&](const Eigen::VectorXd& v) { return std::sqrt(a2 * v.squaredNorm()); };

  Eigen::VectorXd res = residual(u);
  const bool solvable = obstruction > 1e-9 && rho.maxCoeff() > 0.0;
  if (solvable) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int s = 0; s < sites; ++s)
      for (int dir = 0; dir < 2; ++dir) {
        trip.emplace_back(s, lat.shift(s, dir), -1.0 / a2);
        trip.emplace_back(s, lat.shift(s, dir, -1), -1.0 / a2);
      }
    Eigen::SparseMatrix<double> lap(sites, sites);
    lap.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    bool analysed = false;
    const double target = std::min(opts.tol, 1e-10) * 1e-2;
    while (l2(res) > target && rep.iterations < std::min(opts.max_iter, 200)) {
      Eigen::SparseMatrix<double> jac = lap;
      for (int s = 0; s < sites; ++s) jac.coeffRef(s, s) += 4.0 / a2 + 2.0 * rho(s) * std::exp(2.0 * u(s));
      if (!analysed) {
        solver.analyzePattern(jac);
        analysed = true;
      }
      solver.factorize(jac);
      if (solver.info() != Eigen::Success) break;
      const Eigen::VectorXd step = solver.solve(-res);
      double t = 1.0;
      const double before = l2(res);
      while (t > 1e-8) {
        const Eigen::VectorXd cand = u + t * step;
        const Eigen::VectorXd rc = residual(cand);
        if (rc.allFinite() && l2(rc) < before) {
          u = cand;
          res = rc;
          break;
        }
        t *= 0.5;
      }
      if (t <= 1e-8) break;
      ++rep.iterations;
      rep.trajectory.push_back({rep.iterations, l2(res), res.cwiseAbs().maxCoeff(), 2.0 * u.cwiseAbs().maxCoeff()});
    }
    rep.converged = l2(res) <= std::max(target, opts.tol * 1e-2);
  }
  rep.final_residual = l2(res);
  rep.final_linf = res.cwiseAbs().maxCoeff();
  rep.sup_log_metric = 2.0 * u.cwiseAbs().maxCoeff();
  rep.metric.resize(state.factors.size());
  for (int s = 0; s < sites; ++s) {
    const double base = state.factors[factor].metric(s)(0, 0).real();
    rep.metric[factor].push_back(Matrix::Constant(1, 1, base * std::exp(2.0 * u(s))));
  }
  return rep;
}

}  // namespace gpwb
