#include "gpwb/kempf_ness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace gpwb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ProductGroupSpec spec_of(const AlgebraElement& s) {
  std::vector<int> dims;
  for (const auto& b : s.blocks) dims.push_back(static_cast<int>(b.rows()));
  return ProductGroupSpec(std::move(dims));
}

Matrix projector(const Matrix& basis) {
  return basis.cols() == 0 ? Matrix::Zero(basis.rows(), basis.rows()) : Matrix(basis * basis.adjoint());
}

Matrix orthonormalize(const Matrix& a, double tol = 1e-10) {
  if (a.cols() == 0) return a;
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  Eigen::Index rank = 0;
  const double top = svd.singularValues()(0);
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > tol * std::max(1.0, top)) ++rank;
  return svd.matrixU().leftCols(rank);
}

}  // namespace

WeightedFiltration WeightedFiltration::from_generator(const AlgebraElement& chi, double merge_tol) {
  struct Eig {
    double value;
    std::size_t factor;
    CVector vec;
  };
  std::vector<Eig> all;
  for (std::size_t f = 0; f < chi.blocks.size(); ++f) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::hermitian_part(kI * chi.blocks[f]));
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
      all.push_back({es.eigenvalues()(k), f, es.eigenvectors().col(k)});
  }
  std::stable_sort(all.begin(), all.end(), [](const Eig& a, const Eig& b) { return a.value < b.value; });

  WeightedFiltration out;
  std::vector<std::vector<std::vector<CVector>>> cols;
  std::vector<double> sums;
  std::vector<int> counts;
  for (const auto& e : all) {
    if (out.weights_.empty() || e.value - out.weights_.back() > merge_tol) {
      out.weights_.push_back(e.value);
      cols.emplace_back(chi.blocks.size());
      sums.push_back(0.0);
      counts.push_back(0);
    }
    cols.back()[e.factor].push_back(e.vec);
    sums.back() += e.value;
    ++counts.back();
  }
  for (std::size_t k = 0; k < out.weights_.size(); ++k) {
    out.weights_[k] = sums[k] / counts[k];
    std::vector<Matrix> pieces;
    for (std::size_t f = 0; f < chi.blocks.size(); ++f) {
      Matrix q(chi.blocks[f].rows(), static_cast<Eigen::Index>(cols[k][f].size()));
      for (std::size_t j = 0; j < cols[k][f].size(); ++j) q.col(static_cast<Eigen::Index>(j)) = cols[k][f][j];
      pieces.push_back(std::move(q));
    }
    out.graded_.push_back(std::move(pieces));
  }
  out.chi_.flavor = AlgebraFlavor::compact;
  for (std::size_t f = 0; f < chi.blocks.size(); ++f) {
    Matrix b = Matrix::Zero(chi.blocks[f].rows(), chi.blocks[f].cols());
    for (std::size_t k = 0; k < out.weights_.size(); ++k)
      b += -kI * out.weights_[k] * projector(out.graded_[k][f]);
    out.chi_.blocks.push_back(std::move(b));
  }
  return out;
}

WeightedFiltration WeightedFiltration::from_chain(const ProductGroupSpec& spec, std::size_t factor,
                                                  std::span<const Matrix> chain,
                                                  std::span<const double> weights) {
  if (factor >= spec.factors()) throw DimensionError(factor, "no such factor");
  if (chain.empty() || chain.size() != weights.size())
    throw std::invalid_argument("chain and weights must be nonempty and of equal length");
  for (std::size_t k = 1; k < weights.size(); ++k)
    if (!(weights[k] > weights[k - 1])) throw std::invalid_argument("weights must be strictly increasing");
  const int n = spec.dim(factor);
  Eigen::Index prev = 0;
  for (const auto& q : chain) {
    if (q.rows() != n) throw DimensionError(factor, "chain basis has wrong ambient dimension");
    if (q.cols() <= prev) throw std::invalid_argument("chain must be strictly increasing");
    prev = q.cols();
  }
  if (chain.back().cols() != n) throw std::invalid_argument("chain must end at the whole space");

  AlgebraElement chi = AlgebraElement::zero(spec);
  Matrix prev_p = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const Matrix p = projector(chain[k]);
    chi.blocks[factor] += -kI * weights[k] * (p - prev_p);
    prev_p = p;
  }
  chi.blocks[factor] = 0.5 * (chi.blocks[factor] - chi.blocks[factor].adjoint());
  return from_generator(chi);
}

int WeightedFiltration::chain_dim(std::size_t k) const {
  int total = 0;
  for (std::size_t j = 0; j <= k && j < graded_.size(); ++j)
    for (const auto& q : graded_[j]) total += static_cast<int>(q.cols());
  return total;
}

Matrix negative_subspace(const AlgebraElement& s, const RepSpec& rep, double tol) {
  const Matrix a = action_matrix(s, rep);
  Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::hermitian_part(kI * a));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()(k) <= tol) keep.push_back(k);
  Matrix q(a.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) q.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
  return q;
}

double maximal_weight(const CVector& x, const AlgebraElement& s, const RepSpec& rep, double rel_tol) {
  const double nx = x.norm();
  if (nx == 0.0) return 0.0;
  const Matrix q = negative_subspace(s, rep);
  const CVector outside = x - q * (q.adjoint() * x);
  return outside.norm() <= rel_tol * nx ? 0.0 : kInf;
}

double filtration_degree(std::span<const double> weights, std::span<const double> chain_degrees) {
  if (chain_degrees.empty()) return 0.0;
  if (chain_degrees.size() != weights.size())
    throw std::invalid_argument("one degree per filtration step required");
  const std::size_t r = weights.size();
  double d = weights[r - 1] * chain_degrees[r - 1];
  for (std::size_t k = 0; k + 1 < r; ++k) d += (weights[k] - weights[k + 1]) * chain_degrees[k];
  return d;
}

double total_weight(const CVector& x, const WeightedFiltration& filt, const AlgebraElement& c,
                    const RepSpec& rep, std::span<const double> chain_degrees) {
  const auto w = filt.weights();
  for (std::size_t k = 1; k < w.size(); ++k)
    if (!(w[k] > w[k - 1])) throw std::invalid_argument("weights must be increasing");
  const double lambda = maximal_weight(x, filt.generator(), rep);
  if (std::isinf(lambda)) return kInf;
  const ProductGroupSpec spec = spec_of(filt.generator());
  return filtration_degree(w, chain_degrees) + lambda - inner_product(filt.generator(), c, spec);
}

ConeGenerators cone_generators(int r, int p) {
  if (r < 1 || p < 1 || p > r) throw std::invalid_argument(fmt::format("need 1 <= p <= r, got p={} r={}", p, r));
  ConeGenerators out;
  for (int i = 1; i <= r; ++i) {
    std::vector<double> v(r, 0.0);
    for (int k = 0; k < i; ++k) v[k] = -1.0;
    out.f.push_back(std::move(v));
  }
  for (int j = p + 1; j <= r; ++j) {
    std::vector<double> v(r, 0.0);
    for (int k = j - 1; k < r; ++k) v[k] = 1.0;
    out.g.push_back(std::move(v));
  }
  return out;
}

ConeDecomposition decompose_in_cone(std::span<const double> alpha, int p) {
  const int r = static_cast<int>(alpha.size());
  if (r < 1 || p < 1 || p > r) throw std::invalid_argument(fmt::format("need 1 <= p <= r, got p={} r={}", p, r));
  for (int k = 1; k < r; ++k)
    if (alpha[k] < alpha[k - 1]) throw std::invalid_argument("weights must be non-decreasing");
  if (alpha[p - 1] > 0.0) throw std::invalid_argument("weight at the section index must be non-positive");
  int q = 0;
  for (int k = 0; k < r; ++k)
    if (alpha[k] <= 0.0) q = k + 1;
  ConeDecomposition out;
  out.f.assign(r, 0.0);
  out.g.assign(r - p, 0.0);
  out.f[q - 1] = -alpha[q - 1];
  for (int i = 1; i < q; ++i) out.f[i - 1] = alpha[i] - alpha[i - 1];
  if (q < r) {
    out.g[q - p] = alpha[q];
    for (int j = q + 2; j <= r; ++j) out.g[j - 1 - p] = alpha[j - 1] - alpha[j - 2];
  }
  return out;
}

std::vector<AlgebraElement> ssc_generators(const ProductGroupSpec& spec, std::size_t factor,
                                           std::span<const Matrix> chain, int p) {
  const int r = static_cast<int>(chain.size());
  if (r < 1 || p < 1 || p > r) throw std::invalid_argument(fmt::format("need 1 <= p <= r, got p={} r={}", p, r));
  if (factor >= spec.factors()) throw DimensionError(factor, "no such factor");
  const int n = spec.dim(factor);
  std::vector<AlgebraElement> out;
  for (int i = 1; i <= r; ++i) {
    AlgebraElement chi = AlgebraElement::zero(spec);
    chi.blocks[factor] = kI * projector(chain[i - 1]);
    out.push_back(std::move(chi));
  }
  for (int j = p + 1; j <= r; ++j) {
    AlgebraElement chi = AlgebraElement::zero(spec);
    chi.blocks[factor] = -kI * (Matrix::Identity(n, n) - projector(chain[j - 2]));
    out.push_back(std::move(chi));
  }
  return out;
}

StabilityVerdict stability_test(const CVector& x, const RepSpec& rep, const SubgroupSetting& setting,
                                const CandidateLattice& lattice, const SubspaceDegree& degree,
                                double tol) {
  const ProductGroupSpec& spec = setting.group();
  rep.check(spec);
  std::vector<std::size_t> active;
  for (std::size_t f = 0; f < spec.factors(); ++f)
    if (!setting.frozen(f)) active.push_back(f);

  std::vector<std::vector<Matrix>> options(spec.factors());
  for (std::size_t f : active) {
    const int n = spec.dim(f);
    options[f].push_back(Matrix(n, 0));
    if (f < lattice.per_factor.size())
      for (const auto& q : lattice.per_factor[f]) {
        Matrix o = orthonormalize(q);
        if (o.cols() > 0 && o.cols() < n) options[f].push_back(std::move(o));
      }
    options[f].push_back(Matrix::Identity(n, n));
  }

  auto deg_of = [&](const std::vector<Matrix>& tuple) {
    return degree ? degree(std::span<const Matrix>(tuple)) : 0.0;
  };
  std::vector<Matrix> full_tuple(spec.factors());
  for (std::size_t f = 0; f < spec.factors(); ++f)
    full_tuple[f] = setting.frozen(f) ? Matrix(spec.dim(f), 0) : Matrix::Identity(spec.dim(f), spec.dim(f));
  const double deg_full = deg_of(full_tuple);

  StabilityVerdict v;
  v.slack = kInf;
  std::vector<std::size_t> idx(active.size(), 0);
  while (true) {
    std::vector<Matrix> tuple(spec.factors());
    bool all_zero = true;
    bool all_full = true;
    for (std::size_t f = 0; f < spec.factors(); ++f) tuple[f] = Matrix(spec.dim(f), 0);
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t f = active[a];
      tuple[f] = options[f][idx[a]];
      if (tuple[f].cols() != 0) all_zero = false;
      if (tuple[f].cols() != spec.dim(f)) all_full = false;
    }
    const double deg_sub = deg_of(tuple);
    for (int type = 0; type < 2; ++type) {
      if ((type == 0 && all_zero) || (type == 1 && all_full)) continue;
      AlgebraElement chi = AlgebraElement::zero(spec);
      for (std::size_t f : active) {
        const int n = spec.dim(f);
        chi.blocks[f] = type == 0 ? Matrix(kI * projector(tuple[f]))
                                  : Matrix(-kI * (Matrix::Identity(n, n) - projector(tuple[f])));
      }
      const double deg_chi = type == 0 ? -deg_sub : deg_full - deg_sub;
      const double pairing = inner_product(chi, setting.central_shift(), spec);
      ++v.directions_tested;
      if (action_matrix(chi, rep).norm() < 1e-12) {
        if (std::abs(deg_chi - pairing) > tol) v.constraint_violated = true;
        continue;
      }
      const double lambda = maximal_weight(x, chi, rep);
      if (std::isinf(lambda)) continue;
      const double w = deg_chi - pairing;
      if (std::abs(w) <= tol) v.marginal = true;
      if (w < v.slack) {
        v.slack = w;
        v.witness = chi;
        v.witness_label = type == 0 ? "weight -1 on subspace" : "weight 1 off subspace";
      }
    }
    std::size_t a = 0;
    for (; a < active.size(); ++a) {
      if (++idx[a] < options[active[a]].size()) break;
      idx[a] = 0;
    }
    if (a == active.size()) break;
  }
  v.stable = !v.constraint_violated && v.slack > tol;
  return v;
}

namespace {

Eigen::Index nullity(const Matrix& m, double tol) {
  if (m.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double top = sv.size() > 0 ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > tol * std::max(1.0, top)) ++rank;
  return m.cols() - rank;
}

}  // namespace

bool is_simple(const CVector& x, const RepSpec& rep, const SubgroupSetting& setting, double tol) {
  const ProductGroupSpec& spec = setting.group();
  std::vector<AlgebraElement> basis;
  for (std::size_t f = 0; f < spec.factors(); ++f) {
    if (setting.frozen(f)) continue;
    const int n = spec.dim(f);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        AlgebraElement e = AlgebraElement::zero(spec, AlgebraFlavor::general);
        e.blocks[f](i, j) = 1.0;
        basis.push_back(std::move(e));
      }
  }
  const int d = rep.dim();
  const auto cols = static_cast<Eigen::Index>(basis.size());
  Matrix orbit(d, cols);
  Matrix action(static_cast<Eigen::Index>(d) * d, cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    orbit.col(k) = infinitesimal_act(basis[k], x, rep);
    const Matrix a = action_matrix(basis[k], rep);
    action.col(k) = Eigen::Map<const CVector>(a.data(), a.size());
  }
  return nullity(orbit, tol) == nullity(action, tol);
}

double kn_functional(const CVector& x, const AlgebraElement& s, const RepSpec& rep,
                     const SubgroupSetting& setting, int panels) {
  if (panels < 1) throw std::invalid_argument("need at least one quadrature panel");
  static const double nodes[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double wts[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const ProductGroupSpec& spec = setting.group();
  const double h = 1.0 / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (int q = 0; q < 3; ++q) {
      const double t = mid + 0.5 * h * nodes[q];
      const CVector y = act(exp_element(s, Complex(0.0, t)), x, rep);
      acc += 0.5 * h * wts[q] * inner_product(mu_shifted(y, rep, setting), s, spec);
    }
  }
  return acc;
}

double kn_functional(const CVector& x, const GroupElement& g, const RepSpec& rep,
                     const SubgroupSetting& setting, int panels) {
  return kn_functional(x, positive_part_log(g), rep, setting, panels);
}

FlowResult gradient_flow(const CVector& x, const RepSpec& rep, const SubgroupSetting& setting,
                         const FlowOptions& opts, const std::optional<GroupElement>& initial) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("flow tolerance must be positive");
  const ProductGroupSpec& spec = setting.group();
  FlowResult out;
  GroupElement h = initial ? *initial : GroupElement::identity(spec);
  h.flavor = GroupFlavor::complexified;
  h.check_shape(spec);

  auto residual_of = [&](const GroupElement& g, AlgebraElement& r) {
    r = mu_shifted(act(g, x, rep), rep, setting);
    return norm(r, spec);
  };
  AlgebraElement r;
  double res = residual_of(h, r);
  double step = opts.step;
  int streak = 0;
  out.trajectory.push_back(res);
  out.log_metric_trajectory.push_back(sup_log_metric(h));

  while (res >= opts.tol && out.iterations < opts.max_iter) {
    ++out.iterations;
    GroupElement trial = exp_element(r, Complex(0.0, -step)) * h;
    AlgebraElement trial_r;
    const double trial_res = residual_of(trial, trial_r);
    if (!std::isfinite(trial_res) || trial_res > res) {
      ++out.rejections;
      streak = 0;
      step *= 0.5;
      if (step < opts.min_step) break;
      continue;
    }
    h = std::move(trial);
    r = std::move(trial_r);
    res = trial_res;
    const double lm = sup_log_metric(h);
    out.trajectory.push_back(res);
    out.log_metric_trajectory.push_back(lm);
    if (!std::isfinite(lm) || lm > opts.divergence_log_metric) {
      out.diverged = true;
      break;
    }
    if (++streak >= 5) {
      step = std::min(2.0 * step, opts.max_step);
      streak = 0;
    }
  }
  out.final_residual = res;
  out.converged = res < opts.tol;
  if (!out.converged) out.diverged = true;
  out.sup_log_metric = sup_log_metric(h);
  out.final_group_element = std::move(h);
  return out;
}

}  // namespace gpwb
