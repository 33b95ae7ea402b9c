#include "gpwb/moment_maps.hpp"

#include <fmt/format.h>

namespace gpwb {

std::string to_string(SlotAction a) {
  switch (a) {
    case SlotAction::standard: return "standard";
    case SlotAction::dual: return "dual";
    case SlotAction::trivial: return "trivial";
  }
  return "trivial";
}

RepSpec::RepSpec(std::vector<Slot> slots) : slots_(std::move(slots)) {
  if (slots_.empty()) throw std::invalid_argument("representation needs at least one slot");
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    if (slots_[k].dim < 1)
      throw DimensionError(slots_[k].factor, fmt::format("slot {} has non-positive dimension", k));
    dim_ *= slots_[k].dim;
  }
}

RepSpec RepSpec::standard(int n) { return RepSpec({{n, 0, SlotAction::standard}}); }

RepSpec RepSpec::tensor(int n1, int n2) {
  return RepSpec({{n1, 0, SlotAction::standard}, {n2, 1, SlotAction::standard}});
}

RepSpec RepSpec::hom(int n1, int n2) {
  return RepSpec({{n1, 0, SlotAction::standard}, {n2, 1, SlotAction::dual}});
}

RepSpec RepSpec::twisted_hom(int n1, int n2, int n3) {
  return RepSpec({{n1, 0, SlotAction::standard},
                  {n2, 1, SlotAction::dual},
                  {n3, 2, SlotAction::dual}});
}

RepSpec RepSpec::higgs(int m) {
  return RepSpec({{m, 1, SlotAction::standard},
                  {m, 1, SlotAction::dual},
                  {1, 0, SlotAction::standard}});
}

bool RepSpec::acts_on(std::size_t factor) const noexcept {
  for (const auto& s : slots_)
    if (s.factor == factor && s.action != SlotAction::trivial) return true;
  return false;
}

void RepSpec::check(const ProductGroupSpec& spec) const {
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    const auto& s = slots_[k];
    if (s.action == SlotAction::trivial) continue;
    if (s.factor >= spec.factors())
      throw DimensionError(s.factor, fmt::format("slot {} names a missing factor", k));
    if (spec.dim(s.factor) != s.dim)
      throw DimensionError(s.factor, fmt::format("slot {} has dimension {} but factor has {}", k,
                                                 s.dim, spec.dim(s.factor)));
  }
}

Complex hermitian_product(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw DimensionError(0, "vector length mismatch");
  return (a.array() * b.array().conjugate()).sum();
}

double symplectic_form(const CVector& a, const CVector& b) { return hermitian_product(a, b).imag(); }

namespace {

struct SlotView {
  Eigen::Index outer = 1;
  Eigen::Index d = 1;
  Eigen::Index inner = 1;
};

SlotView view(const RepSpec& rep, std::size_t k) {
  SlotView v;
  const auto slots = rep.slots();
  for (std::size_t j = 0; j < k; ++j) v.outer *= slots[j].dim;
  v.d = slots[k].dim;
  for (std::size_t j = k + 1; j < slots.size(); ++j) v.inner *= slots[j].dim;
  return v;
}

void check_vector(const CVector& x, const RepSpec& rep) {
  if (x.size() != rep.dim())
    throw DimensionError(0, fmt::format("vector has length {}, representation has dimension {}",
                                        x.size(), rep.dim()));
}

// y = (I (x) m (x) I) x on slot k.
CVector apply_on_slot(const Matrix& m, const CVector& x, const RepSpec& rep, std::size_t k) {
  const SlotView v = view(rep, k);
  CVector y(x.size());
  for (Eigen::Index o = 0; o < v.outer; ++o)
    for (Eigen::Index i = 0; i < v.inner; ++i) {
      for (Eigen::Index a = 0; a < v.d; ++a) {
        Complex acc = 0.0;
        for (Eigen::Index b = 0; b < v.d; ++b) acc += m(a, b) * x((o * v.d + b) * v.inner + i);
        y((o * v.d + a) * v.inner + i) = acc;
      }
    }
  return y;
}

// Slices of x along slot k as columns of a d x (outer*inner) matrix.
Matrix slices(const CVector& x, const RepSpec& rep, std::size_t k) {
  const SlotView v = view(rep, k);
  Matrix y(v.d, v.outer * v.inner);
  for (Eigen::Index o = 0; o < v.outer; ++o)
    for (Eigen::Index a = 0; a < v.d; ++a)
      for (Eigen::Index i = 0; i < v.inner; ++i) y(a, o * v.inner + i) = x((o * v.d + a) * v.inner + i);
  return y;
}

Matrix slot_operator(const Matrix& block, SlotAction action, bool group_level) {
  if (action == SlotAction::standard) return block;
  // dual: C acts by (C^{-1})^T, s acts by -s^T
  if (group_level) return block.inverse().transpose();
  return -block.transpose();
}

}  // namespace

CVector act(const GroupElement& g, const CVector& x, const RepSpec& rep) {
  check_vector(x, rep);
  CVector y = x;
  const auto slots = rep.slots();
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (slots[k].action == SlotAction::trivial) continue;
    if (slots[k].factor >= g.blocks.size()) throw DimensionError(slots[k].factor, "missing group block");
    const Matrix& b = g.blocks[slots[k].factor];
    const Matrix op = (slots[k].action == SlotAction::dual && g.flavor == GroupFlavor::unitary)
                          ? Matrix(b.conjugate())
                          : slot_operator(b, slots[k].action, true);
    y = apply_on_slot(op, y, rep, k);
  }
  return y;
}

CVector infinitesimal_act(const AlgebraElement& s, const CVector& x, const RepSpec& rep) {
  check_vector(x, rep);
  CVector y = CVector::Zero(x.size());
  const auto slots = rep.slots();
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (slots[k].action == SlotAction::trivial) continue;
    if (slots[k].factor >= s.blocks.size()) throw DimensionError(slots[k].factor, "missing algebra block");
    y += apply_on_slot(slot_operator(s.blocks[slots[k].factor], slots[k].action, false), x, rep, k);
  }
  return y;
}

Matrix action_matrix(const AlgebraElement& s, const RepSpec& rep) {
  const int n = rep.dim();
  Matrix out(n, n);
  for (int j = 0; j < n; ++j) out.col(j) = infinitesimal_act(s, CVector::Unit(n, j), rep);
  return out;
}

Matrix mu_fundamental(const CVector& x) { return -kI * (x * x.adjoint()); }

Matrix mu_factor(const CVector& x, const RepSpec& rep, std::size_t factor) {
  check_vector(x, rep);
  if (!rep.acts_on(factor)) throw DimensionError(factor, "factor acts trivially");
  Matrix out;
  const auto slots = rep.slots();
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (slots[k].factor != factor || slots[k].action == SlotAction::trivial) continue;
    const Matrix y = slices(x, rep, k);
    Matrix term = (slots[k].action == SlotAction::standard) ? Matrix(-kI * (y * y.adjoint()))
                                                            : Matrix(kI * (y * y.adjoint()).conjugate());
    if (out.size() == 0)
      out = std::move(term);
    else
      out += term;
  }
  return 0.5 * (out - out.adjoint());
}

AlgebraElement mu_full(const CVector& x, const RepSpec& rep, const ProductGroupSpec& spec) {
  rep.check(spec);
  AlgebraElement out = AlgebraElement::zero(spec);
  for (std::size_t f = 0; f < spec.factors(); ++f)
    if (rep.acts_on(f)) out.blocks[f] = mu_factor(x, rep, f);
  return out;
}

AlgebraElement mu_shifted(const CVector& x, const RepSpec& rep, const SubgroupSetting& setting) {
  AlgebraElement out = project_subalgebra(mu_full(x, rep, setting.group()), setting);
  out -= setting.central_shift();
  return out;
}

}  // namespace gpwb
