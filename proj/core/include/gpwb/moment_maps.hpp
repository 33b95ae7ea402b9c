#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gpwb/algebra.hpp"

namespace gpwb {

// How a group factor acts on one tensor slot.  The conjugation action on
// End(C^n) is two slots of the same factor, one standard and one dual.
enum class SlotAction { standard, dual, trivial };

std::string to_string(SlotAction a);

struct Slot {
  int dim = 1;
  std::size_t factor = 0;
  SlotAction action = SlotAction::standard;

  bool operator==(const Slot&) const = default;
};

// Target space V = slot_1 (x) ... (x) slot_m with a per-slot factor action.
// Vectors are flat arrays in row-major multi-index order (first slot slowest).
class RepSpec {
 public:
  explicit RepSpec(std::vector<Slot> slots);

  // U(n) on C^n.
  static RepSpec standard(int n);
  // U(n1) x U(n2) on C^n1 (x) C^n2.
  static RepSpec tensor(int n1, int n2);
  // U(n1) x U(n2) on Hom(C^n2, C^n1): T -> C1 T C2^{-1}.
  static RepSpec hom(int n1, int n2);
  // U(n1) x U(n2) x U(n3) on Hom(C^n2 (x) C^n3, C^n1).
  static RepSpec twisted_hom(int n1, int n2, int n3);
  // U(1) x U(m) on End(C^m) (x) C, factor 0 being the cotangent frame.
  static RepSpec higgs(int m);

  std::span<const Slot> slots() const noexcept { return slots_; }
  int dim() const noexcept { return dim_; }
  bool acts_on(std::size_t factor) const noexcept;
  void check(const ProductGroupSpec& spec) const;

  bool operator==(const RepSpec&) const = default;

 private:
  std::vector<Slot> slots_;
  int dim_ = 1;
};

// Sum_i a_i conj(b_i): linear in the first argument.
Complex hermitian_product(const CVector& a, const CVector& b);
// Im <a,b>.
double symplectic_form(const CVector& a, const CVector& b);

CVector act(const GroupElement& g, const CVector& x, const RepSpec& rep);
CVector infinitesimal_act(const AlgebraElement& s, const CVector& x, const RepSpec& rep);
// Dense matrix of the infinitesimal action of s on V.
Matrix action_matrix(const AlgebraElement& s, const RepSpec& rep);

// -i x x^dagger.
Matrix mu_fundamental(const CVector& x);
// Moment map block of one factor; throws if that factor acts trivially.
Matrix mu_factor(const CVector& x, const RepSpec& rep, std::size_t factor);
AlgebraElement mu_full(const CVector& x, const RepSpec& rep, const ProductGroupSpec& spec);
// project_subalgebra(mu_full(x)) - central shift.
AlgebraElement mu_shifted(const CVector& x, const RepSpec& rep, const SubgroupSetting& setting);

}  // namespace gpwb
