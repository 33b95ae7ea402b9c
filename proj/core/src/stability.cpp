#include "gpwb/stability.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace gpwb {

namespace {

const Rational kZero(0);

std::size_t rank_of(const CurveFixture& fx, std::size_t f) { return fx.degrees[f].size(); }

std::vector<std::size_t> active_factors(const CurveFixture& fx) {
  std::vector<std::size_t> out;
  const auto modes = fx.modes();
  for (std::size_t f = 0; f < modes.size(); ++f)
    if (modes[f] != FactorMode::frozen) out.push_back(f);
  return out;
}

// Every multi-index of the representation space.
std::vector<std::vector<int>> all_components(const RepSpec& rep) {
  std::vector<std::vector<int>> out{{}};
  for (const auto& s : rep.slots()) {
    std::vector<std::vector<int>> next;
    for (const auto& prefix : out)
      for (int i = 0; i < s.dim; ++i) {
        auto m = prefix;
        m.push_back(i);
        next.push_back(std::move(m));
      }
    out = std::move(next);
  }
  return out;
}

Rational eigenvalue_at(const RepSpec& rep, const std::vector<std::vector<Rational>>& alpha,
                       const std::vector<int>& m) {
  Rational e(0);
  const auto slots = rep.slots();
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (slots[k].action == SlotAction::trivial) continue;
    const Rational a = alpha[slots[k].factor][m[k]];
    e += slots[k].action == SlotAction::standard ? a : -a;
  }
  return e;
}

std::string describe(const SummandMasks& sub, int kind) {
  std::string out = kind == 0 ? "weight -1 on " : "weight 1 off ";
  for (std::size_t f = 0; f < sub.size(); ++f) {
    if (f) out += " x ";
    out += "{";
    bool first = true;
    for (std::size_t s = 0; s < sub[f].size(); ++s)
      if (sub[f][s]) {
        out += fmt::format("{}{}", first ? "" : ",", s);
        first = false;
      }
    out += "}";
  }
  return out;
}

SummandMasks mask_from_bits(const CurveFixture& fx, const std::vector<std::size_t>& active,
                            const std::vector<unsigned>& bits) {
  SummandMasks sub(fx.degrees.size());
  for (std::size_t f = 0; f < fx.degrees.size(); ++f) sub[f].assign(rank_of(fx, f), false);
  for (std::size_t a = 0; a < active.size(); ++a)
    for (std::size_t s = 0; s < rank_of(fx, active[a]); ++s) sub[active[a]][s] = (bits[a] >> s) & 1u;
  return sub;
}

// Visits every tuple of summand subsets over active factors.
template <typename Fn>
void for_each_subobject(const CurveFixture& fx, Fn&& fn) {
  const auto active = active_factors(fx);
  std::vector<unsigned> bits(active.size(), 0);
  while (true) {
    fn(mask_from_bits(fx, active, bits));
    std::size_t a = 0;
    for (; a < active.size(); ++a) {
      if (++bits[a] < (1u << rank_of(fx, active[a]))) break;
      bits[a] = 0;
    }
    if (a == active.size()) break;
  }
}

struct SubData {
  long long deg = 0;
  int rank = 0;
};

SubData sub_data(const std::vector<int>& degrees, const std::vector<bool>& mask) {
  SubData d;
  for (std::size_t s = 0; s < degrees.size(); ++s)
    if (mask[s]) {
      d.deg += degrees[s];
      ++d.rank;
    }
  return d;
}

long long total_degree(const std::vector<int>& degrees) {
  return std::accumulate(degrees.begin(), degrees.end(), 0LL);
}

void record(CurveVerdict& v, const Rational& slack, const std::string& what) {
  ++v.conditions;
  if (slack == kZero) v.marginal = true;
  if (!v.slack || slack < *v.slack) {
    v.slack = slack;
    v.witness = what;
  }
}

void finish(CurveVerdict& v) { v.stable = !v.constraint_violated && (!v.slack || *v.slack > kZero); }

std::vector<bool> mask_of_bits(unsigned bits, std::size_t n) {
  std::vector<bool> m(n);
  for (std::size_t s = 0; s < n; ++s) m[s] = (bits >> s) & 1u;
  return m;
}

std::string mask_text(const std::vector<bool>& m) {
  std::string out = "{";
  bool first = true;
  for (std::size_t s = 0; s < m.size(); ++s)
    if (m[s]) {
      out += fmt::format("{}{}", first ? "" : ",", s);
      first = false;
    }
  return out + "}";
}

}  // namespace

DirectionEval evaluate_direction(const CurveFixture& fx, const std::vector<std::vector<Rational>>& alpha) {
  const RepSpec rep = fx.rep();
  DirectionEval out;
  out.trivial = true;
  for (const auto& m : all_components(rep))
    if (eigenvalue_at(rep, alpha, m) != kZero) {
      out.trivial = false;
      break;
    }
  out.in_negative = true;
  for (const auto& m : fx.support)
    if (eigenvalue_at(rep, alpha, m) > kZero) {
      out.in_negative = false;
      break;
    }
  const auto modes = fx.modes();
  for (std::size_t f = 0; f < fx.degrees.size(); ++f) {
    if (modes[f] == FactorMode::frozen) continue;
    for (std::size_t s = 0; s < rank_of(fx, f); ++s)
      out.weight += alpha[f][s] * (Rational(fx.degrees[f][s]) - fx.levels[f]);
  }
  return out;
}

std::vector<std::vector<Rational>> generator_weights(const CurveFixture& fx, int kind, const SummandMasks& sub) {
  const auto modes = fx.modes();
  std::vector<std::vector<Rational>> alpha(fx.degrees.size());
  for (std::size_t f = 0; f < fx.degrees.size(); ++f) {
    alpha[f].assign(rank_of(fx, f), Rational(0));
    if (modes[f] == FactorMode::frozen) continue;
    for (std::size_t s = 0; s < rank_of(fx, f); ++s) {
      if (kind == 0 && sub[f][s]) alpha[f][s] = -1;
      if (kind == 1 && !sub[f][s]) alpha[f][s] = 1;
    }
  }
  return alpha;
}

CurveVerdict generator_verdict(const CurveFixture& fx) {
  fx.validate();
  CurveVerdict v;
  for_each_subobject(fx, [&](const SummandMasks& sub) {
    for (int kind = 0; kind < 2; ++kind) {
      const auto alpha = generator_weights(fx, kind, sub);
      bool zero = true;
      for (const auto& a : alpha)
        for (const auto& x : a)
          if (x != kZero) zero = false;
      if (zero) continue;
      const DirectionEval e = evaluate_direction(fx, alpha);
      if (e.trivial) {
        if (e.weight != kZero) v.constraint_violated = true;
        continue;
      }
      if (!e.in_negative) continue;
      record(v, e.weight, describe(sub, kind));
    }
  });
  finish(v);
  return v;
}

Rational deg_alpha(const CurveFixture& fx, const std::vector<std::vector<int>>& chain,
                   const std::vector<Rational>& weights, const Rational& c) {
  if (chain.size() != weights.size() || chain.empty())
    throw std::invalid_argument("one weight per chain step required");
  for (std::size_t k = 1; k < weights.size(); ++k)
    if (weights[k] < weights[k - 1]) throw std::invalid_argument("weights must be increasing");
  const auto& degs = fx.degrees.at(0);
  auto term = [&](const std::vector<int>& subset) {
    Rational d(0);
    for (int s : subset) d += Rational(degs.at(s)) - c;
    return d;
  };
  const std::size_t r = weights.size();
  std::vector<int> all(degs.size());
  std::iota(all.begin(), all.end(), 0);
  Rational out = weights[r - 1] * term(all);
  for (std::size_t k = 0; k + 1 < r; ++k) out += (weights[k] - weights[k + 1]) * term(chain[k]);
  return out;
}

PIndices p_indices(const CurveFixture& fx, const std::vector<std::vector<int>>& chain,
                   const std::vector<Rational>& weights) {
  PIndices p;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] <= kZero) p.p_alpha = static_cast<int>(i) + 1;
  if (fx.support.empty()) {
    p.degenerate = true;
    return p;
  }
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const std::set<int> in(chain[i].begin(), chain[i].end());
    bool all = true;
    for (const auto& m : fx.support)
      if (!in.count(m[0])) all = false;
    if (all) {
      p.p_chi = static_cast<int>(i) + 1;
      break;
    }
  }
  return p;
}

CurveVerdict pair_stable(const CurveFixture& fx) {
  if (fx.kind != ExampleKind::pair_tensor) throw std::invalid_argument("pair_stable needs a pair fixture");
  fx.validate();
  const auto& d1 = fx.degrees[0];
  const std::size_t r = d1.size();
  const Rational c = fx.levels[0];
  const SubData whole{total_degree(d1), static_cast<int>(r)};
  CurveVerdict v;
  for (unsigned bits = 0; bits < (1u << r); ++bits) {
    const auto m = mask_of_bits(bits, r);
    const SubData sub = sub_data(d1, m);
    // mu(V') < c
    if (sub.rank > 0) record(v, c * sub.rank - sub.deg, "mu(" + mask_text(m) + ") < c");
    // mu(V1/V') > c when Phi lies in V' (x) V2
    if (sub.rank < whole.rank) {
      bool contains = true;
      for (const auto& s : fx.support)
        if (!m[s[0]]) contains = false;
      if (contains)
        record(v, Rational(whole.deg - sub.deg) - c * (whole.rank - sub.rank), "mu(V1/" + mask_text(m) + ") > c");
    }
  }
  finish(v);
  return v;
}

CurveVerdict triple_stable(const CurveFixture& fx) {
  if (fx.kind != ExampleKind::triple_fixed_e2) throw std::invalid_argument("triple_stable needs a triple fixture");
  fx.validate();
  const auto& d1 = fx.degrees[0];
  const std::size_t r = d1.size();
  const Rational c = fx.levels[0];
  const SubData whole{total_degree(d1), static_cast<int>(r)};
  CurveVerdict v;
  for (unsigned bits = 0; bits < (1u << r); ++bits) {
    const auto m = mask_of_bits(bits, r);
    const SubData sub = sub_data(d1, m);
    if (sub.rank > 0) record(v, c * sub.rank - sub.deg, "mu(" + mask_text(m) + ") < c");
    if (sub.rank < whole.rank) {
      bool contains = true;
      for (const auto& s : fx.support)
        if (!m[s[0]]) contains = false;
      if (contains)
        record(v, Rational(whole.deg - sub.deg) - c * (whole.rank - sub.rank), "mu(E1/" + mask_text(m) + ") > c");
    }
  }
  finish(v);
  return v;
}

Rational triple_alpha(const CurveFixture& fx) {
  const long long n1 = static_cast<long long>(fx.degrees[0].size());
  const long long n2 = static_cast<long long>(fx.degrees[1].size());
  const long long deg = total_degree(fx.degrees[0]) + total_degree(fx.degrees[1]);
  return (fx.levels[0] * (n1 + n2) - deg) / n2;
}

CurveVerdict triple_alpha_stable(const CurveFixture& fx) {
  if (fx.kind != ExampleKind::triple_fixed_e2) throw std::invalid_argument("triple_alpha_stable needs a triple fixture");
  fx.validate();
  const Rational alpha = triple_alpha(fx);
  const auto& d1 = fx.degrees[0];
  const std::size_t r = d1.size();
  const int n2 = static_cast<int>(fx.degrees[1].size());
  const long long deg2 = total_degree(fx.degrees[1]);
  const Rational mu_total = (Rational(total_degree(d1) + deg2) + alpha * n2) / Rational(static_cast<long long>(r) + n2);
  CurveVerdict v;
  for (unsigned bits = 0; bits < (1u << r); ++bits) {
    const auto m = mask_of_bits(bits, r);
    const SubData sub = sub_data(d1, m);
    if (sub.rank > 0) {
      const Rational mu = Rational(sub.deg, sub.rank);
      record(v, mu_total - mu, "(" + mask_text(m) + ",0)");
    }
    bool contains = true;
    for (const auto& s : fx.support)
      if (!m[s[0]]) contains = false;
    if (contains && sub.rank < static_cast<int>(r)) {
      const Rational mu = (Rational(sub.deg + deg2) + alpha * n2) / Rational(sub.rank + n2);
      record(v, mu_total - mu, "(" + mask_text(m) + ",E2)");
    }
  }
  finish(v);
  return v;
}

CurveVerdict coherent_system_stable(const CurveFixture& fx) {
  if (fx.kind != ExampleKind::coherent_system) throw std::invalid_argument("needs a coherent system fixture");
  fx.validate();
  const auto& d = fx.degrees[0];
  const std::size_t n = d.size();
  const std::size_t k = fx.degrees[1].size();
  const Rational c1 = fx.levels[0];
  const Rational c2 = fx.levels[1];
  CurveVerdict v;
  if (Rational(total_degree(d)) != c1 * static_cast<long long>(n) + c2 * static_cast<long long>(k)) {
    v.constraint_violated = true;
    finish(v);
    return v;
  }
  for (unsigned bits = 0; bits < (1u << n); ++bits) {
    const auto m = mask_of_bits(bits, n);
    const SubData sub = sub_data(d, m);
    // Sections phi_t that land in E'.
    int kmax = 0;
    for (std::size_t t = 0; t < k; ++t) {
      bool inside = true;
      for (const auto& s : fx.support)
        if (s[1] == static_cast<int>(t) && !m[s[0]]) inside = false;
      if (inside) ++kmax;
    }
    for (int kk = 0; kk <= kmax; ++kk) {
      if (sub.rank == 0 && kk == 0) continue;
      if (sub.rank == static_cast<int>(n) && kk == static_cast<int>(k)) continue;
      const Rational slack = -(Rational(sub.deg) - c1 * sub.rank - c2 * kk);
      record(v, slack, fmt::format("({}, k'={})", mask_text(m), kk));
    }
  }
  finish(v);
  return v;
}

CurveVerdict coherent_alpha_form(const CurveFixture& fx) {
  if (fx.kind != ExampleKind::coherent_system) throw std::invalid_argument("needs a coherent system fixture");
  fx.validate();
  const auto& d = fx.degrees[0];
  const std::size_t n = d.size();
  const long long k = static_cast<long long>(fx.degrees[1].size());
  const Rational c1 = fx.levels[0];
  CurveVerdict v;
  if (Rational(total_degree(d)) != c1 * static_cast<long long>(n) + fx.levels[1] * k) {
    v.constraint_violated = true;
    finish(v);
    return v;
  }
  // alpha dim(S) / rk(E) = c1 - mu(E), with dim S = k for independent sections.
  const Rational alpha = (c1 * static_cast<long long>(n) - total_degree(d)) / k;
  for (unsigned bits = 1; bits < (1u << n); ++bits) {
    const auto m = mask_of_bits(bits, n);
    const SubData sub = sub_data(d, m);
    long long kp = 0;
    for (long long t = 0; t < k; ++t) {
      bool inside = true;
      for (const auto& s : fx.support)
        if (s[1] == t && !m[s[0]]) inside = false;
      if (inside) ++kp;
    }
    if (sub.rank == static_cast<int>(n) && kp == k) continue;
    const Rational lhs = (Rational(sub.deg) + alpha * kp) / sub.rank;
    record(v, (c1 - lhs) * sub.rank, fmt::format("({}, k'={})", mask_text(m), kp));
  }
  finish(v);
  return v;
}

CurveVerdict twisted_triple_stable(const CurveFixture& fx) {
  if (fx.kind != ExampleKind::twisted_triple) throw std::invalid_argument("needs a twisted triple fixture");
  fx.validate();
  const auto& d1 = fx.degrees[0];
  const auto& d2 = fx.degrees[1];
  const long long n1 = static_cast<long long>(d1.size());
  const long long n2 = static_cast<long long>(d2.size());
  const Rational c1 = fx.levels[0];
  const Rational c2 = fx.levels[1];
  const long long deg = total_degree(d1) + total_degree(d2);
  CurveVerdict v;
  if (c1 * n1 + c2 * n2 != Rational(deg)) {
    v.constraint_violated = true;
    finish(v);
    return v;
  }
  const Rational alpha = c1 - c2;
  const Rational mu_total = (Rational(deg) + alpha * n2) / (n1 + n2);
  for (unsigned b1 = 0; b1 < (1u << n1); ++b1)
    for (unsigned b2 = 0; b2 < (1u << n2); ++b2) {
      const auto m1 = mask_of_bits(b1, d1.size());
      const auto m2 = mask_of_bits(b2, d2.size());
      const SubData s1 = sub_data(d1, m1);
      const SubData s2 = sub_data(d2, m2);
      if (s1.rank + s2.rank == 0 || (s1.rank == n1 && s2.rank == n2)) continue;
      bool compatible = true;
      for (const auto& s : fx.support)
        if (m2[s[1]] && !m1[s[0]]) compatible = false;
      if (!compatible) continue;
      const int r = s1.rank + s2.rank;
      const Rational mu = (Rational(s1.deg + s2.deg) + alpha * s2.rank) / r;
      record(v, (mu_total - mu) * r, fmt::format("({},{})", mask_text(m1), mask_text(m2)));
    }
  finish(v);
  return v;
}

CurveVerdict holomorphic_triple_stable(const std::vector<int>& e1, const std::vector<int>& e2,
                                       const std::vector<std::pair<int, int>>& support, const Rational& alpha) {
  const long long n1 = static_cast<long long>(e1.size());
  const long long n2 = static_cast<long long>(e2.size());
  const Rational mu_total = (Rational(total_degree(e1) + total_degree(e2)) + alpha * n2) / (n1 + n2);
  CurveVerdict v;
  for (unsigned b1 = 0; b1 < (1u << n1); ++b1)
    for (unsigned b2 = 0; b2 < (1u << n2); ++b2) {
      const auto m1 = mask_of_bits(b1, e1.size());
      const auto m2 = mask_of_bits(b2, e2.size());
      const SubData s1 = sub_data(e1, m1);
      const SubData s2 = sub_data(e2, m2);
      if (s1.rank + s2.rank == 0 || (s1.rank == n1 && s2.rank == n2)) continue;
      bool compatible = true;
      for (const auto& [a, b] : support)
        if (m2[b] && !m1[a]) compatible = false;
      if (!compatible) continue;
      const int r = s1.rank + s2.rank;
      const Rational mu = (Rational(s1.deg + s2.deg) + alpha * s2.rank) / r;
      record(v, (mu_total - mu) * r, fmt::format("({},{})", mask_text(m1), mask_text(m2)));
    }
  finish(v);
  return v;
}

CurveVerdict higgs_stable(const CurveFixture& fx) {
  if (fx.kind != ExampleKind::higgs) throw std::invalid_argument("needs a higgs fixture");
  fx.validate();
  const auto& d = fx.degrees[1];
  const std::size_t n = d.size();
  const Rational mu_e(total_degree(d), static_cast<long long>(n));
  CurveVerdict v;
  if (fx.levels[1] != mu_e) {
    v.constraint_violated = true;
    finish(v);
    return v;
  }
  for (unsigned bits = 1; bits + 1 < (1u << n); ++bits) {
    const auto m = mask_of_bits(bits, n);
    // Theta maps summand b (dual slot) into summand a (standard slot).
    bool invariant = true;
    for (const auto& s : fx.support)
      if (m[s[1]] && !m[s[0]]) invariant = false;
    if (!invariant) continue;
    const SubData sub = sub_data(d, m);
    record(v, (mu_e - Rational(sub.deg, sub.rank)) * sub.rank, "mu(" + mask_text(m) + ") < mu(E)");
  }
  finish(v);
  return v;
}

CurveVerdict fixture_stable(const CurveFixture& fx) {
  switch (fx.kind) {
    case ExampleKind::pair_tensor: return pair_stable(fx);
    case ExampleKind::triple_fixed_e2: return triple_stable(fx);
    case ExampleKind::coherent_system: return coherent_system_stable(fx);
    case ExampleKind::twisted_triple: return twisted_triple_stable(fx);
    case ExampleKind::higgs: return higgs_stable(fx);
  }
  throw std::logic_error("unreachable");
}

SscReport ssc_reduction_equiv(const CurveFixture& fx, int trials, Rng& rng) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  const CurveVerdict gen = generator_verdict(fx);
  SscReport rep;
  rep.generator_stable = gen.stable;
  rep.marginal = gen.marginal;
  const auto active = active_factors(fx);
  std::uniform_int_distribution<int> draw(-4, 4);

  bool cone_ok = !gen.constraint_violated;
  auto check = [&](const std::vector<std::vector<Rational>>& alpha) {
    ++rep.samples;
    const DirectionEval e = evaluate_direction(fx, alpha);
    // Filtration of the active summands by weight.
    std::vector<Rational> levels;
    for (std::size_t f : active)
      for (const auto& a : alpha[f]) levels.push_back(a);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    const std::size_t r = levels.size();
    std::size_t q = 0;
    for (std::size_t i = 0; i < r; ++i)
      if (levels[i] <= kZero) q = i + 1;
    auto chain_mask = [&](std::size_t i) {
      // W^i: summands with weight <= levels[i-1]; W^0 is empty.
      SummandMasks m(fx.degrees.size());
      for (std::size_t f = 0; f < fx.degrees.size(); ++f) {
        m[f].assign(rank_of(fx, f), false);
        if (std::find(active.begin(), active.end(), f) == active.end()) continue;
        for (std::size_t s = 0; s < rank_of(fx, f); ++s) m[f][s] = i > 0 && alpha[f][s] <= levels[i - 1];
      }
      return m;
    };
    Rational combined(0);
    bool all_negative = true;
    auto use = [&](int kind, std::size_t i, const Rational& coeff) {
      if (coeff == kZero) return;
      if (coeff < kZero) throw std::logic_error("negative cone coefficient");
      const DirectionEval g = evaluate_direction(fx, generator_weights(fx, kind, chain_mask(i)));
      combined += coeff * g.weight;
      if (!g.in_negative) all_negative = false;
    };
    if (q > 0) {
      use(0, q, -levels[q - 1]);
      for (std::size_t i = 1; i < q; ++i) use(0, i, levels[i] - levels[i - 1]);
    }
    if (q < r) {
      use(1, q, levels[q]);
      for (std::size_t j = q + 2; j <= r; ++j) use(1, j - 1, levels[j - 1] - levels[j - 2]);
    }
    bool ok = combined == e.weight && all_negative == e.in_negative;
    if (!e.trivial && e.in_negative && e.weight <= kZero) cone_ok = false;
    if (gen.stable && !e.trivial && e.in_negative && e.weight <= kZero) ok = false;
    if (!ok) {
      ++rep.mismatches;
      rep.agree = false;
    }
  };

  for_each_subobject(fx, [&](const SummandMasks& sub) {
    for (int kind = 0; kind < 2; ++kind) check(generator_weights(fx, kind, sub));
  });
  for (int t = 0; t < trials; ++t) {
    std::vector<std::vector<Rational>> alpha(fx.degrees.size());
    for (std::size_t f = 0; f < fx.degrees.size(); ++f) alpha[f].assign(rank_of(fx, f), Rational(0));
    for (std::size_t f : active)
      for (auto& a : alpha[f]) a = draw(rng);
    check(alpha);
  }
  rep.cone_stable = cone_ok;
  if (rep.cone_stable != rep.generator_stable) rep.agree = false;
  return rep;
}

FiniteModel finite_model(const CurveFixture& fx, Rng& rng) {
  fx.validate();
  const RepSpec rep = fx.rep();
  const ProductGroupSpec spec = fx.group();
  std::vector<double> levels;
  for (const auto& c : fx.levels) levels.push_back(to_double(c));
  SubgroupSetting setting(spec, fx.modes(), levels);
  CVector x = CVector::Zero(rep.dim());
  for (const auto& s : fx.support) x(fx.flat_index(s)) = random_complex(rng);
  CandidateLattice lattice;
  lattice.per_factor.resize(spec.factors());
  for (std::size_t f = 0; f < spec.factors(); ++f) {
    const std::size_t n = rank_of(fx, f);
    for (unsigned bits = 1; bits + 1 < (1u << n); ++bits) {
      Matrix q = Matrix::Zero(static_cast<Eigen::Index>(n), std::popcount(bits));
      int col = 0;
      for (std::size_t s = 0; s < n; ++s)
        if ((bits >> s) & 1u) q(static_cast<Eigen::Index>(s), col++) = 1.0;
      lattice.per_factor[f].push_back(std::move(q));
    }
  }
  const auto degrees = fx.degrees;
  SubspaceDegree degree = [degrees](std::span<const Matrix> tuple) {
    double total = 0.0;
    for (std::size_t f = 0; f < tuple.size(); ++f) {
      if (tuple[f].cols() == 0) continue;
      const Matrix p = tuple[f] * tuple[f].adjoint();
      for (std::size_t s = 0; s < degrees[f].size(); ++s)
        total += degrees[f][s] * p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real();
    }
    return total;
  };
  return {std::move(x), rep, std::move(setting), std::move(lattice), std::move(degree)};
}

namespace {

std::vector<int> draw_degrees(Rng& rng, int lo_rank, int hi_rank) {
  std::uniform_int_distribution<int> rank(lo_rank, hi_rank);
  std::uniform_int_distribution<int> deg(-3, 3);
  std::vector<int> d(rank(rng));
  for (auto& x : d) x = deg(rng);
  return d;
}

Rational draw_level(Rng& rng) {
  std::uniform_int_distribution<int> num(-12, 12);
  std::uniform_int_distribution<int> den(1, 4);
  return Rational(num(rng), den(rng));
}

std::vector<std::vector<int>> draw_support(Rng& rng, const std::vector<int>& dims, double density) {
  std::vector<std::vector<int>> out{{}};
  for (int d : dims) {
    std::vector<std::vector<int>> next;
    for (const auto& p : out)
      for (int i = 0; i < d; ++i) {
        auto m = p;
        m.push_back(i);
        next.push_back(std::move(m));
      }
    out = std::move(next);
  }
  std::bernoulli_distribution keep(density);
  std::vector<std::vector<int>> kept;
  for (auto& m : out)
    if (keep(rng)) kept.push_back(std::move(m));
  return kept;
}

Rational degree_sum(const std::vector<int>& d) {
  long long s = 0;
  for (int x : d) s += x;
  return Rational(s);
}

}  // namespace

CurveFixture random_fixture(ExampleKind kind, Rng& rng) {
  std::uniform_real_distribution<double> dens(0.2, 0.9);
  switch (kind) {
    case ExampleKind::pair_tensor: {
      auto v1 = draw_degrees(rng, 1, 3);
      auto v2 = draw_degrees(rng, 1, 2);
      auto s = draw_support(rng, {static_cast<int>(v1.size()), static_cast<int>(v2.size())}, dens(rng));
      return make_pair_fixture(v1, v2, s, draw_level(rng));
    }
    case ExampleKind::triple_fixed_e2: {
      auto e1 = draw_degrees(rng, 1, 3);
      auto e2 = draw_degrees(rng, 1, 2);
      auto s = draw_support(rng, {static_cast<int>(e1.size()), static_cast<int>(e2.size())}, dens(rng));
      return make_triple_fixture(e1, e2, s, draw_level(rng));
    }
    case ExampleKind::coherent_system: {
      auto e = draw_degrees(rng, 1, 3);
      const int k = std::uniform_int_distribution<int>(1, 2)(rng);
      auto s = draw_support(rng, {static_cast<int>(e.size()), k}, dens(rng));
      const Rational c2 = draw_level(rng);
      const Rational c1 = (degree_sum(e) - c2 * k) / static_cast<long long>(e.size());
      return make_coherent_fixture(e, k, s, c1, c2);
    }
    case ExampleKind::twisted_triple: {
      auto e1 = draw_degrees(rng, 1, 2);
      auto e2 = draw_degrees(rng, 1, 2);
      auto f = draw_degrees(rng, 1, 2);
      auto s = draw_support(
          rng, {static_cast<int>(e1.size()), static_cast<int>(e2.size()), static_cast<int>(f.size())}, dens(rng));
      const Rational c2 = draw_level(rng);
      const Rational c1 =
          (degree_sum(e1) + degree_sum(e2) - c2 * static_cast<long long>(e2.size())) / static_cast<long long>(e1.size());
      return make_twisted_fixture(e1, e2, f, s, c1, c2);
    }
    case ExampleKind::higgs: {
      auto e = draw_degrees(rng, 1, 3);
      const int n = static_cast<int>(e.size());
      auto s = draw_support(rng, {n, n, 1}, dens(rng));
      return make_higgs_fixture(e, s, degree_sum(e) / static_cast<long long>(n));
    }
  }
  throw std::logic_error("unreachable");
}


}  // namespace gpwb
