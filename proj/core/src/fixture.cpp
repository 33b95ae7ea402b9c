#include "gpwb/fixture.hpp"

#include <charconv>
#include <stdexcept>

#include <fmt/format.h>

namespace gpwb {

namespace {

long long parse_integer(const std::string& s, const std::string& whole) {
  long long v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last)
    throw std::invalid_argument(fmt::format("'{}' is not a rational number", whole));
  return v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    const long long num = parse_integer(text.substr(0, slash), text);
    const long long den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw std::invalid_argument(fmt::format("'{}' has zero denominator", text));
    return Rational(num, den);
  }
  if (const auto dot = text.find('.'); dot != std::string::npos) {
    const std::string frac = text.substr(dot + 1);
    if (frac.size() > 12) throw std::invalid_argument(fmt::format("'{}' has too many decimals", text));
    std::string head = text.substr(0, dot);
    const bool negative = !head.empty() && head[0] == '-';
    if (head.empty() || head == "-" || head == "+") head += "0";
    long long scale = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
    const long long ip = parse_integer(head, text);
    const long long fp = frac.empty() ? 0 : parse_integer(frac, text);
    const long long num = (negative ? -1 : 1) * (std::abs(ip) * scale + fp);
    return Rational(num, scale);
  }
  return Rational(parse_integer(text, text));
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return fmt::format("{}/{}", r.numerator(), r.denominator());
}

double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

std::string to_string(ExampleKind kind) {
  switch (kind) {
    case ExampleKind::pair_tensor: return "pair_tensor";
    case ExampleKind::triple_fixed_e2: return "triple_fixed_E2";
    case ExampleKind::coherent_system: return "coherent_system";
    case ExampleKind::twisted_triple: return "twisted_triple";
    case ExampleKind::higgs: return "higgs";
  }
  return "pair_tensor";
}

ExampleKind example_kind_from_string(const std::string& name) {
  if (name == "pair_tensor" || name == "pair") return ExampleKind::pair_tensor;
  if (name == "triple_fixed_E2" || name == "triple") return ExampleKind::triple_fixed_e2;
  if (name == "coherent_system") return ExampleKind::coherent_system;
  if (name == "twisted_triple") return ExampleKind::twisted_triple;
  if (name == "higgs") return ExampleKind::higgs;
  throw std::invalid_argument(fmt::format("unknown example kind '{}'", name));
}

ProductGroupSpec CurveFixture::group() const {
  std::vector<int> dims;
  for (const auto& d : degrees) dims.push_back(static_cast<int>(d.size()));
  return ProductGroupSpec(std::move(dims));
}

RepSpec CurveFixture::rep() const {
  const auto dims = [&](std::size_t f) { return static_cast<int>(degrees.at(f).size()); };
  switch (kind) {
    case ExampleKind::pair_tensor: return RepSpec::tensor(dims(0), dims(1));
    case ExampleKind::triple_fixed_e2:
    case ExampleKind::coherent_system: return RepSpec::hom(dims(0), dims(1));
    case ExampleKind::twisted_triple: return RepSpec::twisted_hom(dims(0), dims(1), dims(2));
    case ExampleKind::higgs: return RepSpec::higgs(dims(1));
  }
  throw std::logic_error("unreachable");
}

std::vector<FactorMode> CurveFixture::modes() const {
  using M = FactorMode;
  switch (kind) {
    case ExampleKind::pair_tensor:
    case ExampleKind::triple_fixed_e2: return {M::full, M::frozen};
    case ExampleKind::coherent_system: return {M::full, M::constant};
    case ExampleKind::twisted_triple: return {M::full, M::full, M::frozen};
    case ExampleKind::higgs: return {M::frozen, M::full};
  }
  throw std::logic_error("unreachable");
}

int CurveFixture::component_degree(const std::vector<int>& multi_index) const {
  const RepSpec r = rep();
  const auto slots = r.slots();
  if (multi_index.size() != slots.size())
    throw std::invalid_argument("support entry needs one summand index per slot");
  int total = 0;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto& degs = degrees.at(slots[k].factor);
    const int idx = multi_index[k];
    if (idx < 0 || idx >= static_cast<int>(degs.size()))
      throw std::invalid_argument(fmt::format("support index {} out of range in slot {}", idx, k));
    if (slots[k].action == SlotAction::standard) total += degs[idx];
    if (slots[k].action == SlotAction::dual) total -= degs[idx];
  }
  return total;
}

int CurveFixture::flat_index(const std::vector<int>& multi_index) const {
  const RepSpec r = rep();
  const auto slots = r.slots();
  if (multi_index.size() != slots.size())
    throw std::invalid_argument("support entry needs one summand index per slot");
  int flat = 0;
  for (std::size_t k = 0; k < slots.size(); ++k) flat = flat * slots[k].dim + multi_index[k];
  return flat;
}

void CurveFixture::validate() const {
  const std::size_t expected = kind == ExampleKind::twisted_triple ? 3 : 2;
  if (degrees.size() != expected)
    throw std::invalid_argument(fmt::format("{} fixture needs {} factors", to_string(kind), expected));
  if (levels.size() != expected)
    throw std::invalid_argument(fmt::format("{} fixture needs {} levels", to_string(kind), expected));
  for (std::size_t f = 0; f < degrees.size(); ++f)
    if (degrees[f].empty()) throw std::invalid_argument(fmt::format("factor {} has no summands", f));
  if (kind == ExampleKind::coherent_system)
    for (int d : degrees[1])
      if (d != 0) throw std::invalid_argument("coherent system second factor must be trivial");
  if (kind == ExampleKind::higgs && (degrees[0].size() != 1 || degrees[0][0] != 0))
    throw std::invalid_argument("higgs cotangent factor must be the trivial line bundle");
  for (const auto& s : support) component_degree(s);
}

CurveFixture make_pair_fixture(std::vector<int> v1, std::vector<int> v2,
                               std::vector<std::vector<int>> support, Rational c) {
  CurveFixture f{ExampleKind::pair_tensor, {std::move(v1), std::move(v2)}, {c, Rational(0)}, std::move(support)};
  f.validate();
  return f;
}

CurveFixture make_triple_fixture(std::vector<int> e1, std::vector<int> e2,
                                 std::vector<std::vector<int>> support, Rational c) {
  CurveFixture f{ExampleKind::triple_fixed_e2, {std::move(e1), std::move(e2)}, {c, Rational(0)}, std::move(support)};
  f.validate();
  return f;
}

CurveFixture make_coherent_fixture(std::vector<int> e, int k, std::vector<std::vector<int>> support,
                                   Rational c1, Rational c2) {
  CurveFixture f{ExampleKind::coherent_system, {std::move(e), std::vector<int>(k, 0)}, {c1, c2},
                 std::move(support)};
  f.validate();
  return f;
}

CurveFixture make_twisted_fixture(std::vector<int> e1, std::vector<int> e2, std::vector<int> twist,
                                  std::vector<std::vector<int>> support, Rational c1, Rational c2) {
  CurveFixture f{ExampleKind::twisted_triple,
                 {std::move(e1), std::move(e2), std::move(twist)},
                 {c1, c2, Rational(0)},
                 std::move(support)};
  f.validate();
  return f;
}

CurveFixture make_higgs_fixture(std::vector<int> e, std::vector<std::vector<int>> support, Rational cm) {
  CurveFixture f{ExampleKind::higgs, {{0}, std::move(e)}, {Rational(0), cm}, std::move(support)};
  f.validate();
  return f;
}

}  // namespace gpwb
