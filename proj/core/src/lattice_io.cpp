#include "gpwb/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace gpwb {

using nlohmann::json;

namespace {

void append_matrix(std::vector<double>& out, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out.push_back(m(r, c).real());
      out.push_back(m(r, c).imag());
    }
}

std::vector<double> flatten(const std::vector<Matrix>& ms) {
  std::vector<double> out;
  for (const auto& m : ms) append_matrix(out, m);
  return out;
}

std::vector<Matrix> unflatten(const std::vector<double>& flat, std::size_t count, int rank, const char* field) {
  const std::size_t per = 2 * static_cast<std::size_t>(rank) * rank;
  if (flat.size() != count * per)
    throw FormatError(fmt::format("field '{}' has {} numbers, expected {}", field, flat.size(), count * per));
  std::vector<Matrix> out(count, Matrix(rank, rank));
  std::size_t k = 0;
  for (auto& m : out)
    for (int r = 0; r < rank; ++r)
      for (int c = 0; c < rank; ++c, k += 2) m(r, c) = Complex(flat[k], flat[k + 1]);
  return out;
}

SlotAction slot_action_from_string(const std::string& s) {
  for (auto a : {SlotAction::standard, SlotAction::dual, SlotAction::trivial})
    if (to_string(a) == s) return a;
  throw FormatError("unknown slot action '" + s + "'");
}

void expect_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kFormatHeader)
    throw FormatError(fmt::format("missing '{}' header line", kFormatHeader));
}

json parse_body(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed JSON body: ") + e.what());
  }
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(fmt::format("missing field '{}'", key));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("field '{}': {}", key, e.what()));
  }
}

}  // namespace

std::string format_double(double x) { return fmt::format("{}", x); }

void write_snapshot(std::ostream& out, const LatticePairState& state) {
  const auto& lat = state.lattice;
  json factors = json::array();
  for (std::size_t f = 0; f < state.factors.size(); ++f) {
    const auto& b = state.factors[f];
    std::vector<Matrix> metric;
    metric.reserve(lat.sites());
    for (int s = 0; s < lat.sites(); ++s) metric.push_back(b.metric(s));
    std::vector<double> links = flatten(b.links[0]);
    const auto y = flatten(b.links[1]);
    links.insert(links.end(), y.begin(), y.end());
    factors.push_back({{"rank", b.rank},
                       {"degree", lattice_degree(b, lat) / (2.0 * std::numbers::pi)},
                       {"mode", to_string(state.setting.mode(f))},
                       {"level", state.setting.level(f)},
                       {"links", std::move(links)},
                       {"gauge", flatten(b.gauge)},
                       {"metric", flatten(metric)}});
  }
  json slots = json::array();
  for (const auto& s : state.rep.slots())
    slots.push_back({{"dim", s.dim}, {"factor", s.factor}, {"action", to_string(s.action)}});
  std::vector<double> section;
  for (const auto& v : state.section)
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      section.push_back(v(i).real());
      section.push_back(v(i).imag());
    }
  const json body{{"lattice_size", lat.size()},
                  {"factors", std::move(factors)},
                  {"slots", std::move(slots)},
                  {"section", std::move(section)},
                  {"construction_tolerance", state.construction_tolerance},
                  {"warnings", state.warnings}};
  out << kFormatHeader << '\n' << body.dump(1) << '\n';
}

LatticePairState read_snapshot(std::istream& in) {
  expect_header(in);
  const json body = parse_body(in);
  const TorusLattice lat(field<int>(body, "lattice_size"));
  const auto sites = static_cast<std::size_t>(lat.sites());

  std::vector<LatticeBundle> factors;
  std::vector<int> dims;
  std::vector<FactorMode> modes;
  std::vector<double> levels;
  for (const auto& jf : field<json>(body, "factors")) {
    LatticeBundle b;
    b.rank = field<int>(jf, "rank");
    if (b.rank < 1) throw FormatError("factor rank must be positive");
    auto links = unflatten(field<std::vector<double>>(jf, "links"), 2 * sites, b.rank, "links");
    b.links[0].assign(links.begin(), links.begin() + static_cast<std::ptrdiff_t>(sites));
    b.links[1].assign(links.begin() + static_cast<std::ptrdiff_t>(sites), links.end());
    b.gauge = unflatten(field<std::vector<double>>(jf, "gauge"), sites, b.rank, "gauge");
    dims.push_back(b.rank);
    try {
      modes.push_back(factor_mode_from_string(field<std::string>(jf, "mode")));
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
    levels.push_back(field<double>(jf, "level"));
    factors.push_back(std::move(b));
  }
  std::vector<Slot> slots;
  for (const auto& js : field<json>(body, "slots"))
    slots.push_back({field<int>(js, "dim"), field<std::size_t>(js, "factor"),
                     slot_action_from_string(field<std::string>(js, "action"))});
  const ProductGroupSpec spec(dims);
  RepSpec rep(std::move(slots));
  const auto flat = field<std::vector<double>>(body, "section");
  const auto dim = static_cast<std::size_t>(rep.dim());
  if (flat.size() != 2 * dim * sites)
    throw FormatError(fmt::format("field 'section' has {} numbers, expected {}", flat.size(), 2 * dim * sites));
  SectionField section(sites, CVector(rep.dim()));
  for (std::size_t s = 0, k = 0; s < sites; ++s)
    for (std::size_t i = 0; i < dim; ++i, k += 2) section[s](static_cast<Eigen::Index>(i)) = Complex(flat[k], flat[k + 1]);

  LatticePairState state{lat,
                         std::move(factors),
                         std::move(section),
                         std::move(rep),
                         SubgroupSetting(spec, modes, levels),
                         field<double>(body, "construction_tolerance"),
                         field<std::vector<std::string>>(body, "warnings")};
  try {
    state.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("inconsistent snapshot: ") + e.what());
  }
  return state;
}

void save_snapshot(const std::filesystem::path& path, const LatticePairState& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_snapshot(out, state);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

LatticePairState load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_snapshot(in);
}

void write_fixture(std::ostream& out, const CurveFixture& fx) {
  std::vector<int> ranks;
  for (const auto& d : fx.degrees) ranks.push_back(static_cast<int>(d.size()));
  std::vector<std::string> levels;
  for (const auto& c : fx.levels) levels.push_back(to_string(c));
  const json body{{"kind", to_string(fx.kind)},
                  {"ranks", ranks},
                  {"degrees", fx.degrees},
                  {"support", fx.support},
                  {"levels", levels}};
  out << kFormatHeader << '\n' << body.dump(1) << '\n';
}

CurveFixture read_fixture(std::istream& in) {
  expect_header(in);
  const json body = parse_body(in);
  CurveFixture fx;
  try {
    fx.kind = example_kind_from_string(field<std::string>(body, "kind"));
    for (const auto& s : field<std::vector<std::string>>(body, "levels")) fx.levels.push_back(parse_rational(s));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  fx.degrees = field<std::vector<std::vector<int>>>(body, "degrees");
  fx.support = field<std::vector<std::vector<int>>>(body, "support");
  const auto ranks = field<std::vector<int>>(body, "ranks");
  if (ranks.size() != fx.degrees.size()) throw FormatError("'ranks' and 'degrees' differ in length");
  for (std::size_t f = 0; f < ranks.size(); ++f)
    if (ranks[f] != static_cast<int>(fx.degrees[f].size()))
      throw FormatError(fmt::format("factor {} has rank {} but {} degrees", f, ranks[f], fx.degrees[f].size()));
  try {
    fx.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("inconsistent fixture: ") + e.what());
  }
  return fx;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
  out << kTrajectoryHeader << '\n';
  for (const auto& r : rows)
    out << fmt::format("{},{},{},{}\n", r.iteration, r.l2_residual, r.linf_residual, r.sup_log_metric);
}

std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) throw FormatError("missing trajectory header");
  std::vector<TrajectoryRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell[4];
    for (auto& c : cell)
      if (!std::getline(ss, c, ',')) throw FormatError(fmt::format("line {}: expected 4 columns", lineno));
    TrajectoryRow r;
    auto parse_num = [&](const std::string& s, auto& dst) {
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), dst);
      if (ec != std::errc() || p != s.data() + s.size())
        throw FormatError(fmt::format("line {}: bad number '{}'", lineno, s));
    };
    parse_num(cell[0], r.iteration);
    parse_num(cell[1], r.l2_residual);
    parse_num(cell[2], r.linf_residual);
    parse_num(cell[3], r.sup_log_metric);
    rows.push_back(r);
  }
  return rows;
}

void save_trajectory_csv(const std::filesystem::path& path, const std::vector<TrajectoryRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_trajectory_csv(out, rows);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace gpwb
