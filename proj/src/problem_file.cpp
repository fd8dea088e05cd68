#include "fracvi/problem_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fracvi/errors.hpp"
#include "fracvi/field_io.hpp"

namespace fracvi {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

IniDocument parse_ini(const std::string& text) {
  IniDocument doc;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    auto cut = line.find_first_of(";#");
    if (cut != std::string::npos) line = line.substr(0, cut);
    std::string t = trim(line);
    if (t.empty()) continue;
    int indent = static_cast<int>(line.find_first_not_of(" \t")) + 1;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError("unterminated section header", line_no, indent);
      section = lower(trim(t.substr(1, t.size() - 2)));
      if (section.empty()) throw ParseError("empty section name", line_no, indent);
      if (!problem_file_keys().contains(section)) throw ParseError("unknown section [" + section + "]", line_no, indent);
      doc[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line_no, indent);
    if (section.empty()) throw ParseError("entry outside any section", line_no, indent);
    std::string key = lower(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError("missing key", line_no, indent);
    std::string rest = line.substr(eq + 1);
    std::string value = trim(rest);
    auto vpos = rest.find_first_not_of(" \t");
    int column = static_cast<int>(eq) + 2 + (vpos == std::string::npos ? 0 : static_cast<int>(vpos));
    if (value.empty()) throw ParseError("missing value for " + key, line_no, column);
    const auto& allowed = problem_file_keys().at(section);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ParseError("unknown key '" + key + "' in [" + section + "]", line_no, indent);
    if (doc[section].contains(key)) throw ParseError("duplicate key '" + key + "'", line_no, indent);
    doc[section][key] = IniEntry{value, line_no, column};
  }
  return doc;
}

const std::map<std::string, std::vector<std::string>>& problem_file_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"grid", {"dim", "n", "half_length"}},
      {"domain", {"shape", "half_width", "radius", "margin"}},
      {"coefficients", {"a"}},
      {"data", {"f_sharp", "f_vec"}},
      {"obstacle", {"g", "regime"}},
      {"solver",
       {"sigma", "method", "eps_initial", "eps_factor", "levels", "picard_tol", "picard_max_iters", "damping",
        "krylov_tol", "krylov_max_iters", "linearization", "pd_tol", "pd_max_iters", "pd_penalty", "active_tol",
        "pd_krylov_tol", "sigma_ladder", "sigma_tol", "cross_tol", "reference"}},
  };
  return keys;
}

void apply_overrides(IniDocument& doc, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    auto eq = o.find('=');
    if (eq == std::string::npos) throw ValidationError("override '" + o + "' is not key=value");
    std::string name = lower(trim(o.substr(0, eq)));
    std::string value = trim(o.substr(eq + 1));
    std::string section = "solver";
    auto dot = name.find('.');
    if (dot != std::string::npos) {
      section = name.substr(0, dot);
      name = name.substr(dot + 1);
    }
    auto it = problem_file_keys().find(section);
    if (it == problem_file_keys().end() ||
        std::find(it->second.begin(), it->second.end(), name) == it->second.end())
      throw ValidationError("override names no valid field: " + o);
    if (value.empty()) throw ValidationError("override '" + o + "' has an empty value");
    doc[section][name] = IniEntry{value, 0, 0};
  }
}

namespace {

// Call expression name(arg, ...) with positions for error reporting.
struct Call {
  std::string name;
  std::vector<std::string> args;
  int column = 0;
};

[[noreturn]] void fail(const std::string& what, const IniEntry& e, int offset = 0) {
  if (e.line == 0) throw ValidationError(what + " (in override)");
  throw ParseError(what, e.line, e.column + offset);
}

// Splits text at top-level occurrences of sep (outside parentheses).
std::vector<std::pair<std::string, int>> split_top(const std::string& text, char sep, const IniEntry& e) {
  std::vector<std::pair<std::string, int>> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    char c = i < text.size() ? text[i] : sep;
    if (c == '(') ++depth;
    if (c == ')') {
      if (--depth < 0) fail("unbalanced ')'", e, static_cast<int>(i));
    }
    if (c == sep && depth == 0) {
      std::string piece = text.substr(start, i - start);
      auto lead = piece.find_first_not_of(" \t");
      parts.emplace_back(trim(piece), static_cast<int>(start + (lead == std::string::npos ? 0 : lead)));
      start = i + 1;
    }
  }
  if (depth != 0) fail("unbalanced '('", e, static_cast<int>(text.size()));
  return parts;
}

Call parse_call(const std::string& text, int offset, const IniEntry& e) {
  Call call;
  call.column = offset;
  if (text.empty()) fail("empty expression", e, offset);
  auto open = text.find('(');
  if (open == std::string::npos) {
    call.name = lower(text);
  } else {
    if (text.back() != ')') fail("expected ')' at end of '" + text + "'", e, offset + static_cast<int>(text.size()));
    call.name = lower(trim(text.substr(0, open)));
    std::string inner = text.substr(open + 1, text.size() - open - 2);
    if (!trim(inner).empty())
      for (auto& [arg, pos] : split_top(inner, ',', e)) {
        if (arg.empty()) fail("empty argument", e, offset + static_cast<int>(open) + 1 + pos);
        call.args.push_back(arg);
      }
  }
  for (char c : call.name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) fail("invalid name '" + call.name + "'", e, offset);
  if (call.name.empty()) fail("missing function name", e, offset);
  return call;
}

double parse_number(const std::string& text, const IniEntry& e, int offset) {
  double v = 0.0;
  const char* b = text.data();
  const char* end = text.data() + text.size();
  if (!text.empty() && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) fail("expected a number, got '" + text + "'", e, offset);
  return v;
}

double number_entry(const IniEntry& e) { return parse_number(e.value, e, 0); }

long integer_entry(const IniEntry& e) {
  double v = number_entry(e);
  if (v != std::floor(v) || std::abs(v) > 1e15) fail("expected an integer, got '" + e.value + "'", e);
  return static_cast<long>(v);
}

std::vector<double> number_args(const Call& c, const IniEntry& e) {
  std::vector<double> out;
  for (const auto& a : c.args) out.push_back(parse_number(a, e, c.column));
  return out;
}

void expect_args(const Call& c, std::size_t count, const IniEntry& e) {
  if (c.args.size() != count)
    fail(c.name + " expects " + std::to_string(count) + " argument(s), got " + std::to_string(c.args.size()), e,
         c.column);
}

struct Context {
  const IniDocument& doc;
  std::filesystem::path base;
  Grid grid;
  DomainMask mask;
  std::vector<std::filesystem::path> inputs;

  const IniEntry* find(const std::string& section, const std::string& key) const {
    auto s = doc.find(section);
    if (s == doc.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }
  const IniEntry& require(const std::string& section, const std::string& key) const {
    const IniEntry* e = find(section, key);
    if (!e) throw ValidationError("missing required key " + section + "." + key);
    return *e;
  }
  std::filesystem::path resolve(const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative()) path = base / path;
    if (!std::filesystem::exists(path)) throw ValidationError("referenced file does not exist: " + path.string());
    inputs.push_back(path);
    return path;
  }
};

ScalarField profile_term(Context& ctx, const Call& c, const IniEntry& e) {
  const Grid& grid = ctx.grid;
  if (c.name == "constant") {
    expect_args(c, 1, e);
    return ScalarField(grid, number_args(c, e)[0]);
  }
  if (c.name == "indicator") {
    expect_args(c, 1, e);
    ScalarField f = indicator_field(ctx.mask);
    f *= number_args(c, e)[0];
    return f;
  }
  if (c.name == "gaussian") {
    expect_args(c, static_cast<std::size_t>(grid.dim() + 2), e);
    auto v = number_args(c, e);
    double cx = v[0], cy = grid.dim() == 2 ? v[1] : 0.0;
    double width = v[grid.dim()], amp = v[grid.dim() + 1];
    if (!(width > 0.0)) fail("gaussian width must be positive", e, c.column);
    return ScalarField::from_function(grid, [=](double x, double y) {
      double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      return amp * std::exp(-r2 / (width * width));
    });
  }
  if (c.name == "hat") {
    expect_args(c, static_cast<std::size_t>(grid.dim() + 2), e);
    auto v = number_args(c, e);
    double cx = v[0], cy = grid.dim() == 2 ? v[1] : 0.0;
    double radius = v[grid.dim()], amp = v[grid.dim() + 1];
    if (!(radius > 0.0)) fail("hat radius must be positive", e, c.column);
    return ScalarField::from_function(grid, [=](double x, double y) {
      return amp * std::max(0.0, 1.0 - std::hypot(x - cx, y - cy) / radius);
    });
  }
  if (c.name == "file") {
    expect_args(c, 1, e);
    ScalarField f = io::read_scalar_field(ctx.resolve(c.args[0]));
    if (!(f.grid() == grid)) throw ValidationError("field file grid does not match [grid]: " + c.args[0]);
    return f;
  }
  fail("unknown profile '" + c.name + "'", e, c.column);
}

ScalarField profile(Context& ctx, const std::string& text, const IniEntry& e, int offset = 0) {
  ScalarField sum(ctx.grid);
  for (auto& [term, pos] : split_top(text, '+', e)) {
    if (term.empty()) fail("empty term in sum", e, offset + pos);
    sum += profile_term(ctx, parse_call(term, offset + pos, e), e);
  }
  return sum;
}

struct VecSource {
  VectorField field;
  std::optional<double> linear_coefficient;
};

VecSource vector_source(Context& ctx, const IniEntry& e) {
  const Grid& grid = ctx.grid;
  VecSource out{VectorField(grid), std::nullopt};
  auto parts = split_top(e.value, '|', e);
  if (parts.size() == 1) {
    Call c = parse_call(parts[0].first, parts[0].second, e);
    if (c.name == "zero") {
      expect_args(c, 0, e);
      return out;
    }
    if (c.name == "linear_source") {
      expect_args(c, 1, e);
      double k = number_args(c, e)[0];
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!ctx.mask.contains(i)) continue;
        auto x = grid.node_position(i);
        for (int j = 0; j < grid.dim(); ++j) out.field.component(j)[i] = -k * x[j] / grid.dim();
      }
      out.linear_coefficient = k;
      return out;
    }
    if (c.name == "file") {
      expect_args(c, 1, e);
      out.field = io::read_vector_field(ctx.resolve(c.args[0]));
      if (!(out.field.grid() == grid)) throw ValidationError("field file grid does not match [grid]: " + c.args[0]);
      return out;
    }
  }
  if (static_cast<int>(parts.size()) != grid.dim())
    fail("f_vec needs " + std::to_string(grid.dim()) + " component profile(s) separated by '|'", e);
  for (int j = 0; j < grid.dim(); ++j) {
    ScalarField comp = profile(ctx, parts[j].first, e, parts[j].second);
    out.field.component_data(j) = comp.data();
  }
  return out;
}

Coefficients coefficients(Context& ctx, const IniEntry& e) {
  Call c = parse_call(e.value, 0, e);
  const Grid& grid = ctx.grid;
  if (c.name == "identity") {
    expect_args(c, 0, e);
    return Coefficients::identity(grid);
  }
  if (c.name == "diagonal") {
    expect_args(c, static_cast<std::size_t>(grid.dim()), e);
    auto v = number_args(c, e);
    return Coefficients::diagonal(grid, v[0], grid.dim() == 2 ? v[1] : v[0]);
  }
  if (c.name == "rotation") {
    expect_args(c, 3, e);
    if (grid.dim() != 2) fail("rotation coefficients need dim = 2", e, c.column);
    auto v = number_args(c, e);
    return Coefficients::rotation(grid, v[0], v[1], v[2]);
  }
  if (c.name == "file") {
    expect_args(c, 3, e);
    io::RawField raw = io::read_raw(ctx.resolve(c.args[0]));
    if (!(raw.grid == grid)) throw ValidationError("coefficient file grid does not match [grid]");
    if (raw.components != static_cast<std::uint32_t>(grid.dim() * grid.dim()))
      throw ValidationError("coefficient file must hold dim*dim components per node");
    double a_star = parse_number(c.args[1], e, c.column), a_upper = parse_number(c.args[2], e, c.column);
    return Coefficients(grid, raw.values, a_star, a_upper);
  }
  fail("unknown coefficients '" + c.name + "'", e, c.column);
}

std::optional<double> constant_value(const std::string& text) {
  auto t = trim(text);
  if (t.rfind("constant(", 0) != 0 || t.back() != ')') return std::nullopt;
  std::string arg = trim(t.substr(9, t.size() - 10));
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
  if (ec != std::errc() || ptr != arg.data() + arg.size()) return std::nullopt;
  return v;
}

}  // namespace

ProblemFile build_problem(const IniDocument& doc, const std::filesystem::path& base_dir) {
  Context ctx{doc, base_dir, {}, {}, {}};
  ProblemFile out;

  const IniEntry& dim_e = ctx.require("grid", "dim");
  long dim = integer_entry(dim_e);
  if (dim != 1 && dim != 2) fail("dim must be 1 or 2", dim_e);
  const IniEntry& n_e = ctx.require("grid", "n");
  long n = integer_entry(n_e);
  if (n < 16 || (n & (n - 1)) != 0) fail("n must be a power of two >= 16", n_e);
  const IniEntry& l_e = ctx.require("grid", "half_length");
  double L = number_entry(l_e);
  if (!(L > 0.0)) fail("half_length must be positive", l_e);
  ctx.grid = Grid(static_cast<int>(dim), static_cast<int>(n), L);

  const IniEntry& shape_e = ctx.require("domain", "shape");
  std::string shape = lower(shape_e.value);
  double margin = DomainMask::kDefaultMinMargin;
  if (const IniEntry* m = ctx.find("domain", "margin")) margin = number_entry(*m);
  double extent = 0.0;
  if (shape == "interval") {
    if (dim != 1) fail("interval domains need dim = 1", shape_e);
    extent = number_entry(ctx.require("domain", "half_width"));
    ctx.mask = DomainMask::interval(ctx.grid, extent, margin);
  } else if (shape == "disk") {
    if (dim != 2) fail("disk domains need dim = 2", shape_e);
    extent = number_entry(ctx.require("domain", "radius"));
    ctx.mask = DomainMask::disk(ctx.grid, extent, margin);
  } else {
    fail("unknown domain shape '" + shape_e.value + "'", shape_e);
  }

  Coefficients coeffs = coefficients(ctx, ctx.require("coefficients", "a"));

  ScalarField f_sharp(ctx.grid);
  const IniEntry* fs = ctx.find("data", "f_sharp");
  if (fs) f_sharp = profile(ctx, fs->value, *fs);
  VecSource fv{VectorField(ctx.grid), std::nullopt};
  if (const IniEntry* e = ctx.find("data", "f_vec")) fv = vector_source(ctx, *e);

  const IniEntry& g_e = ctx.require("obstacle", "g");
  ScalarField g = profile(ctx, g_e.value, g_e);
  ObstacleRegime regime = ObstacleRegime::bounded_below;
  if (const IniEntry* r = ctx.find("obstacle", "regime")) {
    std::string v = lower(r->value);
    if (v == "bounded_below") regime = ObstacleRegime::bounded_below;
    else if (v == "local_positive") regime = ObstacleRegime::local_positive;
    else fail("unknown obstacle regime '" + r->value + "'", *r);
  }

  double sigma = 1.0;
  if (const IniEntry* s = ctx.find("solver", "sigma")) {
    sigma = number_entry(*s);
    if (!(sigma > 0.0 && sigma <= 1.0)) fail("sigma must lie in (0, 1]", *s);
  }

  out.spec = ProblemSpec{ctx.grid, ctx.mask, coeffs, SourceData(f_sharp, fv.field, ctx.mask),
                         Obstacle(g, regime, ctx.mask), FracOrder(sigma)};
  out.spec.validate();

  auto num = [&](const char* key, double& target) {
    if (const IniEntry* e = ctx.find("solver", key)) target = number_entry(*e);
  };
  auto integer = [&](const char* key, int& target) {
    if (const IniEntry* e = ctx.find("solver", key)) target = static_cast<int>(integer_entry(*e));
  };
  PenaltySchedule& sch = out.schedule;
  num("eps_initial", sch.eps_initial);
  num("eps_factor", sch.factor);
  integer("levels", sch.levels);
  num("picard_tol", sch.picard_tol);
  integer("picard_max_iters", sch.picard_max_iters);
  num("damping", sch.damping);
  num("krylov_tol", sch.krylov_tol);
  integer("krylov_max_iters", sch.krylov_max_iters);
  if (const IniEntry* e = ctx.find("solver", "linearization")) {
    std::string v = lower(e->value);
    if (v == "newton") sch.linearization = Linearization::newton;
    else if (v == "picard") sch.linearization = Linearization::picard;
    else fail("linearization must be newton or picard", *e);
  }
  sch.validate();

  PrimalDualConfig& pd = out.primal_dual;
  num("pd_tol", pd.pd_tol);
  integer("pd_max_iters", pd.max_iters);
  num("pd_penalty", pd.penalty);
  num("active_tol", pd.active_tol);
  num("pd_krylov_tol", pd.krylov_tol);
  pd.krylov_max_iters = sch.krylov_max_iters;
  if (!(pd.pd_tol > 0.0) || pd.max_iters <= 0) throw ValidationError("pd_tol and pd_max_iters must be positive");

  if (const IniEntry* e = ctx.find("solver", "method")) {
    std::string v = lower(e->value);
    if (v == "penalized") out.method = SolveMethod::penalized;
    else if (v == "primal_dual") out.method = SolveMethod::primal_dual;
    else fail("method must be penalized or primal_dual", *e);
  }
  if (const IniEntry* e = ctx.find("solver", "sigma_ladder")) {
    out.sigma_ladder.clear();
    for (auto& [item, pos] : split_top(e->value, ',', *e)) {
      double s = parse_number(item, *e, pos);
      if (!(s > 0.0 && s < 1.0)) fail("sigma_ladder values must lie in (0, 1)", *e, pos);
      out.sigma_ladder.push_back(s);
    }
    if (out.sigma_ladder.size() < 4) fail("sigma_ladder needs at least 4 values", *e);
  }
  num("sigma_tol", out.sigma_tol);
  num("cross_tol", out.cross_tol);

  if (const IniEntry* e = ctx.find("solver", "reference")) {
    std::string v = lower(e->value);
    if (v == "closed_form") {
      if (!coeffs.is_identity()) fail("closed_form reference needs identity coefficients", *e);
      auto g0 = constant_value(g_e.value);
      if (!g0) fail("closed_form reference needs g = constant(c)", *e);
      std::optional<double> f0;
      if (fs && !fv.linear_coefficient) f0 = constant_value(fs->value);
      if (!fs && fv.linear_coefficient) f0 = fv.linear_coefficient;
      if (!f0) fail("closed_form reference needs f_sharp = constant(c) or f_vec = linear_source(c), not both", *e);
      LocalExactSolution sol;
      sol.kind = dim == 1 ? LocalKind::elastoplastic_1d : LocalKind::radial_torsion_2d;
      sol.f0 = *f0;
      sol.g0 = *g0;
      sol.a = extent;
      sol.validate();
      out.reference = sol;
    } else if (v != "none") {
      fail("reference must be none or closed_form", *e);
    }
  }
  out.inputs = ctx.inputs;
  return out;
}

ProblemFile parse_problem_text(const std::string& text, const std::filesystem::path& base_dir,
                               const std::vector<std::string>& overrides) {
  IniDocument doc = parse_ini(text);
  apply_overrides(doc, overrides);
  return build_problem(doc, base_dir);
}

ProblemFile parse_problem(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open problem file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_problem_text(buffer.str(), path.parent_path(), overrides);
}

}  // namespace fracvi
