#include "pdm/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pdm::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

double to_real(const std::string& key, const std::string& text) {
  double v = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || !std::isfinite(v)) {
    throw ConfigError(key, "key '" + key + "': expected a real number, got '" + text + "'");
  }
  return v;
}

long to_int(const std::string& key, const std::string& text) {
  long v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw ConfigError(key, "key '" + key + "': expected an integer, got '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = lower(text);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ConfigError(key, "key '" + key + "': expected true or false, got '" + text + "'");
}

InterpolationPair to_pair(const std::string& key, const std::string& text) {
  const std::string t = lower(text);
  if (t == "constvsbd") return InterpolationPair::ConstVsBD;
  if (t == "bdvslk") return InterpolationPair::BDvsLK;
  if (t == "lkvsgw") return InterpolationPair::LKvsGW;
  throw ConfigError(key, "key '" + key + "': unknown pair '" + text + "' (ConstVsBD, BDvsLK, LKvsGW)");
}

NamedAmbiguity to_ambiguity(const std::string& key, const std::string& text) {
  const std::string t = lower(text);
  if (t == "bd") return {"BD", AmbiguitySet<double>::bd()};
  if (t == "lk") return {"LK", AmbiguitySet<double>::lk()};
  if (t == "gw") return {"GW", AmbiguitySet<double>::gw()};
  if (text.size() >= 2 && text.front() == '(' && text.back() == ')') {
    std::istringstream in(text.substr(1, text.size() - 2));
    std::vector<double> v;
    std::string tok;
    while (in >> tok) v.push_back(to_real(key, tok));
    if (v.size() != 3) throw ConfigError(key, "key '" + key + "': a triple needs three numbers: " + text);
    try {
      AmbiguitySet<double> a(v[0], v[1], v[2]);
      const std::string preset = a.preset_name();
      return {preset.empty() ? "custom" : preset, a};
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, "key '" + key + "': " + e.what());
    }
  }
  throw ConfigError(key, "key '" + key + "': unknown ambiguity '" + text + "'");
}

Level to_level(const std::string& key, const std::string& text, GridKind kind) {
  const auto colon = text.find(':');
  if (kind == GridKind::Line) {
    if (colon != std::string::npos) throw ConfigError(key, "key '" + key + "': line levels are node counts");
    const long n = to_int(key, text);
    if (n < 0) throw ConfigError(key, "key '" + key + "': level must be non-negative");
    return {int(n), 0};
  }
  if (colon == std::string::npos) throw ConfigError(key, "key '" + key + "': radial levels are written n:l");
  const long n = to_int(key, trim(text.substr(0, colon)));
  const long l = to_int(key, trim(text.substr(colon + 1)));
  if (l < 0 || n < l + 1) throw ConfigError(key, "key '" + key + "': need 0 <= l <= n - 1 in '" + text + "'");
  return {int(n), int(l)};
}

class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  std::optional<std::string> get(const std::string& key) {
    used_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return it->second;
  }
  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError(key, "missing key '" + key + "'");
    return *v;
  }
  double real(const std::string& key, double fallback) {
    auto v = get(key);
    return v ? to_real(key, *v) : fallback;
  }
  double require_real(const std::string& key) { return to_real(key, require(key)); }

  void reject_unused() const {
    for (const auto& [k, v] : kv_) {
      if (!used_.count(k)) throw ConfigError(k, "unknown key '" + k + "'");
    }
  }

 private:
  const KeyValues& kv_;
  std::set<std::string> used_;
};

}  // namespace

std::vector<double> SweepSpec::values() const {
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> v;
  for (long i = 0; i < count; ++i) v.push_back(start + double(i) * step);
  return v;
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(number) + ": empty key");
    if (!kv.emplace(key, value).second) throw ConfigError(key, "duplicate key '" + key + "'");
  }
  return kv;
}

Config build_config(const KeyValues& kv) {
  Reader r(kv);
  Config c;

  const std::string problem = lower(r.require("problem"));
  if (problem == "line") {
    c.kind = GridKind::Line;
  } else if (problem == "radial") {
    c.kind = GridKind::Radial;
  } else {
    throw ConfigError("problem", "key 'problem': expected line or radial, got '" + problem + "'");
  }

  {
    const std::string family = lower(r.require("mass.family"));
    try {
      if (family == "constant") {
        c.mass = MassProfile<double>::constant(r.real("mass.m0", 1));
      } else if (family == "coulomb_deformed") {
        c.mass = MassProfile<double>::coulomb_deformed(r.real("mass.m0", 1), r.require_real("mass.kappa"));
      } else if (family == "quadratic_well") {
        c.mass = MassProfile<double>::quadratic_well(r.real("mass.m0", 1), r.require_real("mass.kappa"));
      } else {
        throw ConfigError("mass.family", "key 'mass.family': unknown family '" + family + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError("mass", e.what());
    }
    if (family == "constant") r.get("mass.kappa");
  }

  {
    const std::string family = lower(r.require("potential.family"));
    if (family == "coulomb") {
      c.potential = PotentialProfile<double>::coulomb(r.real("potential.Z", 1), r.real("potential.e", 1));
    } else if (family == "harmonic") {
      c.potential = PotentialProfile<double>::harmonic(r.real("potential.m0", 1), r.real("potential.omega", 1));
    } else {
      throw ConfigError("potential.family", "key 'potential.family': unknown family '" + family + "'");
    }
    if (family == "coulomb" && c.kind == GridKind::Line) {
      throw ConfigError("potential.family", "key 'potential.family': coulomb needs problem = radial");
    }
  }

  for (const auto& item : split_list(r.get("ambiguity").value_or("BD, LK, GW"))) {
    c.ambiguities.push_back(to_ambiguity("ambiguity", item));
  }
  if (c.ambiguities.empty()) throw ConfigError("ambiguity", "key 'ambiguity': empty list");

  for (const auto& item : split_list(r.require("levels"))) c.levels.push_back(to_level("levels", item, c.kind));
  if (c.levels.empty()) throw ConfigError("levels", "key 'levels': at least one level is required");

  if (auto v = r.get("grid.box")) {
    c.box = to_real("grid.box", *v);
    if (!(*c.box > 0)) throw ConfigError("grid.box", "key 'grid.box': must be positive");
  }
  if (auto n = r.get("grid.n")) {
    c.grid_n = to_int("grid.n", *n);
    if (*c.grid_n < 3) throw ConfigError("grid.n", "key 'grid.n': need at least 3 interior points");
  }

  if (auto v = r.get("solve.converge")) c.converge = to_bool("solve.converge", *v);
  c.convergence.rel_tol = r.real("solve.rel_tol", c.convergence.rel_tol);
  c.convergence.bisection_tol = r.real("solve.tol", c.convergence.bisection_tol);
  if (auto v = r.get("solve.max_box_doublings")) {
    c.convergence.max_box_doublings = int(to_int("solve.max_box_doublings", *v));
  }
  if (!(c.convergence.rel_tol > 0)) throw ConfigError("solve.rel_tol", "key 'solve.rel_tol': must be positive");
  if (!(c.convergence.bisection_tol > 0)) throw ConfigError("solve.tol", "key 'solve.tol': must be positive");
  if (c.convergence.max_box_doublings < 1) {
    throw ConfigError("solve.max_box_doublings", "key 'solve.max_box_doublings': must be at least 1");
  }

  if (auto p = r.get("sweep.parameter")) {
    SweepSpec s;
    s.parameter = *p;
    static const std::set<std::string> known = {"kappa", "omega", "Z", "a"};
    if (!known.count(s.parameter)) {
      throw ConfigError("sweep.parameter", "key 'sweep.parameter': expected kappa, omega, Z or a");
    }
    s.start = r.require_real("sweep.start");
    s.stop = r.require_real("sweep.stop");
    s.step = r.require_real("sweep.step");
    if (!(s.step > 0)) throw ConfigError("sweep.step", "key 'sweep.step': must be positive");
    if (s.stop < s.start) throw ConfigError("sweep.stop", "key 'sweep.stop': must not be below sweep.start");
    if (auto pair = r.get("sweep.pair")) s.pair = to_pair("sweep.pair", *pair);
    if (s.parameter == "a" && (s.start < 0 || s.stop > 1)) {
      throw ConfigError("sweep.start", "key 'sweep.start': a must stay inside [0, 1]");
    }
    c.sweep = s;
  } else {
    for (const char* k : {"sweep.start", "sweep.stop", "sweep.step", "sweep.pair"}) {
      if (kv.count(k)) throw ConfigError(k, std::string("key '") + k + "' needs sweep.parameter");
    }
  }

  if (auto v = r.get("verify.reference_mass")) c.verify.reference_mass = to_real("verify.reference_mass", *v);
  if (auto v = r.get("verify.assume_mass")) {
    const std::string t = lower(*v);
    if (t == "below") {
      c.verify.assume_mass = MassOrderingTag::EverywhereBelowM0;
    } else if (t == "above") {
      c.verify.assume_mass = MassOrderingTag::EverywhereAboveM0;
    } else if (t == "mixed") {
      c.verify.assume_mass = MassOrderingTag::Mixed;
    } else {
      throw ConfigError("verify.assume_mass", "key 'verify.assume_mass': expected below, above or mixed");
    }
  }
  if (auto v = r.get("verify.assume_laplacian")) {
    const std::string t = lower(*v);
    if (t == "negative") {
      c.verify.assume_laplacian = LaplacianSignTag::EverywhereNegative;
    } else if (t == "positive") {
      c.verify.assume_laplacian = LaplacianSignTag::EverywherePositive;
    } else if (t == "indefinite") {
      c.verify.assume_laplacian = LaplacianSignTag::Indefinite;
    } else {
      throw ConfigError("verify.assume_laplacian",
                        "key 'verify.assume_laplacian': expected negative, positive or indefinite");
    }
  }
  for (const auto& item : split_list(r.get("verify.hf.pairs").value_or("ConstVsBD, BDvsLK, LKvsGW"))) {
    if (lower(item) == "none") continue;
    c.verify.hf.pairs.push_back(to_pair("verify.hf.pairs", item));
  }
  for (const auto& item : split_list(r.get("verify.hf.a").value_or("0.5"))) {
    const double a = to_real("verify.hf.a", item);
    if (!(a > 0 && a < 1)) throw ConfigError("verify.hf.a", "key 'verify.hf.a': values must lie in (0, 1)");
    c.verify.hf.a_values.push_back(a);
  }
  c.verify.hf.delta = r.real("verify.hf.delta", 1e-3);
  if (!(c.verify.hf.delta > 0)) throw ConfigError("verify.hf.delta", "key 'verify.hf.delta': must be positive");
  if (auto v = r.get("verify.hf.level")) c.verify.hf.level = to_level("verify.hf.level", *v, c.kind);

  c.output = r.get("output").value_or("");
  r.reject_unused();
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open '" + path + "'");
  return build_config(parse_key_values(in));
}

double Config::default_box() const {
  if (kind == GridKind::Line) {
    const bool harmonic = potential.family() == PotentialProfile<double>::Family::Harmonic;
    return 10 * std::max(1.0, harmonic ? 1 / std::sqrt(potential.omega()) : 1.0);
  }
  int n = 1;
  for (const Level& l : levels) n = std::max(n, l.n);
  const bool coulomb = potential.family() == PotentialProfile<double>::Family::Coulomb;
  const double z = coulomb && potential.charge() > 0 ? potential.charge() : 1.0;
  return 40 * n * n / z;
}

Grid<double> Config::base_grid() const {
  const double b = box.value_or(default_box());
  const double span = kind == GridKind::Line ? 2 * b : b;
  const double h = kind == GridKind::Line ? 0.02 : 0.04;
  const Eigen::Index n = grid_n.value_or(std::max<Eigen::Index>(3, Eigen::Index(std::lround(span / h)) - 1));
  if (kind == GridKind::Line) return Grid<double>(kind, -b, b, n);
  return Grid<double>(kind, 0.0, b, n);
}

Channel Config::channel(const Level& level) const {
  return kind == GridKind::Line ? Channel::line() : Channel::radial(level.l);
}

Problem<double> Config::problem(const Level& level, const AmbiguitySet<double>& amb) const {
  return {channel(level), mass, potential, amb};
}

Scenario<double> Config::scenario() const {
  Scenario<double> s{kind, mass, potential, verify.reference_mass.value_or(mass.m0()), levels, base_grid(),
                     convergence, verify.assume_mass, verify.assume_laplacian};
  if (!converge) {
    s.convergence.max_box_doublings = 0;
    s.convergence.extrapolate_grid = false;
  }
  return s;
}

bool Config::exactly_solvable() const {
  return kind == GridKind::Radial && mass.family() == MassProfile<double>::Family::CoulombDeformed &&
         potential.family() == PotentialProfile<double>::Family::Coulomb;
}

Config with_parameter(const Config& c, const std::string& name, double value) {
  Config out = c;
  try {
    if (name == "kappa") {
      using F = MassProfile<double>::Family;
      if (c.mass.family() == F::CoulombDeformed) {
        out.mass = MassProfile<double>::coulomb_deformed(c.mass.m0(), value);
      } else if (c.mass.family() == F::QuadraticWell) {
        out.mass = MassProfile<double>::quadratic_well(c.mass.m0(), value);
      } else {
        throw ConfigError("sweep.parameter", "key 'sweep.parameter': kappa sweep needs a deformed mass family");
      }
    } else if (name == "omega") {
      if (c.potential.family() != PotentialProfile<double>::Family::Harmonic) {
        throw ConfigError("sweep.parameter", "key 'sweep.parameter': omega sweep needs a harmonic potential");
      }
      out.potential = PotentialProfile<double>::harmonic(c.potential.mass(), value);
    } else if (name == "Z") {
      if (c.potential.family() != PotentialProfile<double>::Family::Coulomb) {
        throw ConfigError("sweep.parameter", "key 'sweep.parameter': Z sweep needs a Coulomb potential");
      }
      out.potential = PotentialProfile<double>::coulomb(value, c.potential.coupling());
    } else {
      throw ConfigError("sweep.parameter", "key 'sweep.parameter': cannot substitute '" + name + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("sweep", std::string("sweep value rejected: ") + e.what());
  }
  return out;
}

}  // namespace pdm::cli
