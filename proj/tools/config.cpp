#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "geoatt/cli.hpp"
#include "geoatt/errors.hpp"

namespace geoatt::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && ws(s.front())) {
    s.remove_prefix(1);
  }
  while (!s.empty() && ws(s.back())) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) {
      return out;
    }
    s.remove_prefix(pos + 1);
  }
}

double parse_term(std::string_view t, std::string_view whole) {
  t = trim(t);
  if (t == "pi") {
    return kPi;
  }
  double v = 0.0;
  const char* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("expected a number, got '" + std::string(whole) + "'");
  }
  return v;
}

std::string fmt_vec(const Vec3& v) {
  return format_number(v.x()) + ", " + format_number(v.y()) + ", " +
         format_number(v.z());
}

std::string fmt_arr(const std::array<double, 3>& a) {
  return format_number(a[0]) + ", " + format_number(a[1]) + ", " +
         format_number(a[2]);
}

std::array<double, 3> parse_triple(std::string_view text) {
  std::string_view t = trim(text);
  if (t.size() >= 2 && ((t.front() == '(' && t.back() == ')') ||
                        (t.front() == '[' && t.back() == ']'))) {
    t = t.substr(1, t.size() - 2);
  }
  const auto parts = split(t, ',');
  if (parts.size() != 3) {
    throw ParseError("expected three comma-separated numbers, got '" +
                     std::string(text) + "'");
  }
  return {parse_number(parts[0]), parse_number(parts[1]),
          parse_number(parts[2])};
}

Vec3 parse_vec(std::string_view text) {
  const auto a = parse_triple(text);
  return {a[0], a[1], a[2]};
}

std::uint64_t parse_u64(std::string_view text) {
  const std::string_view t = trim(text);
  std::uint64_t v = 0;
  const char* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("expected a non-negative integer, got '" +
                     std::string(text) + "'");
  }
  return v;
}

int parse_int(std::string_view text) {
  const std::string_view t = trim(text);
  int v = 0;
  const char* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

// Parse-time holder for the q values, which only form a tuning together.
struct Partial {
  std::optional<double> q1, q2, q3;
};

struct Key {
  const char* section;
  const char* name;
  std::function<void(ScenarioConfig&, Partial&, std::string_view)> set;
  // Empty result: key omitted from the echo.
  std::function<std::string(const ScenarioConfig&)> get;
};

template <typename T>
Key number_key(const char* section, const char* name, T ScenarioConfig::*m) {
  return {section, name,
          [m](ScenarioConfig& c, Partial&, std::string_view v) {
            c.*m = parse_number(v);
          },
          [m](const ScenarioConfig& c) { return format_number(c.*m); }};
}

Key vec_key(const char* section, const char* name, Vec3 ScenarioConfig::*m) {
  return {section, name,
          [m](ScenarioConfig& c, Partial&, std::string_view v) {
            c.*m = parse_vec(v);
          },
          [m](const ScenarioConfig& c) { return fmt_vec(c.*m); }};
}

Key triple_key(const char* section, const char* name,
               std::array<double, 3> ScenarioConfig::*m) {
  return {section, name,
          [m](ScenarioConfig& c, Partial&, std::string_view v) {
            c.*m = parse_triple(v);
          },
          [m](const ScenarioConfig& c) { return fmt_arr(c.*m); }};
}

Key q_key(const char* name, std::optional<double> Partial::*pm,
          double ScalarTuning::*tm) {
  return {"tuning", name,
          [pm](ScenarioConfig&, Partial& p, std::string_view v) {
            p.*pm = parse_number(v);
          },
          [tm](const ScenarioConfig& c) {
            return c.tuning ? format_number((*c.tuning).*tm) : std::string();
          }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(number_key("scenario", "duration", &ScenarioConfig::duration));
    k.push_back(number_key("scenario", "dt", &ScenarioConfig::dt));
    k.push_back({"scenario", "seed",
                 [](ScenarioConfig& c, Partial&, std::string_view v) {
                   c.seed = parse_u64(v);
                 },
                 [](const ScenarioConfig& c) { return std::to_string(c.seed); }});
    k.push_back({"scenario", "n_runs",
                 [](ScenarioConfig& c, Partial&, std::string_view v) {
                   c.n_runs = parse_int(v);
                 },
                 [](const ScenarioConfig& c) {
                   return std::to_string(c.n_runs);
                 }});
    k.push_back(triple_key("scenario", "initial_euler",
                           &ScenarioConfig::initial_euler));
    k.push_back(vec_key("scenario", "beta0", &ScenarioConfig::beta0));
    k.push_back(triple_key("scenario", "estimate_euler",
                           &ScenarioConfig::estimate_euler));
    k.push_back(vec_key("scenario", "beta_hat0", &ScenarioConfig::beta_hat0));
    k.push_back(
        number_key("scenario", "sigma_omega", &ScenarioConfig::sigma_omega));
    k.push_back(
        number_key("scenario", "sigma_beta", &ScenarioConfig::sigma_beta));
    k.push_back(number_key("scenario", "sigma_eps", &ScenarioConfig::sigma_eps));
    k.push_back(
        number_key("scenario", "noise_hold", &ScenarioConfig::noise_hold));
    k.push_back(number_key("scenario", "transient_split",
                           &ScenarioConfig::transient_split));
    k.push_back(vec_key("scenario", "reference1", &ScenarioConfig::reference1));
    k.push_back(vec_key("scenario", "reference2", &ScenarioConfig::reference2));
    k.push_back(number_key("tuning", "k_p", &ScenarioConfig::k_p));
    k.push_back(number_key("tuning", "k_i", &ScenarioConfig::k_i));
    k.push_back(number_key("tuning", "p0_scale", &ScenarioConfig::p0_scale));
    k.push_back(number_key("tuning", "design_sigma_eps",
                           &ScenarioConfig::design_sigma_eps));
    k.push_back(q_key("q1", &Partial::q1, &ScalarTuning::q1));
    k.push_back(q_key("q2", &Partial::q2, &ScalarTuning::q2));
    k.push_back(q_key("q3", &Partial::q3, &ScalarTuning::q3));
    k.push_back({"tuning", "hinf_gamma",
                 [](ScenarioConfig& c, Partial&, std::string_view v) {
                   const std::string_view t = trim(v);
                   if (t.empty() || t == "off" || t == "none") {
                     c.hinf_gamma.reset();
                   } else {
                     c.hinf_gamma = parse_number(t);
                   }
                 },
                 [](const ScenarioConfig& c) {
                   return c.hinf_gamma ? format_number(*c.hinf_gamma)
                                       : std::string("off");
                 }});
    k.push_back({"filters", "enabled",
                 [](ScenarioConfig& c, Partial&, std::string_view v) {
                   std::vector<FilterKind> kinds;
                   for (std::string_view name : split(v, ',')) {
                     if (!name.empty()) {
                       kinds.push_back(filter_kind_from_string(name));
                     }
                   }
                   c.filters = std::move(kinds);
                 },
                 [](const ScenarioConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.filters.size(); ++i) {
                     out += (i ? ", " : "");
                     out += to_string(c.filters[i]);
                   }
                   return out;
                 }});
    return k;
  }();
  return table;
}

const Key* find_key(std::string_view section, std::string_view name) {
  const Key* found = nullptr;
  for (const Key& k : keys()) {
    if (name != k.name) {
      continue;
    }
    if (!section.empty()) {
      if (section == k.section) {
        return &k;
      }
      continue;
    }
    found = &k;
  }
  return found;
}

bool known_section(std::string_view s) {
  return s == "scenario" || s == "tuning" || s == "filters";
}

Partial partial_from(const ScenarioConfig& cfg) {
  Partial p;
  if (cfg.tuning) {
    p.q1 = cfg.tuning->q1;
    p.q2 = cfg.tuning->q2;
    p.q3 = cfg.tuning->q3;
  }
  return p;
}

void commit_partial(ScenarioConfig& cfg, const Partial& p,
                    const std::string& where) {
  const int given = p.q1.has_value() + p.q2.has_value() + p.q3.has_value();
  if (given == 0) {
    cfg.tuning.reset();
  } else if (given == 3) {
    cfg.tuning = ScalarTuning{*p.q1, *p.q2, *p.q3};
  } else {
    throw ValidationError(where + "q1, q2 and q3 must be given together");
  }
}

void set_value(const Key& key, ScenarioConfig& cfg, Partial& partial,
               std::string_view value, const std::string& where) {
  try {
    key.set(cfg, partial, value);
  } catch (const ValidationError& e) {
    throw ValidationError(where + "key '" + key.name + "': " + e.what());
  } catch (const Error& e) {
    throw ParseError(where + "key '" + key.name + "': " + e.what());
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
  std::string_view t = trim(text);
  double sign = 1.0;
  if (!t.empty() && t.front() == '-' && t.size() > 1 &&
      (t[1] == 'p' || t.find_first_of("*/") != std::string_view::npos)) {
    sign = -1.0;
    t.remove_prefix(1);
  }
  std::size_t start = 0;
  char op = '*';
  double acc = 1.0;
  for (std::size_t i = 0; i <= t.size(); ++i) {
    if (i == t.size() || t[i] == '*' || t[i] == '/') {
      const double term = parse_term(t.substr(start, i - start), text);
      acc = op == '*' ? acc * term : acc / term;
      if (i < t.size()) {
        op = t[i];
      }
      start = i + 1;
    }
  }
  return sign * acc;
}

Override parse_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || trim(text.substr(0, eq)).empty()) {
    throw ParseError("override '" + std::string(text) +
                     "' is not of the form key=value");
  }
  return {std::string(trim(text.substr(0, eq))),
          std::string(trim(text.substr(eq + 1)))};
}

ScenarioConfig parse_config(std::string_view text, std::string_view origin) {
  ScenarioConfig cfg;
  Partial partial;
  std::string section;
  std::set<std::string> seen;
  int line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    const std::string where =
        std::string(origin) + ":" + std::to_string(line_no) + ": ";
    std::string_view line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError(where + "unterminated section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_section(section)) {
        throw ParseError(where + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(where + "expected 'key = value'");
    }
    const std::string name(trim(line.substr(0, eq)));
    const Key* key = find_key(section, name);
    if (key == nullptr) {
      throw ValidationError(where + "unknown key '" + name + "'" +
                            (section.empty() ? "" : " in [" + section + "]"));
    }
    const std::string qualified = std::string(key->section) + "." + key->name;
    if (!seen.insert(qualified).second) {
      throw ParseError(where + "duplicate key '" + name + "'");
    }
    set_value(*key, cfg, partial, line.substr(eq + 1), where);
  }
  commit_partial(cfg, partial, std::string(origin) + ": ");
  return cfg;
}

void apply_override(ScenarioConfig& cfg, const Override& o) {
  const std::string where = "--set " + o.key + ": ";
  std::string_view section;
  std::string_view name = o.key;
  if (const auto dot = name.find('.'); dot != std::string_view::npos) {
    section = name.substr(0, dot);
    name = name.substr(dot + 1);
  }
  if (name == "filters" && section.empty()) {
    name = "enabled";
  }
  const Key* key = find_key(section, name);
  if (key == nullptr) {
    throw ValidationError(where + "unknown key");
  }
  Partial partial = partial_from(cfg);
  set_value(*key, cfg, partial, o.value, where);
  commit_partial(cfg, partial, where);
}

ScenarioConfig load_config(const std::filesystem::path& path,
                           std::span<const Override> overrides) {
  ScenarioConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw ParseError(path.string() + ": cannot open configuration file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    cfg = parse_config(buf.str(), path.string());
  }
  for (const Override& o : overrides) {
    apply_override(cfg, o);
  }
  cfg.validate();
  // Tuning problems are configuration errors, not runtime failures.
  try {
    make_filter_settings(cfg);
  } catch (const InvalidTuning& e) {
    throw ValidationError(std::string("tuning: ") + e.what());
  } catch (const SingularTuning& e) {
    throw ValidationError(std::string("tuning: ") + e.what());
  }
  return cfg;
}

std::string format_config(const ScenarioConfig& cfg) {
  std::string out = "# geoatt resolved configuration\n";
  const char* current = "";
  for (const Key& k : keys()) {
    if (std::string_view(current) != k.section) {
      current = k.section;
      out += std::string("\n[") + current + "]\n";
    }
    const std::string value = k.get(cfg);
    if (!value.empty()) {
      out += std::string(k.name) + " = " + value + "\n";
    }
    if (std::string_view(k.name) == "q3" && !cfg.tuning) {
      const TuningSelection sel = resolve_tuning(cfg);
      out += "# q1, q2, q3 derived from design_sigma_eps, k_p, k_i: " +
             format_number(sel.q.q1) + ", " + format_number(sel.q.q2) + ", " +
             format_number(sel.q.q3) + "\n";
    }
  }
  return out;
}

}  // namespace geoatt::cli
