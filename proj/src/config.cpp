#include "measurefit/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace measurefit {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_number(const std::string& text, int line, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    throw ConfigError(line, "key '" + key + "': expected a number, got '" +
                                t + "'");
  return v;
}

std::size_t parse_count(const std::string& text, int line,
                        const std::string& key) {
  const double v = parse_number(text, line, key);
  if (!(v > 0.0) || v != std::floor(v))
    throw ConfigError(line, "key '" + key + "': expected a positive integer");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& text, int line, const std::string& key) {
  const std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError(line, "key '" + key + "': expected true or false");
}

// Strip surrounding quotes when present; otherwise the bare trimmed text.
std::string parse_string(const std::string& text, int line) {
  std::string t = trim(text);
  if (t.size() >= 2 && t.front() == '"') {
    if (t.back() != '"')
      throw ConfigError(line, "unterminated quoted string");
    return t.substr(1, t.size() - 2);
  }
  return t;
}

// Comma-separated values; each element is a number or a start:step:end range
// (end inclusive within half a step).
std::vector<double> parse_times(const std::string& text, int line,
                                const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty())
      throw ConfigError(line, "key '" + key + "': empty list element");
    const std::size_t c1 = t.find(':');
    if (c1 == std::string::npos) {
      out.push_back(parse_number(t, line, key));
      continue;
    }
    const std::size_t c2 = t.find(':', c1 + 1);
    if (c2 == std::string::npos)
      throw ConfigError(line, "key '" + key +
                                  "': ranges are start:step:end, got '" + t +
                                  "'");
    const double start = parse_number(t.substr(0, c1), line, key);
    const double step = parse_number(t.substr(c1 + 1, c2 - c1 - 1), line, key);
    const double end = parse_number(t.substr(c2 + 1), line, key);
    if (!(step > 0.0) || end < start)
      throw ConfigError(line, "key '" + key + "': bad range '" + t + "'");
    for (std::size_t k = 0;; ++k) {
      const double v = start + static_cast<double>(k) * step;
      if (v > end + 0.5 * step) break;
      if (v <= end + 1e-12 * step) out.push_back(std::min(v, end));
    }
  }
  if (out.empty())
    throw ConfigError(line, "key '" + key + "': empty time list");
  return out;
}

bool valid_identifier(const std::string& s) {
  if (s.empty() || (!std::isalpha(static_cast<unsigned char>(s[0])) &&
                    s[0] != '_'))
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig cfg;
  std::optional<double> grid_lo, grid_hi;
  std::optional<std::size_t> grid_n;
  std::string obs_kind_str;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::string section;
  std::set<std::string> seen;  // "section.key" duplicates
  bool saw_grid_section = false;

  const std::set<std::string> known_sections = {
      "model", "grid", "constants", "observation", "fp", "fit", "output"};

  while (std::getline(in, raw)) {
    ++lineno;
    // comments start at '#' outside quotes
    bool in_quote = false;
    std::string line;
    for (char c : raw) {
      if (c == '"') in_quote = !in_quote;
      if (c == '#' && !in_quote) break;
      line += c;
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(lineno, "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_sections.contains(section))
        throw ConfigError(lineno, "unknown section [" + section + "]");
      if (section == "grid") saw_grid_section = true;
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(lineno, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = line.substr(eq + 1);
    if (key.empty()) throw ConfigError(lineno, "empty key");
    if (section.empty())
      throw ConfigError(lineno, "key '" + key + "' outside any [section]");
    if (!seen.insert(section + "." + key).second)
      throw ConfigError(lineno, "duplicate key '" + key + "' in [" + section +
                                    "]");

    if (section == "model") {
      if (key == "drift") cfg.drift_src = parse_string(value, lineno);
      else if (key == "diffusion") cfg.diffusion_src = parse_string(value, lineno);
      else if (key == "parameter") {
        cfg.parameter = parse_string(value, lineno);
        if (!valid_identifier(*cfg.parameter))
          throw ConfigError(lineno, "parameter must be an identifier");
      } else if (key == "range_lo") cfg.range_lo = parse_number(value, lineno, key);
      else if (key == "range_hi") cfg.range_hi = parse_number(value, lineno, key);
      else if (key == "theta") cfg.theta = parse_number(value, lineno, key);
      else throw ConfigError(lineno, "unknown key '" + key + "' in [model]");
    } else if (section == "grid") {
      if (key == "lo") grid_lo = parse_number(value, lineno, key);
      else if (key == "hi") grid_hi = parse_number(value, lineno, key);
      else if (key == "n") grid_n = parse_count(value, lineno, key);
      else throw ConfigError(lineno, "unknown key '" + key + "' in [grid]");
    } else if (section == "constants") {
      if (!valid_identifier(key))
        throw ConfigError(lineno, "constant name must be an identifier");
      cfg.constants[key] = parse_number(value, lineno, key);
    } else if (section == "observation") {
      if (key == "kind") obs_kind_str = parse_string(value, lineno);
      else if (key == "expression") cfg.obs_expression = parse_string(value, lineno);
      else if (key == "csv") cfg.obs_csv = parse_string(value, lineno);
      else if (key == "times") cfg.obs_times = parse_times(value, lineno, key);
      else throw ConfigError(lineno, "unknown key '" + key + "' in [observation]");
    } else if (section == "fp") {
      if (key == "x0") cfg.x0 = parse_number(value, lineno, key);
      else if (key == "dt") cfg.dt = parse_number(value, lineno, key);
      else if (key == "dt_late") cfg.dt_late = parse_number(value, lineno, key);
      else if (key == "t_switch") cfg.t_switch = parse_number(value, lineno, key);
      else if (key == "times") cfg.fp_times = parse_times(value, lineno, key);
      else throw ConfigError(lineno, "unknown key '" + key + "' in [fp]");
    } else if (section == "fit") {
      if (key == "scan_step") cfg.scan_step = parse_number(value, lineno, key);
      else if (key == "mode") cfg.fit_mode = parse_string(value, lineno);
      else throw ConfigError(lineno, "unknown key '" + key + "' in [fit]");
    } else if (section == "output") {
      if (key == "directory") cfg.output_dir = parse_string(value, lineno);
      else if (key == "emit_plots") cfg.emit_plots = parse_bool(value, lineno, key);
      else throw ConfigError(lineno, "unknown key '" + key + "' in [output]");
    }
  }

  if (saw_grid_section) {
    if (!grid_lo || !grid_hi || !grid_n)
      throw ConfigError("[grid] in " + origin +
                        " must set all of lo, hi, n");
    cfg.grid = Grid1D(*grid_lo, *grid_hi, *grid_n);
    cfg.grid_defaulted = false;
  } else {
    warn(origin + ": no [grid] section; using default lo=-40 hi=40 n=4001");
  }

  if (!obs_kind_str.empty()) {
    if (obs_kind_str == "stationary") cfg.obs_kind = RunConfig::ObsKind::Stationary;
    else if (obs_kind_str == "time_dependent")
      cfg.obs_kind = RunConfig::ObsKind::TimeDependent;
    else
      throw ConfigError("observation kind in " + origin +
                        " must be 'stationary' or 'time_dependent'");
  } else if (cfg.obs_expression || cfg.obs_csv) {
    throw ConfigError("[observation] in " + origin + " needs a 'kind'");
  }

  if (cfg.obs_expression && cfg.obs_csv)
    throw ConfigError("[observation] in " + origin +
                      " must use exactly one of 'expression' or 'csv'");

  if (cfg.fit_mode && *cfg.fit_mode != "stationary" && *cfg.fit_mode != "time")
    throw ConfigError("fit mode in " + origin +
                      " must be 'stationary' or 'time'");

  if (cfg.parameter) {
    if (!cfg.range_lo || !cfg.range_hi)
      throw ConfigError("[model] in " + origin +
                        " declares a parameter but no range_lo/range_hi");
  }

  if (!(cfg.dt > 0.0) || !(cfg.dt_late > 0.0))
    throw ConfigError("[fp] in " + origin + ": dt and dt_late must be positive");
  if (!(cfg.scan_step > 0.0))
    throw ConfigError("[fit] in " + origin + ": scan_step must be positive");

  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace measurefit
