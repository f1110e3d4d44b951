#include "dbwave/config.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dbwave {

std::string to_string(GrowthChannel channel) {
  return channel == GrowthChannel::L ? "L" : "lp_u_p";
}

GrowthChannel growth_channel_from_string(const std::string& name) {
  if (name == "L") return GrowthChannel::L;
  if (name == "lp_u_p") return GrowthChannel::lp_u_p;
  throw std::invalid_argument(fmt::format("unknown growth channel '{}'", name));
}

namespace {

const std::set<std::string>& known_fields() {
  static const std::set<std::string> fields{
      "model.alpha", "model.r", "model.p", "model.m", "model.strict_theorem_mode",
      "model.source_on",
      "mesh.n_elem", "mesh.quadrature_order",
      "initial.profile", "initial.amplitude", "initial.velocity_profile",
      "initial.velocity_amplitude",
      "time.dt", "time.t_end", "time.newton_tol", "time.newton_max_iter", "time.output_every",
      "time.blowup_guard", "time.jacobian_eta",
      "diagnostics.epsilon", "diagnostics.auto_epsilon", "diagnostics.fit_lo",
      "diagnostics.fit_hi", "diagnostics.floor_tol", "diagnostics.fit_channel",
      "thresholds.space", "thresholds.mesh_n", "thresholds.restarts", "thresholds.inject_B",
      "experiment.kind", "experiment.out_dir", "experiment.seed",
      "sweep.amplitudes", "sweep.alphas", "sweep.rs",
      "picard.k_max", "picard.tol", "picard.horizons",
      "oracle.n_modes", "oracle.generator", "oracle.ode_tol"};
  return fields;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string raw;
  int line = 0;
};

class Fields {
 public:
  explicit Fields(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  void require(const std::string& key) const {
    if (!has(key)) throw ConfigError(fmt::format("missing required field '{}'", key));
  }

  void get(const std::string& key, double& out) const {
    if (const Entry* e = find(key)) out = to_double(key, *e, e->raw);
  }

  void get(const std::string& key, int& out) const {
    if (const Entry* e = find(key)) out = static_cast<int>(to_integer(key, *e, e->raw));
  }

  void get(const std::string& key, std::uint64_t& out) const {
    if (const Entry* e = find(key)) {
      std::string_view s = e->raw;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        fail(key, *e, fmt::format("expected a nonnegative integer, got '{}'", s));
    }
  }

  void get(const std::string& key, bool& out) const {
    if (const Entry* e = find(key)) {
      if (e->raw == "true")
        out = true;
      else if (e->raw == "false")
        out = false;
      else
        fail(key, *e, "expected true or false");
    }
  }

  void get(const std::string& key, std::string& out) const {
    if (const Entry* e = find(key)) out = to_string_value(key, *e);
  }

  void get(const std::string& key, std::optional<double>& out) const {
    if (const Entry* e = find(key)) out = to_double(key, *e, e->raw);
  }

  void get(const std::string& key, std::vector<double>& out) const {
    if (const Entry* e = find(key)) {
      out.clear();
      for (const auto& item : list_items(key, *e)) out.push_back(to_double(key, *e, item));
    }
  }

  void get(const std::string& key, std::vector<int>& out) const {
    if (const Entry* e = find(key)) {
      out.clear();
      for (const auto& item : list_items(key, *e))
        out.push_back(static_cast<int>(to_integer(key, *e, item)));
    }
  }

  /// Enumerations: parse the string with `convert`, reporting its message.
  template <class T, class F>
  void get_enum(const std::string& key, T& out, F convert) const {
    if (const Entry* e = find(key)) {
      try {
        out = convert(to_string_value(key, *e));
      } catch (const std::invalid_argument& err) {
        fail(key, *e, err.what());
      }
    }
  }

 private:
  const Entry* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  [[noreturn]] static void fail(const std::string& key, const Entry& e, std::string_view what) {
    throw ConfigError(fmt::format("line {}: field '{}': {}", e.line, key, what));
  }

  static double to_double(const std::string& key, const Entry& e, std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      fail(key, e, fmt::format("expected a number, got '{}'", s));
    return v;
  }

  static long long to_integer(const std::string& key, const Entry& e, std::string_view s) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      fail(key, e, fmt::format("expected an integer, got '{}'", s));
    return v;
  }

  static std::string to_string_value(const std::string& key, const Entry& e) {
    std::string_view s = e.raw;
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return std::string(s.substr(1, s.size() - 2));
    if (s.find_first_of("\"[], ") != std::string_view::npos || s.empty())
      fail(key, e, fmt::format("expected a string, got '{}'", s));
    return std::string(s);
  }

  static std::vector<std::string> list_items(const std::string& key, const Entry& e) {
    std::string_view s = e.raw;
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') fail(key, e, "expected a [list]");
    s = trim(s.substr(1, s.size() - 2));
    std::vector<std::string> items;
    if (s.empty()) return items;
    std::size_t start = 0;
    while (true) {
      const auto comma = s.find(',', start);
      const auto item = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                              : comma - start));
      if (item.empty()) fail(key, e, "empty list item");
      items.emplace_back(item);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return items;
  }

  std::map<std::string, Entry> entries_;
};

std::map<std::string, Entry> tokenize(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    // Comments start at '#' outside a quoted string.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(fmt::format("line {}: unterminated section header", line_no));
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError(fmt::format("line {}: empty section name", line_no));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("line {}: missing key", line_no));
    if (value.empty()) throw ConfigError(fmt::format("line {}: missing value for '{}'", line_no, key));
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (!known_fields().count(full))
      throw ConfigError(fmt::format("line {}: unknown field '{}'", line_no, full));
    if (entries.count(full))
      throw ConfigError(fmt::format("line {}: duplicate field '{}' (first set on line {})", line_no, full,
                                    entries[full].line));
    entries[full] = Entry{std::string(value), line_no};
  }
  return entries;
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

RunConfig parse_config(std::string_view text) {
  const Fields f(tokenize(text));
  for (const char* key : {"model.alpha", "model.r", "model.p", "model.m"}) f.require(key);

  RunConfig c;
  f.get("model.alpha", c.model.alpha);
  f.get("model.r", c.model.r);
  f.get("model.p", c.model.p);
  f.get("model.m", c.model.m);
  f.get("model.strict_theorem_mode", c.model.strict_theorem_mode);
  f.get("model.source_on", c.model.source_on);

  f.get("mesh.n_elem", c.mesh_n);
  f.get("mesh.quadrature_order", c.quadrature_order);

  f.get_enum("initial.profile", c.displacement.kind, profile_from_string);
  f.get("initial.amplitude", c.displacement.amplitude);
  f.get_enum("initial.velocity_profile", c.velocity.kind, profile_from_string);
  f.get("initial.velocity_amplitude", c.velocity.amplitude);

  f.get("time.dt", c.time.dt);
  f.get("time.t_end", c.time.t_end);
  f.get("time.newton_tol", c.time.newton_tol);
  f.get("time.newton_max_iter", c.time.newton_max_iter);
  f.get("time.output_every", c.time.output_every);
  f.get("time.blowup_guard", c.time.blowup_guard);
  f.get("time.jacobian_eta", c.time.jacobian_eta);

  f.get("diagnostics.epsilon", c.diagnostics.aux.epsilon);
  f.get("diagnostics.auto_epsilon", c.diagnostics.aux.auto_epsilon);
  f.get("diagnostics.fit_lo", c.diagnostics.fit_lo);
  f.get("diagnostics.fit_hi", c.diagnostics.fit_hi);
  f.get("diagnostics.floor_tol", c.diagnostics.floor_tol);
  f.get_enum("diagnostics.fit_channel", c.diagnostics.fit_channel, growth_channel_from_string);

  f.get_enum("thresholds.space", c.thresholds.space, embedding_space_from_string);
  f.get("thresholds.mesh_n", c.thresholds.mesh_n);
  f.get("thresholds.restarts", c.thresholds.restarts);
  f.get("thresholds.inject_B", c.thresholds.inject_B);

  f.get("experiment.kind", c.kind);
  f.get("experiment.out_dir", c.out_dir);
  f.get("experiment.seed", c.seed);

  f.get("sweep.amplitudes", c.sweep.amplitudes);
  f.get("sweep.alphas", c.sweep.alphas);
  f.get("sweep.rs", c.sweep.rs);

  f.get("picard.k_max", c.picard.k_max);
  f.get("picard.tol", c.picard.tol);
  f.get("picard.horizons", c.picard.horizons);

  f.get("oracle.n_modes", c.oracle.n_modes);
  f.get_enum("oracle.generator", c.oracle.generator, basis_generator_from_string);
  f.get("oracle.ode_tol", c.oracle.ode_tol);

  // Range checks that the numerical modules would otherwise hit much later.
  auto check = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(fmt::format("field '{}': {}", key, what));
  };
  check(c.mesh_n >= 2, "mesh.n_elem", "needs at least 2 elements");
  check(c.time.dt > 0.0, "time.dt", "must be positive");
  check(c.time.t_end >= 0.0, "time.t_end", "must be nonnegative");
  check(c.time.newton_max_iter >= 1, "time.newton_max_iter", "must be at least 1");
  check(c.time.output_every >= 1, "time.output_every", "must be at least 1");
  check(c.diagnostics.fit_lo >= 0.0 && c.diagnostics.fit_lo < c.diagnostics.fit_hi &&
            c.diagnostics.fit_hi <= 1.0,
        "diagnostics.fit_lo", "fit window needs 0 <= fit_lo < fit_hi <= 1");
  check(c.thresholds.mesh_n >= 2, "thresholds.mesh_n", "needs at least 2 elements");
  check(c.thresholds.restarts >= 1, "thresholds.restarts", "must be at least 1");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string serialize(const RunConfig& c) {
  std::string out;
  auto section = [&](const char* name) { out += fmt::format("[{}]\n", name); };
  auto kv = [&](const char* key, const auto& value) { out += fmt::format("{} = {}\n", key, value); };
  auto list = [&](const char* key, const auto& values) {
    out += fmt::format("{} = [{}]\n", key, fmt::join(values, ", "));
  };

  section("model");
  kv("alpha", c.model.alpha);
  kv("r", c.model.r);
  kv("p", c.model.p);
  kv("m", c.model.m);
  kv("strict_theorem_mode", c.model.strict_theorem_mode);
  kv("source_on", c.model.source_on);

  section("mesh");
  kv("n_elem", c.mesh_n);
  kv("quadrature_order", c.quadrature_order);

  section("initial");
  kv("profile", quote(to_string(c.displacement.kind)));
  kv("amplitude", c.displacement.amplitude);
  kv("velocity_profile", quote(to_string(c.velocity.kind)));
  kv("velocity_amplitude", c.velocity.amplitude);

  section("time");
  kv("dt", c.time.dt);
  kv("t_end", c.time.t_end);
  kv("newton_tol", c.time.newton_tol);
  kv("newton_max_iter", c.time.newton_max_iter);
  kv("output_every", c.time.output_every);
  kv("blowup_guard", c.time.blowup_guard);
  kv("jacobian_eta", c.time.jacobian_eta);

  section("diagnostics");
  kv("epsilon", c.diagnostics.aux.epsilon);
  kv("auto_epsilon", c.diagnostics.aux.auto_epsilon);
  kv("fit_lo", c.diagnostics.fit_lo);
  kv("fit_hi", c.diagnostics.fit_hi);
  kv("floor_tol", c.diagnostics.floor_tol);
  kv("fit_channel", quote(to_string(c.diagnostics.fit_channel)));

  section("thresholds");
  kv("space", quote(to_string(c.thresholds.space)));
  kv("mesh_n", c.thresholds.mesh_n);
  kv("restarts", c.thresholds.restarts);
  if (c.thresholds.inject_B) kv("inject_B", *c.thresholds.inject_B);

  section("experiment");
  kv("kind", quote(c.kind));
  kv("out_dir", quote(c.out_dir));
  kv("seed", c.seed);

  section("sweep");
  list("amplitudes", c.sweep.amplitudes);
  list("alphas", c.sweep.alphas);
  list("rs", c.sweep.rs);

  section("picard");
  kv("k_max", c.picard.k_max);
  kv("tol", c.picard.tol);
  list("horizons", c.picard.horizons);

  section("oracle");
  list("n_modes", c.oracle.n_modes);
  kv("generator", quote(to_string(c.oracle.generator)));
  kv("ode_tol", c.oracle.ode_tol);
  return out;
}

}  // namespace dbwave
