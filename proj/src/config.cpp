#include "maslov/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace maslov {

namespace {

std::string locate(const std::string& msg, const std::string& key, int line) {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  os << msg;
  if (!key.empty() && msg.find(key) == std::string::npos) os << " (" << key << ")";
  return os.str();
}

}  // namespace

ConfigError::ConfigError(std::string message, std::string key, int line)
    : Error(locate(message, key, line)), key_(std::move(key)), line_(line) {}

const char* to_string(Scenario s) noexcept {
  switch (s) {
    case Scenario::Index: return "index";
    case Scenario::Singularities: return "singularities";
    case Scenario::Liapunov: return "liapunov";
    case Scenario::Verify: return "verify";
  }
  return "?";
}

std::optional<Scenario> scenario_from_string(std::string_view s) {
  if (s == "index") return Scenario::Index;
  if (s == "singularities") return Scenario::Singularities;
  if (s == "liapunov") return Scenario::Liapunov;
  if (s == "verify") return Scenario::Verify;
  return std::nullopt;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

// section -> key -> entry, in file order for error reporting.
class Document {
 public:
  explicit Document(std::string_view text) {
    static const std::set<std::string> sections{"run",  "system",   "parameters", "curve",      "disk",
                                                "singularities", "liapunov", "verify", "tolerances", "output"};
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = raw;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError("malformed section header '" + line + "'", {}, line_no);
        section = trim(std::string_view(line).substr(1, line.size() - 2));
        if (!sections.count(section)) throw ConfigError("unknown section '" + section + "'", section, line_no);
        if (seen_.count(section)) throw ConfigError("section '" + section + "' appears twice", section, line_no);
        seen_.insert(section);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("expected key = value, got '" + line + "'", {}, line_no);
      const std::string key = trim(std::string_view(line).substr(0, eq));
      const std::string value = trim(std::string_view(line).substr(eq + 1));
      if (key.empty()) throw ConfigError("empty key", {}, line_no);
      const std::string sec = section.empty() ? "run" : section;
      const std::string full = sec + "." + key;
      auto& table = data_[sec];
      if (table.count(key)) throw ConfigError("duplicate key '" + full + "'", full, line_no);
      table[key] = Entry{value, line_no, false};
      order_.emplace_back(sec, key);
    }
  }

  bool has_section(const std::string& s) const { return seen_.count(s) || data_.count(s); }

  Entry* find(const std::string& sec, const std::string& key) {
    auto s = data_.find(sec);
    if (s == data_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }

  std::map<std::string, Entry>* section(const std::string& sec) {
    auto s = data_.find(sec);
    return s == data_.end() ? nullptr : &s->second;
  }

  void reject_unused() const {
    for (const auto& [sec, key] : order_) {
      const Entry& e = data_.at(sec).at(key);
      if (!e.used) throw ConfigError("unknown key '" + sec + "." + key + "'", sec + "." + key, e.line);
    }
  }

 private:
  std::map<std::string, std::map<std::string, Entry>> data_;
  std::vector<std::pair<std::string, std::string>> order_;
  std::set<std::string> seen_;
};

class Reader {
 public:
  explicit Reader(Document& doc) : doc_(doc) {}

  std::optional<std::string> text(const std::string& sec, const std::string& key) {
    const Entry* e = doc_.find(sec, key);
    if (!e) return std::nullopt;
    last_line_ = e->line;
    last_key_ = sec + "." + key;
    return e->value;
  }

  double parse_number(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
      fail("expected a number for '" + last_key_ + "', got '" + s + "'");
    return v;
  }

  std::optional<double> number(const std::string& sec, const std::string& key) {
    auto t = text(sec, key);
    if (!t) return std::nullopt;
    return parse_number(*t);
  }

  std::optional<double> positive(const std::string& sec, const std::string& key) {
    auto v = number(sec, key);
    if (v && !(*v > 0)) fail("'" + last_key_ + "' must be positive");
    return v;
  }

  std::optional<int> integer(const std::string& sec, const std::string& key, int min_value) {
    auto t = text(sec, key);
    if (!t) return std::nullopt;
    int v = 0;
    const auto res = std::from_chars(t->data(), t->data() + t->size(), v);
    if (res.ec != std::errc() || res.ptr != t->data() + t->size())
      fail("expected an integer for '" + last_key_ + "', got '" + *t + "'");
    if (v < min_value) fail("'" + last_key_ + "' must be at least " + std::to_string(min_value));
    return v;
  }

  std::optional<bool> boolean(const std::string& sec, const std::string& key) {
    auto t = text(sec, key);
    if (!t) return std::nullopt;
    if (*t == "true" || *t == "yes" || *t == "1") return true;
    if (*t == "false" || *t == "no" || *t == "0") return false;
    fail("expected true or false for '" + last_key_ + "', got '" + *t + "'");
  }

  Vector parse_vector(const std::string& s) {
    std::vector<double> values;
    std::size_t start = 0;
    while (true) {
      const auto comma = s.find(',', start);
      const std::string item = trim(std::string_view(s).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (item.empty()) fail("empty component in vector '" + last_key_ + "'");
      values.push_back(parse_number(item));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  }

  std::optional<Vector> vector(const std::string& sec, const std::string& key) {
    auto t = text(sec, key);
    if (!t) return std::nullopt;
    return parse_vector(*t);
  }

  std::vector<Vector> vector_list(const std::string& sec, const std::string& key) {
    auto t = text(sec, key);
    std::vector<Vector> out;
    if (!t) return out;
    std::size_t start = 0;
    while (true) {
      const auto semi = t->find(';', start);
      const std::string item = trim(std::string_view(*t).substr(start, semi == std::string::npos ? std::string::npos : semi - start));
      if (!item.empty()) out.push_back(parse_vector(item));
      if (semi == std::string::npos) break;
      start = semi + 1;
    }
    if (out.empty()) fail("'" + last_key_ + "' lists no points");
    return out;
  }

  [[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg, last_key_, last_line_); }

  int last_line() const { return last_line_; }
  const std::string& last_key() const { return last_key_; }

 private:
  Document& doc_;
  int last_line_ = 0;
  std::string last_key_;
};

void read_system(Reader& r, Document& doc, RunConfig& cfg) {
  SystemSpec& s = cfg.system;
  const auto builtin = r.text("system", "builtin");
  const int builtin_line = r.last_line();
  if (builtin) {
    static const std::set<std::string> names{"harmonic",    "saddle",           "cubic",           "double_well",
                                             "bifurcation", "product_hyperbolic", "product_elliptic", "rotational"};
    if (!names.count(*builtin)) r.fail("unknown builtin system '" + *builtin + "'");
    s.builtin = *builtin;
    // Parameters each builtin understands; anything else stays unused and is rejected.
    std::vector<std::string> keys;
    if (s.builtin == "cubic") keys = {"a"};
    if (s.builtin == "bifurcation") keys = {"eps"};
    if (s.builtin == "product_hyperbolic" || s.builtin == "product_elliptic") keys = {"w1", "w2"};
    for (const auto& k : keys)
      if (auto v = r.number("system", k)) s.builtin_params[k] = *v;
    if (s.builtin == "rotational") {
      if (auto n = r.integer("system", "n", 3)) s.builtin_params["n"] = *n;
      else s.builtin_params["n"] = 3;
      s.h_source = r.text("system", "h").value_or("(p2 + r2)/2");
    }
  } else {
    const auto n = r.integer("system", "freedoms", 1);
    if (!n) throw ConfigError("[system] needs either 'builtin' or 'freedoms' with field1..fieldN", "system.builtin", builtin_line);
    s.freedoms = *n;
    for (int k = 1; k <= s.freedoms; ++k) {
      const auto f = r.text("system", "field" + std::to_string(k));
      if (!f) throw ConfigError("missing 'system.field" + std::to_string(k) + "'", "system.field" + std::to_string(k), 0);
      s.fields.push_back(*f);
    }
    if (auto w = r.vector("system", "weights")) {
      if (w->size() != s.freedoms) r.fail("'system.weights' needs one entry per field");
      s.weights = *w;
    }
  }
  if (auto d = r.text("system", "differentiation")) {
    if (*d == "forward") s.differentiation = Differentiation::Forward;
    else if (*d == "finite_difference") s.differentiation = Differentiation::FiniteDifference;
    else r.fail("differentiation must be 'forward' or 'finite_difference'");
  }
  if (auto b = r.boolean("system", "verify_involution")) s.options.verify_involution = *b;
  if (auto k = r.integer("system", "involution_samples", 1)) s.options.involution_samples = static_cast<std::size_t>(*k);
  if (auto t = r.positive("system", "involution_tol")) s.options.involution_tol = *t;
  if (auto h = r.positive("system", "box_half_width")) s.options.box_half_width = *h;
  if (auto c = r.vector("system", "box_center")) s.options.box_center = *c;

  if (auto* params = doc.section("parameters")) {
    for (auto& [key, entry] : *params) {
      r.text("parameters", key);
      const bool ident = !key.empty() && (std::isalpha(static_cast<unsigned char>(key[0])) || key[0] == '_') &&
                         std::all_of(key.begin(), key.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
      if (!ident) r.fail("parameter name '" + key + "' is not an identifier");
      s.params[key] = r.parse_number(entry.value);
    }
  }
}

void read_curve(Reader& r, Document& doc, RunConfig& cfg) {
  if (!doc.has_section("curve")) return;
  CurveSpec c;
  const std::string kind = r.text("curve", "kind").value_or("circle");
  if (kind == "circle") {
    c.kind = CurveSpec::Kind::Circle;
    auto center = r.vector("curve", "center");
    auto u = r.vector("curve", "u");
    auto v = r.vector("curve", "v");
    if (!center || !u || !v) throw ConfigError("a circle curve needs center, u and v", "curve.center", 0);
    if (center->size() != u->size() || center->size() != v->size())
      throw ConfigError("curve center, u and v differ in length", "curve.u", r.last_line());
    c.center = *center;
    c.u = *u;
    c.v = *v;
    if (auto rad = r.positive("curve", "radius")) c.radius = *rad;
  } else if (kind == "action") {
    c.kind = CurveSpec::Kind::Action;
    const auto which = r.text("curve", "action");
    if (!which) throw ConfigError("an action curve needs 'curve.action' (L12 or Lm)", "curve.action", 0);
    if (*which == "L12") {
      c.action = RotationalAction::L12;
    } else if (which->size() > 1 && (*which)[0] == 'L') {
      c.action = RotationalAction::Lm;
      int m = 0;
      const auto res = std::from_chars(which->data() + 1, which->data() + which->size(), m);
      if (res.ec != std::errc() || res.ptr != which->data() + which->size() || m < 3) r.fail("action must be L12 or L3, L4, ...");
      c.m = m;
    } else {
      r.fail("action must be L12 or L3, L4, ...");
    }
    auto point = r.vector("curve", "point");
    if (point) c.point = *point;
  } else {
    r.fail("curve kind must be 'circle' or 'action'");
  }
  if (auto rev = r.boolean("curve", "reverse")) c.reverse = *rev;
  cfg.curve = c;
}

void read_rest(Reader& r, RunConfig& cfg) {
  if (auto d = r.boolean("disk", "enabled")) cfg.disk = *d;
  if (auto g = r.integer("disk", "grid", 2)) cfg.disk_grid = *g;

  SingularitiesSpec& s = cfg.singularities;
  s.seeds = r.vector_list("singularities", "seeds");
  if (auto l = r.boolean("singularities", "locate")) s.locate = *l;
  if (auto u = r.vector("singularities", "u")) s.u = *u;
  if (auto v = r.vector("singularities", "v")) s.v = *v;
  if ((s.u.size() == 0) != (s.v.size() == 0)) throw ConfigError("give both singularities.u and singularities.v or neither", "singularities.u", r.last_line());
  if (auto e = r.positive("singularities", "epsilon")) s.epsilon = *e;

  LiapunovSpec& l = cfg.liapunov;
  if (auto p = r.vector("liapunov", "point")) cfg.liapunov_point = *p;
  if (auto t = r.positive("liapunov", "T")) l.direct_T = *t;
  if (auto t = r.positive("liapunov", "renorm_dt")) l.renorm_dt = *t;
  if (auto t = r.number("liapunov", "transient")) l.transient = *t;
  if (auto t = r.positive("liapunov", "window")) l.average.window = *t;
  if (auto k = r.integer("liapunov", "min_windows", 1)) l.average.min_windows = *k;
  if (auto k = r.integer("liapunov", "max_windows", 1)) l.average.max_windows = *k;
  if (auto t = r.positive("liapunov", "avg_tol")) l.average.avg_tol = *t;
  if (auto w = r.vector("liapunov", "weights")) l.average.weights = *w;
  if (auto t = r.positive("liapunov", "cross_tol")) l.cross_tol = *t;
  if (auto t = r.positive("liapunov", "elliptic_tol")) l.elliptic_tol = *t;
  if (l.average.max_windows < l.average.min_windows)
    throw ConfigError("liapunov.max_windows is below liapunov.min_windows", "liapunov.max_windows", r.last_line());

  if (auto suite = r.text("verify", "suite")) {
    if (*suite != "system" && *suite != "reference") r.fail("verify suite must be 'system' or 'reference'");
    cfg.verify_suite = *suite;
  }

  if (auto k = r.integer("tolerances", "initial_samples", 8)) cfg.maslov.initial_samples = *k;
  if (auto k = r.integer("tolerances", "max_depth", 0)) cfg.maslov.max_depth = *k;
  if (auto t = r.positive("tolerances", "proximity_rel")) cfg.maslov.proximity_rel = *t;
  if (auto t = r.positive("tolerances", "residual_tol")) cfg.maslov.residual_tol = *t;
  if (auto t = r.positive("tolerances", "closure_rel")) cfg.maslov.closure_rel = *t;
  if (auto t = r.positive("tolerances", "tol_det")) cfg.locate.tol_det = *t;
  if (auto k = r.integer("tolerances", "max_iter", 1)) cfg.locate.max_iter = *k;
  if (auto t = r.positive("tolerances", "abs_tol")) cfg.flow.abs_tol = *t;
  if (auto t = r.positive("tolerances", "rel_tol")) cfg.flow.rel_tol = *t;
  if (auto t = r.positive("tolerances", "max_dt")) cfg.flow.max_dt = *t;
  if (auto t = r.positive("tolerances", "drift_tol")) cfg.flow.drift_tol = *t;
  if (auto t = r.positive("tolerances", "sympl_tol")) cfg.flow.sympl_tol = *t;
  cfg.liapunov.average.flow = cfg.flow;

  for (auto [key, target] : {std::pair{"json", &cfg.json_name}, std::pair{"csv", &cfg.csv_name}}) {
    if (auto name = r.text("output", key)) {
      if (name->empty() || name->find('/') != std::string::npos || *name == "." || *name == "..")
        r.fail("output file names must be plain names inside the output directory");
      *target = *name;
    }
  }
}

}  // namespace

RunConfig parse_config_text(std::string_view text, const std::string& origin) {
  Document doc(text);
  Reader r(doc);
  RunConfig cfg;
  cfg.path = origin;
  if (auto sc = r.text("run", "scenario")) {
    const auto parsed = scenario_from_string(*sc);
    if (!parsed) r.fail("unknown scenario '" + *sc + "'");
    cfg.scenario = *parsed;
    cfg.scenario_in_file = true;
  }
  if (!doc.has_section("system") && !doc.section("system")) {
    cfg.verify_suite = "reference";
  } else {
    read_system(r, doc, cfg);
  }
  read_curve(r, doc, cfg);
  read_rest(r, cfg);
  doc.reject_unused();
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace maslov
