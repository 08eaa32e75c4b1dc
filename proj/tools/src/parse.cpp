#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dynspec_cli/job.hpp"

namespace dynspec::cli {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("config: " + msg); }

// --- TOML subset -> Json ---------------------------------------------------
// Supported: comments (#), [table] headers, key = value with values being
// strings, numbers, booleans, (nested) arrays, and inline tables.

struct Cursor {
  const std::string& s;
  size_t i = 0;

  bool done() const { return i >= s.size(); }
  char peek() const { return s[i]; }
  void skip_ws() {
    while (!done() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
  }
};

Json parse_value(Cursor& c);

Json parse_array(Cursor& c) {
  Json arr = Json::array();
  ++c.i;  // '['
  c.skip_ws();
  while (!c.done() && c.peek() != ']') {
    arr.push_back(parse_value(c));
    c.skip_ws();
    if (!c.done() && c.peek() == ',') {
      ++c.i;
      c.skip_ws();
    }
  }
  if (c.done()) fail("unterminated array");
  ++c.i;
  return arr;
}

std::string parse_key(Cursor& c) {
  std::string key;
  while (!c.done() && (std::isalnum(static_cast<unsigned char>(c.peek())) || c.peek() == '_' ||
                       c.peek() == '-'))
    key += c.s[c.i++];
  if (key.empty()) fail("expected a key");
  return key;
}

Json parse_inline_table(Cursor& c) {
  Json obj = Json::object();
  ++c.i;  // '{'
  c.skip_ws();
  while (!c.done() && c.peek() != '}') {
    const std::string key = parse_key(c);
    c.skip_ws();
    if (c.done() || c.peek() != '=') fail("expected '=' in inline table");
    ++c.i;
    c.skip_ws();
    obj[key] = parse_value(c);
    c.skip_ws();
    if (!c.done() && c.peek() == ',') {
      ++c.i;
      c.skip_ws();
    }
  }
  if (c.done()) fail("unterminated inline table");
  ++c.i;
  return obj;
}

Json parse_value(Cursor& c) {
  c.skip_ws();
  if (c.done()) fail("expected a value");
  const char ch = c.peek();
  if (ch == '[') return parse_array(c);
  if (ch == '{') return parse_inline_table(c);
  if (ch == '"') {
    ++c.i;
    std::string out;
    while (!c.done() && c.peek() != '"') {
      if (c.peek() == '\\' && c.i + 1 < c.s.size()) ++c.i;
      out += c.s[c.i++];
    }
    if (c.done()) fail("unterminated string");
    ++c.i;
    return Json(out);
  }
  if (c.s.compare(c.i, 4, "true") == 0) {
    c.i += 4;
    return Json(true);
  }
  if (c.s.compare(c.i, 5, "false") == 0) {
    c.i += 5;
    return Json(false);
  }
  // number
  size_t end = c.i;
  while (end < c.s.size() && std::string("+-0123456789.eE_x").find(c.s[end]) != std::string::npos)
    ++end;
  std::string tok = c.s.substr(c.i, end - c.i);
  if (tok.empty()) fail(std::string("unexpected character '") + ch + "'");
  try {
    size_t used = 0;
    if (tok.find('.') == std::string::npos && tok.find('e') == std::string::npos &&
        tok.find('E') == std::string::npos) {
      const long long v = std::stoll(tok, &used);
      if (used != tok.size()) fail("bad number: " + tok);
      c.i = end;
      return Json(v);
    }
    const double v = std::stod(tok, &used);
    if (used != tok.size()) fail("bad number: " + tok);
    c.i = end;
    return Json(v);
  } catch (const std::logic_error&) {
    fail("bad number: " + tok);
  }
}

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

Json parse_toml_subset(const std::string& text) {
  Json root = Json::object();
  Json* current = &root;

  std::istringstream in(text);
  std::string raw, pending;
  int depth = 0;
  while (std::getline(in, raw)) {
    std::string line = strip_comment(raw);
    pending += (pending.empty() ? "" : "\n") + line;
    for (char ch : line) {
      if (ch == '[') ++depth;
      if (ch == ']') --depth;
    }
    if (depth > 0) continue;  // multi-line array continues
    std::string stmt = pending;
    pending.clear();

    Cursor c{stmt, 0};
    c.skip_ws();
    if (c.done()) continue;
    if (c.peek() == '[') {
      ++c.i;
      const std::string name = parse_key(c);
      if (c.done() || c.peek() != ']') fail("bad table header");
      ++c.i;
      c.skip_ws();
      if (!c.done()) fail("trailing characters after table header");
      current = &(root[name] = Json::object());
      continue;
    }
    const std::string key = parse_key(c);
    c.skip_ws();
    if (c.done() || c.peek() != '=') fail("expected '=' after key '" + key + "'");
    ++c.i;
    (*current)[key] = parse_value(c);
    c.skip_ws();
    if (!c.done()) fail("trailing characters after value for '" + key + "'");
  }
  if (depth != 0) fail("unbalanced brackets");
  return root;
}

// --- Json -> typed config --------------------------------------------------

void require_keys(const Json& obj, const std::string& where,
                  const std::vector<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || key == a;
    if (!ok) fail("unknown key '" + key + "' in " + where);
  }
}

double as_number(const Json& v, const std::string& what) {
  if (!v.is_number()) fail(what + " must be a number");
  return v.get<double>();
}

int as_int(const Json& v, const std::string& what) {
  if (!v.is_number_integer()) fail(what + " must be an integer");
  return v.get<int>();
}

Vec as_vec(const Json& v, const std::string& what) {
  if (!v.is_array()) fail(what + " must be an array");
  Vec out;
  for (const auto& x : v) out.push_back(as_number(x, what + " entry"));
  return out;
}

std::vector<int> as_int_vec(const Json& v, const std::string& what) {
  if (!v.is_array()) fail(what + " must be an array");
  std::vector<int> out;
  for (const auto& x : v) out.push_back(as_int(x, what + " entry"));
  return out;
}

Mat as_mat(const Json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) fail(what + " must be a non-empty array of arrays");
  const int rows = static_cast<int>(v.size());
  const Vec first = as_vec(v[0], what + " row");
  Mat out(rows, static_cast<int>(first.size()));
  for (int i = 0; i < rows; ++i) {
    const Vec row = as_vec(v[i], what + " row");
    if (static_cast<int>(row.size()) != out.cols()) fail(what + " rows have unequal lengths");
    for (int j = 0; j < out.cols(); ++j) out(i, j) = row[j];
  }
  return out;
}

SystemDescriptor parse_system(const Json& sys) {
  if (!sys.is_object()) fail("system must be a table");
  if (!sys.contains("kind")) fail("system.kind is required");
  SystemDescriptor d;
  const std::string kind = sys["kind"].get<std::string>();
  if (kind == "finite_map") {
    d.kind = SystemKind::finite_map;
    require_keys(sys, "system", {"kind", "map", "psi"});
    if (!sys.contains("map") || !sys.contains("psi")) fail("finite_map needs map and psi");
    d.map = as_int_vec(sys["map"], "system.map");
    d.psi = as_vec(sys["psi"], "system.psi");
  } else if (kind == "markov_shift") {
    d.kind = SystemKind::markov_shift;
    require_keys(sys, "system", {"kind", "adjacency", "rho"});
    if (!sys.contains("adjacency")) fail("markov_shift needs adjacency");
    d.adjacency = as_mat(sys["adjacency"], "system.adjacency");
    if (sys.contains("rho")) d.rho = as_mat(sys["rho"], "system.rho");
  } else if (kind == "measure_system") {
    d.kind = SystemKind::measure_system;
    require_keys(sys, "system", {"kind", "m", "beta", "psi", "p"});
    if (!sys.contains("m") || !sys.contains("beta") || !sys.contains("psi"))
      fail("measure_system needs m, beta, psi");
    d.m = as_vec(sys["m"], "system.m");
    d.beta = as_int_vec(sys["beta"], "system.beta");
    d.psi = as_vec(sys["psi"], "system.psi");
    if (sys.contains("p")) d.p = as_number(sys["p"], "system.p");
    if (d.p < 1.0) fail("system.p must be >= 1");
  } else {
    fail("unknown system.kind '" + kind + "'");
  }
  return d;
}

const std::vector<std::string> kCommands = {
    "eval-lambda",     "t-entropy",        "dual-entropy", "variational-check", "pressure",
    "ruelle-walters",  "latushkin-stepin", "lp-radius",    "entropy-statistic"};

bool command_uses_multistart(const std::string& cmd) {
  return cmd == "ruelle-walters" || cmd == "latushkin-stepin";
}

JobConfig from_json(const Json& root, const Overrides& overrides) {
  require_keys(root, "config",
               {"system", "command", "phi", "mu", "psi_edges", "a_edges", "p", "n_max", "radius",
                "tol", "seed", "output", "format"});
  if (!root.contains("system")) fail("system is required");
  if (!root.contains("command")) fail("command is required");

  JobConfig cfg;
  cfg.system = parse_system(root["system"]);
  cfg.command = root["command"].get<std::string>();
  bool known = false;
  for (const auto& c : kCommands) known = known || c == cfg.command;
  if (!known) fail("unknown command '" + cfg.command + "'");

  if (root.contains("phi")) cfg.phi = as_vec(root["phi"], "phi");
  if (root.contains("mu")) cfg.mu = as_vec(root["mu"], "mu");
  if (root.contains("psi_edges")) cfg.psi_edges = as_mat(root["psi_edges"], "psi_edges");
  if (root.contains("a_edges")) cfg.a_edges = as_mat(root["a_edges"], "a_edges");
  if (root.contains("p")) cfg.p = as_number(root["p"], "p");
  if (root.contains("n_max")) cfg.n_max = as_int(root["n_max"], "n_max");
  if (root.contains("radius")) cfg.radius = as_number(root["radius"], "radius");
  if (root.contains("tol")) cfg.tol = as_number(root["tol"], "tol");
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer() || root["seed"].get<long long>() < 0)
      fail("seed must be a nonnegative integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("output")) cfg.output = root["output"].get<std::string>();
  if (root.contains("format")) cfg.format = root["format"].get<std::string>();

  if (overrides.output) cfg.output = *overrides.output;
  if (overrides.format) cfg.format = *overrides.format;
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.n_max) cfg.n_max = *overrides.n_max;
  if (overrides.tol) cfg.tol = *overrides.tol;

  if (cfg.format != "json" && cfg.format != "csv") fail("format must be json or csv");
  if (cfg.p && *cfg.p < 1.0) fail("p must be >= 1");
  if (command_uses_multistart(cfg.command) && !cfg.seed)
    fail("seed is mandatory for command '" + cfg.command + "'");
  return cfg;
}

}  // namespace

JobConfig parse_config_text(const std::string& text, const Overrides& overrides) {
  size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  Json root;
  if (i < text.size() && text[i] == '{') {
    try {
      root = Json::parse(text);
    } catch (const Json::parse_error& e) {
      fail(std::string("invalid JSON: ") + e.what());
    }
  } else {
    root = parse_toml_subset(text);
  }
  return from_json(root, overrides);
}

JobConfig parse_config_file(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

}  // namespace dynspec::cli
