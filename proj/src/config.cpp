#include "zdsec/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "zdsec/rng.hpp"

namespace zdsec {

StageGame expand_mtd(const MtdParams& p) {
  if (!(p.theta >= 0.0 && p.theta <= 1.0))
    throw InputDomainError("mtd theta outside [0,1]");
  const auto r_d = [&](int s) { return p.d1[s] * p.theta + p.d0[s]; };
  const auto r_a = [&](int s) { return p.a1[s] * p.theta + p.a0[s]; };
  const double move_cost[2] = {p.y2 / 2.0, p.y1 / 2.0};  // defending 1 / 2
  const double strike_cost[2] = {p.c1, p.c2};
  StageGame g;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const int s = i * 2 + j;
      g.u_d[i][j] = r_d(s) - move_cost[i];
      g.u_a[i][j] = r_a(s) - strike_cost[j];
    }
  }
  return g;
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
  int col = 0;
};

struct ParsedFile {
  std::string path;
  std::map<std::string, std::map<std::string, Entry>> sections;

  [[noreturn]] void fail(int line, int col, const std::string& msg) const {
    throw ConfigError(path + ":" + std::to_string(line) + ":" +
                      std::to_string(col) + ": " + msg);
  }

  bool has_section(const std::string& s) const { return sections.count(s); }

  const Entry& need(const std::string& sec, const std::string& key) const {
    auto si = sections.find(sec);
    if (si == sections.end())
      throw ConfigError(path + ": missing section [" + sec + "]");
    auto ki = si->second.find(key);
    if (ki == si->second.end())
      throw ConfigError(path + ": missing field '" + key + "' in section [" +
                        sec + "]");
    return ki->second;
  }

  const Entry* find(const std::string& sec, const std::string& key) const {
    auto si = sections.find(sec);
    if (si == sections.end()) return nullptr;
    auto ki = si->second.find(key);
    return ki == si->second.end() ? nullptr : &ki->second;
  }

  double as_double(const std::string& sec, const std::string& key) const {
    const Entry& e = need(sec, key);
    return to_double(e);
  }

  double to_double(const Entry& e) const {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(e.value, &pos);
    } catch (...) {
      fail(e.line, e.col, "expected a number, got '" + e.value + "'");
    }
    if (pos != e.value.size())
      fail(e.line, e.col, "trailing characters after number: '" + e.value + "'");
    return v;
  }

  std::vector<double> to_vector(const Entry& e) const {
    std::vector<double> out;
    std::istringstream is(e.value);
    std::string tok;
    while (is >> tok) {
      std::size_t pos = 0;
      try {
        out.push_back(std::stod(tok, &pos));
      } catch (...) {
        pos = 0;
      }
      if (pos != tok.size())
        fail(e.line, e.col, "expected a number, got '" + tok + "'");
    }
    return out;
  }

  Vec4 as_vec4(const std::string& sec, const std::string& key) const {
    const Entry& e = need(sec, key);
    const std::vector<double> v = to_vector(e);
    if (v.size() != 4)
      fail(e.line, e.col,
           "'" + key + "' needs 4 entries (states 11 12 21 22), got " +
               std::to_string(v.size()));
    return {v[0], v[1], v[2], v[3]};
  }

  std::array<std::array<double, 2>, 2> as_mat2(const std::string& sec,
                                               const std::string& key) const {
    const Entry& e = need(sec, key);
    std::array<std::array<double, 2>, 2> m{};
    std::string rows = e.value;
    const std::size_t semi = rows.find(';');
    if (semi == std::string::npos)
      fail(e.line, e.col, "'" + key + "' needs two rows separated by ';'");
    Entry r1{rows.substr(0, semi), e.line, e.col};
    Entry r2{rows.substr(semi + 1), e.line, e.col};
    const std::vector<double> v1 = to_vector(r1);
    const std::vector<double> v2 = to_vector(r2);
    if (v1.size() != 2 || v2.size() != 2)
      fail(e.line, e.col, "'" + key + "' rows need 2 entries each");
    m[0] = {v1[0], v1[1]};
    m[1] = {v2[0], v2[1]};
    return m;
  }
};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

ParsedFile parse_ini(const std::string& text, const std::string& path) {
  ParsedFile f;
  f.path = path;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        f.fail(line_no, static_cast<int>(raw.find('[')) + 1,
               "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) f.fail(line_no, 1, "empty section name");
      f.sections[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      f.fail(line_no, 1, "expected 'key = value' or '[section]'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) f.fail(line_no, 1, "empty key");
    if (section.empty())
      f.fail(line_no, 1, "'" + key + "' appears before any [section]");
    if (f.sections[section].count(key))
      f.fail(line_no, 1, "duplicate key '" + key + "' in [" + section + "]");
    f.sections[section][key] = Entry{value, line_no, static_cast<int>(eq) + 2};
  }
  return f;
}

std::string hash_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

}  // namespace

GameConfig parse_config(const std::string& text, const std::string& path) {
  const ParsedFile f = parse_ini(text, path);
  GameConfig cfg;
  cfg.source_path = path;
  cfg.config_hash = hash_hex(text);

  const Entry& mode = f.need("game", "mode");
  if (mode.value != "payoffs" && mode.value != "mtd")
    f.fail(mode.line, mode.col, "mode must be 'payoffs' or 'mtd'");
  if (f.has_section("payoffs") && f.has_section("mtd"))
    throw ConfigError(path +
                      ": sections [payoffs] and [mtd] are mutually exclusive");

  if (mode.value == "payoffs") {
    cfg.game.u_d = f.as_mat2("payoffs", "u_d");
    cfg.game.u_a = f.as_mat2("payoffs", "u_a");
  } else {
    MtdParams p;
    p.y1 = f.as_double("mtd", "y1");
    p.y2 = f.as_double("mtd", "y2");
    p.c1 = f.as_double("mtd", "c1");
    p.c2 = f.as_double("mtd", "c2");
    p.theta = f.as_double("mtd", "theta");
    p.d1 = f.as_vec4("mtd", "d1");
    p.d0 = f.as_vec4("mtd", "d0");
    p.a1 = f.as_vec4("mtd", "a1");
    p.a0 = f.as_vec4("mtd", "a0");
    cfg.mtd = p;
    cfg.game = expand_mtd(p);
  }
  if (!cfg.game.finite())
    throw ConfigError(path + ": payoff entries must be finite");

  if (f.find("stubborn", "p"))
    cfg.stubborn_raw = MemoryOneStrategy{f.as_vec4("stubborn", "p")};
  if (const Entry* e = f.find("solver", "coarse_step"))
    cfg.solver.coarse_step = f.to_double(*e);
  if (const Entry* e = f.find("solver", "refine_rounds"))
    cfg.solver.refine_rounds = static_cast<int>(f.to_double(*e));
  if (const Entry* e = f.find("analysis", "lambda_step"))
    cfg.analysis.lambda_step = f.to_double(*e);
  if (const Entry* e = f.find("analysis", "sweep_step"))
    cfg.analysis.sweep_step = f.to_double(*e);
  if (const Entry* e = f.find("simulation", "horizon"))
    cfg.sim.horizon = static_cast<long>(f.to_double(*e));
  if (const Entry* e = f.find("simulation", "eps1"))
    cfg.sim.eps1 = f.to_double(*e);
  if (const Entry* e = f.find("simulation", "eps2"))
    cfg.sim.eps2 = f.to_double(*e);
  if (const Entry* e = f.find("simulation", "lambdas"))
    cfg.sim.lambdas = f.to_vector(*e);
  if (const Entry* e = f.find("simulation", "q_exploration")) {
    if (e->value == "mixture")
      cfg.sim.q_exploration = QExploration::kMixture;
    else if (e->value == "uniform")
      cfg.sim.q_exploration = QExploration::kUniform;
    else
      f.fail(e->line, e->col, "q_exploration must be 'mixture' or 'uniform'");
  }

  const std::string a1v = cfg.game.assumption1_violation();
  if (!a1v.empty()) cfg.warnings.push_back("payoff ordering: " + a1v);
  try {
    cfg.stubborn();
  } catch (const InputDomainError& e) {
    cfg.warnings.push_back(std::string("stubborn strategy: ") + e.what());
  }
  try {
    cfg.stubborn_raw.validate();
  } catch (const InputDomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return cfg;
}

GameConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace zdsec
