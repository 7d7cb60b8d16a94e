#include "trimshell/config.hpp"

#include <sstream>
#include <stdexcept>

namespace trimshell {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

template <typename T>
std::vector<T> parse_list(const std::string& v) {
  std::istringstream is(v);
  std::vector<T> out;
  T x;
  while (is >> x) out.push_back(x);
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << ' ';
    os << v[i];
  }
  return os.str();
}

}  // namespace

std::string RunConfig::serialize() const {
  std::ostringstream os;
  os.precision(17);
  if (!benchmark.empty()) os << "benchmark = " << benchmark << '\n';
  if (!n_list.empty()) os << "n = " << join(n_list) << '\n';
  if (!p_list.empty()) os << "p = " << join(p_list) << '\n';
  if (alpha != 0.0) os << "alpha = " << alpha << '\n';
  os << "gauss_offset = " << gauss_offset << '\n';
  os << "grid_q = " << grid_q << '\n';
  os << "out = " << out_dir << '\n';
  os << "plot = " << (plot ? 1 : 0) << '\n';
  for (size_t i = 0; i < levelsets.size(); ++i)
    os << "levelset_" << i << " = " << levelsets[i] << '\n';
  for (size_t i = 0; i < boundary_kinds.size(); ++i)
    os << "bc_" << i << " = " << boundary_kinds[i] << '\n';
  if (!levelsets.empty()) {
    os << "E = " << E << '\n';
    os << "nu = " << nu << '\n';
    os << "t = " << t << '\n';
    os << "load = " << join(load) << '\n';
    os << "rect = " << rect[0] << ' ' << rect[1] << ' ' << rect[2] << ' ' << rect[3] << '\n';
  }
  return os.str();
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  std::map<int, std::string> ls, bc;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "benchmark") {
      cfg.benchmark = val;
    } else if (key == "n") {
      cfg.n_list = parse_list<int>(val);
    } else if (key == "p") {
      cfg.p_list = parse_list<int>(val);
    } else if (key == "alpha") {
      cfg.alpha = std::stod(val);
    } else if (key == "gauss_offset") {
      cfg.gauss_offset = std::stoi(val);
    } else if (key == "grid_q") {
      cfg.grid_q = std::stoi(val);
    } else if (key == "out") {
      cfg.out_dir = val;
    } else if (key == "plot") {
      cfg.plot = (val == "1" || val == "true");
    } else if (key.rfind("levelset_", 0) == 0) {
      ls[std::stoi(key.substr(9))] = val;
    } else if (key.rfind("bc_", 0) == 0) {
      bc[std::stoi(key.substr(3))] = val;
    } else if (key == "E") {
      cfg.E = std::stod(val);
    } else if (key == "nu") {
      cfg.nu = std::stod(val);
    } else if (key == "t") {
      cfg.t = std::stod(val);
    } else if (key == "load") {
      cfg.load = parse_list<double>(val);
    } else if (key == "rect") {
      const auto r = parse_list<double>(val);
      if (r.size() != 4) throw std::invalid_argument("rect needs 4 values");
      for (int i = 0; i < 4; ++i) cfg.rect[i] = r[i];
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  for (auto& [i, v] : ls) cfg.levelsets.push_back(v);
  for (auto& [i, v] : bc) cfg.boundary_kinds.push_back(v);
  return cfg;
}

void RunConfig::validate() const {
  for (int p : p_list)
    if (p < 2 || p > 8) throw std::invalid_argument("p out of supported range [2,8]");
  for (int n : n_list)
    if (n < 1 || n > 256) throw std::invalid_argument("n out of supported range [1,256]");
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must be in (0,1]");
  if (benchmark.empty() && levelsets.empty())
    throw std::invalid_argument("either a benchmark or custom level sets are required");
}

}  // namespace trimshell
