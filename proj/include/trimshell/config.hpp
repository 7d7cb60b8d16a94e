#pragma once

#include <map>
#include <string>
#include <vector>

namespace trimshell {

// Flat key-value run configuration (one `key = value` per line, lists
// space-separated, '#' comments).
struct RunConfig {
  std::string benchmark;  // empty for custom problems
  std::vector<int> n_list;
  std::vector<int> p_list;
  double alpha = 0.0;  // 0 = benchmark default
  int gauss_offset = 1;
  int grid_q = 3;
  std::string out_dir = ".";
  bool plot = false;

  // custom-problem fields (plane geometry)
  std::vector<std::string> levelsets;       // expression strings over (r, s)
  std::vector<std::string> boundary_kinds;  // per curve: clamped|simple|free
  double E = 1.0e4, nu = 0.3, t = 0.01;
  std::vector<double> load = {0.0, 0.0, -1.0};
  double rect[4] = {0.0, 1.0, 0.0, 1.0};  // rmin rmax smin smax

  std::string serialize() const;
  static RunConfig parse(const std::string& text);
  void validate() const;
};

}  // namespace trimshell
