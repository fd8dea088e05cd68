#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "fracvi/problem_file.hpp"

namespace testing_helpers {

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Instance {
  int dim = 1;
  int n = 256;
  double half_length = 4.0;
  double sigma = 1.0;
  std::string coefficients = "identity";
  std::string f_sharp = "constant(2)";
  std::string f_vec;
  std::string g = "constant(1)";
  double eps_initial = 0.1;
  double eps_factor = 0.25;
  int levels = 10;
  std::string extra_solver;

  std::string text() const {
    std::string s = "[grid]\ndim = " + std::to_string(dim) + "\nn = " + std::to_string(n) +
                    "\nhalf_length = " + num(half_length) + "\n[domain]\n";
    s += dim == 1 ? "shape = interval\nhalf_width = 1\n" : "shape = disk\nradius = 1\n";
    s += "[coefficients]\na = " + coefficients + "\n[data]\n";
    if (!f_sharp.empty()) s += "f_sharp = " + f_sharp + "\n";
    if (!f_vec.empty()) s += "f_vec = " + f_vec + "\n";
    s += "[obstacle]\ng = " + g + "\n[solver]\nsigma = " + num(sigma) +
         "\neps_initial = " + num(eps_initial) + "\neps_factor = " + num(eps_factor) +
         "\nlevels = " + std::to_string(levels) + "\n" + extra_solver;
    return s;
  }

  fracvi::ProblemFile build() const { return fracvi::parse_problem_text(text()); }
};

}  // namespace testing_helpers
