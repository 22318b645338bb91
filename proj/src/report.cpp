#include "hartree/report.hpp"

#include <cstdio>

namespace hartree {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string EstimateReport::to_text() const {
  std::string s;
  s += "name=" + name + "\n";
  s += "samples=" + std::to_string(samples) + "\n";
  s += "max_ratio=" + fmt(max_ratio) + "\n";
  s += "violations=" + std::to_string(violations) + "\n";
  s += "empirical_constant=" + fmt(empirical_constant) + "\n";
  for (const auto& [k, v] : extra) s += k + "=" + fmt(v) + "\n";
  return s;
}

}  // namespace hartree
