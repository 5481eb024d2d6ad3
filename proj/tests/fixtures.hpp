#pragma once

#include <string>
#include <vector>

#include "whitham/io.hpp"

// Frozen points of M_g under tests/data, built with `whitham seed`.
inline std::string data_path(const std::string& name) {
  return std::string(WHITHAM_TEST_DATA) + "/" + name;
}

inline whitham::SpectralTriple load(const std::string& name) {
  return whitham::read_triple(data_path(name));
}

inline const std::vector<std::string>& frozen_points() {
  static const std::vector<std::string> names = {
      "good_g0.json",   "g0_conformal.json", "g1_generic.json",       "g1_circle.json",
      "g1_conformal.json", "g2_generic.json", "g2_common_pair.json"};
  return names;
}
