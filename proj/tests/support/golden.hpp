#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "apna/bytes.hpp"

namespace apna::testing {

inline std::map<std::string, Bytes> load_golden(const std::string& path = APNA_TEST_DATA_DIR "/golden_vectors.txt") {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::map<std::string, Bytes> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string name, hex;
    fields >> name >> hex;
    out[name] = from_hex(hex);
  }
  return out;
}

inline const Bytes& golden(const std::string& name) {
  static const auto table = [] {
    auto t = load_golden();
    t.merge(load_golden(APNA_TEST_DATA_DIR "/wire_vectors.txt"));
    return t;
  }();
  auto it = table.find(name);
  if (it == table.end()) throw std::runtime_error("missing golden vector " + name);
  return it->second;
}

}  // namespace apna::testing
