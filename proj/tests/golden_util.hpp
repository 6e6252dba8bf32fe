#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

// Compares `text` against tests/golden/<name>. Set DIPLOMACY_REGEN_GOLDEN=1
// to rewrite the fixtures instead (they are then reviewed and committed).
inline void golden_compare(const std::string& name, const std::string& text) {
  std::string path = std::string(DIPLOMACY_TEST_GOLDEN_DIR) + "/" + name;
  if (std::getenv("DIPLOMACY_REGEN_GOLDEN") != nullptr) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE_MESSAGE(out.good(), path);
    out << text;
    return;
  }
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing golden file " + path));
  std::ostringstream buf;
  buf << in.rdbuf();
  CHECK_MESSAGE(buf.str() == text, ("golden mismatch for " + name));
}
