#include "sgdsat/parallel.hpp"

#include <cstdlib>
#include <string>

#include "sgdsat/error.hpp"

namespace sgdsat {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SGDSAT_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    fail("invalid_argument", std::string("SGDSAT_THREADS must be a positive integer, got '") + env + "'");
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace sgdsat
