#pragma once

#include <cstdint>
#include <string>

#include "secest/observer.hpp"

namespace secest {

struct GainsFile {
  ObserverGains gains;
  double lambda_max = 0.0;      // achieved certificate margin
  std::uint64_t seed = 0;       // solver seed
  std::string system_hash;      // hash of the system the gains were synthesized for
};

/// JSON gains file; P stored in full and checked symmetric on load.
void save_gains(const GainsFile& file, const std::string& path);

/// Throws std::runtime_error naming the file on parse or consistency failures.
GainsFile load_gains(const std::string& path);

}  // namespace secest
