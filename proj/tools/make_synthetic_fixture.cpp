// Regenerates data/synthetic_temperature.csv:
//   make_synthetic_fixture > data/synthetic_temperature.csv
#include <cstdlib>
#include <iostream>

#include "seqcp/analysis.hpp"

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1893;
  const auto series = seqcp::synthetic_temperature_series({}, seed);
  seqcp::write_csv(std::cout, series, "temperature");
  return 0;
}
