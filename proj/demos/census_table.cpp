// Prints, for each size n, how many SK-terms are normal, reduce in one step,
// or run out of fuel, next to the exact counts from the series module.
//
//   demo_census_table [max_size] [fuel]
#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "qcl/qcl.hpp"

int main(int argc, char** argv) {
  const std::uint64_t max_size = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;
  const std::uint64_t fuel = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1000;
  const qcl::Basis sk = qcl::sk_basis();

  std::cout << std::setw(3) << "n" << std::setw(12) << "terms" << std::setw(12) << "normal" << std::setw(12)
            << "R0 series" << std::setw(12) << "one step" << std::setw(12) << "exhausted" << '\n';
  for (std::uint64_t n = 0; n <= max_size; ++n) {
    qcl::CensusOptions options;
    options.fuel = fuel;
    const qcl::CensusResult r = qcl::census(sk, n, options);
    std::cout << std::setw(3) << n << std::setw(12) << r.total << std::setw(12) << r.normal_forms << std::setw(12)
              << qcl::coeff_R0(n) << std::setw(12) << r.bucket(1) << std::setw(12) << r.fuel_exhausted << '\n';
  }
}
