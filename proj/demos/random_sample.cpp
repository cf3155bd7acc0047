// Draws a few uniform random SK-terms and reduces each in normal order.
//
//   demo_random_sample [size] [count] [seed]
#include <cstdlib>
#include <iostream>

#include "qcl/qcl.hpp"

int main(int argc, char** argv) {
  const std::uint64_t size = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 12;
  const std::uint64_t count = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 5;
  const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 42;
  const qcl::Basis sk = qcl::sk_basis();
  qcl::Normalizer normalize(sk);

  for (std::uint64_t i = 0; i < count; ++i) {
    qcl::RandomSource rng(seed, i);
    const qcl::Term t = qcl::random_term(sk, size, rng);
    std::cout << qcl::to_string(t, sk) << '\n';
    const auto outcome = normalize(t, 1000);
    if (const auto* nf = std::get_if<qcl::NormalForm>(&outcome))
      std::cout << "  -> " << qcl::to_string(nf->result, sk) << "  (" << nf->steps << " steps)\n";
    else
      std::cout << "  no normal form within 1000 steps\n";
  }
}
