#pragma once

#include <cstdint>
#include <random>

#include "mpkit/matrix.hpp"

namespace mpkit {

using Rng = std::mt19937_64;

// Entries (x + iy)/sqrt(2) with x, y standard normal.
ComplexMatrix gaussian_matrix(Index rows, Index cols, Rng& rng);

// Haar-distributed unitary: QR of a complex Gaussian with the phases of
// diag(R) folded back into Q.
ComplexMatrix random_unitary(Index n, Rng& rng);

// SplitMix64 finalizer; used to derive independent per-trial seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

}  // namespace mpkit
