#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "quopt/linalg.hpp"

namespace quopt::rng {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// A block is a pure function of (counter, key): no state, so any draw can be
// produced at any time by any worker. This is what makes the simulation
// results independent of the number of threads and of batching.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Maps 64 random bits to a uniform in the open interval (0, 1).
double uniform_from_bits(std::uint64_t bits);

// Inverse of the standard normal CDF (Wichura 1988, algorithm AS 241,
// PPND16 variant). Absolute error < 1e-9 over [2^-54, 1 - 2^-54]; in
// practice ~1e-15.
double inverse_normal_cdf(double p);

// Standard normal draw number `index` of the stream identified by `seed`.
double normal_draw(std::uint64_t seed, std::uint64_t index);

// Fills a row-major n_rows x dim block of standard normals. Row r, column c
// holds draw number (first_row + r) * dim + c, so the block layout is a pure
// function of the global row range: splitting work differently cannot change
// any value.
void fill_normals(std::uint64_t seed, std::uint64_t first_row, std::size_t n_rows,
                  std::size_t dim, std::span<double> out);

// Chunk view of the stream: chunk_size x dim matrix whose rows are global
// rows [chunk_index*chunk_size, (chunk_index+1)*chunk_size). Distinct chunk
// indexes cover disjoint counter ranges and are therefore independent;
// concatenating chunks 0 and 1 equals one chunk of twice the size.
Matrix normal_stream(std::uint64_t seed, std::uint64_t chunk_index, std::size_t chunk_size,
                     std::size_t dim);

}  // namespace quopt::rng
