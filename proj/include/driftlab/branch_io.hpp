#pragma once
#include <string>

#include "driftlab/tw.hpp"

namespace driftlab::branch_io {

// Binary branch file: magic "DLBR", format version, normalization mode and
// solver tolerance in the header, then per-point records
// (beta, c, mu, m, M, L, ell_g, N, q[0..N)) as little-endian 64-bit floats
// and 32-bit integers.
void write_branch(const std::string& path, const tw::Branch& branch,
                  double tol = 1e-11);
tw::Branch read_branch(const std::string& path);

// CSV alternative: one row per point with the grid values appended.
void write_branch_csv(const std::string& path, const tw::Branch& branch);

}  // namespace driftlab::branch_io
