/*
 * Copyright 2026 The VSA Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Secret-shared equality and one-hot selection.
//
// Equality of k-bit values x, y uses a masked bit comparison:
//   d = (x - y)^2            (< 2^(2k) as an integer, zero iff x = y)
//   r = sum_j b_j 2^j        over L = 2k + s dealer-supplied random bits
//   c = open(d + r)          (statistically hides d; no wraparound mod p)
//   [x == y] = prod_j (1 - (c_j xor b_j))
// The product runs as a binary tree, so one call costs
// 1 (square) + 1 (open) + ceil(log2 L) rounds; rows are processed in
// parallel, so the depth does not depend on how many rows are compared.
// The equality bits are never opened.

#pragma once

#include <vector>

#include "vsa/engine.hpp"

namespace vsa {

struct EqzConfig {
  unsigned k = 32;           // bit bound of the compared values
  unsigned s = 40;           // statistical masking parameter
  unsigned tree_arity = 2;   // only binary trees are implemented

  unsigned mask_bits() const { return 2 * k + s; }
  // Throws Error(kParameterMismatch) unless p > 2^(2k + s + 2).
  void Validate(const FieldParams& field) const;
  unsigned TreeDepth() const;
  unsigned Rounds() const { return 2 + TreeDepth(); }
  // Preprocessing consumed by `rows` parallel comparisons.
  TapeCounts Need(size_t rows) const;
};

// [x_i == y_i] for every i; all rows share the same rounds.
Task<std::vector<RepShare>> EqzBatch(Engine& e, std::vector<RepShare> x, std::vector<RepShare> y, EqzConfig cfg);
Task<RepShare> EqzPair(Engine& e, RepShare x, RepShare y, EqzConfig cfg);

// sum_y eq[y] * rows[y][c] for each column c; one round, n * width products.
// A non one-hot eq vector yields the corresponding sum of rows.
Task<std::vector<RepShare>> SelectRow(Engine& e, std::vector<RepShare> eq,
                                      std::vector<std::vector<RepShare>> rows);

}  // namespace vsa
