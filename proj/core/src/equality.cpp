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

#include "vsa/equality.hpp"

namespace vsa {

void EqzConfig::Validate(const FieldParams& field) const {
  if (tree_arity != 2) throw Error(ErrorCode::kParameterMismatch, "only binary product trees are supported");
  unsigned need = 2 * k + s + 2;
  // p > 2^need  <=>  bit_length(p) > need, except when p is exactly a power
  // of two, which a prime above 2 never is.
  if (field.bit_length() <= need) {
    throw Error(ErrorCode::kParameterMismatch, "field too small for equality masking: need p > 2^" +
                                                   std::to_string(need) + ", have " +
                                                   std::to_string(field.bit_length()) + "-bit p");
  }
}

unsigned EqzConfig::TreeDepth() const {
  unsigned depth = 0;
  for (unsigned width = mask_bits(); width > 1; width = (width + 1) / 2) ++depth;
  return depth;
}

TapeCounts EqzConfig::Need(size_t rows) const {
  TapeCounts t;
  // One square plus L - 1 tree products per row.
  t.zero_shares = rows * mask_bits();
  t.random_bits = rows * mask_bits();
  return t;
}

Task<std::vector<RepShare>> EqzBatch(Engine& e, std::vector<RepShare> x, std::vector<RepShare> y, EqzConfig cfg) {
  if (x.size() != y.size()) throw Error(ErrorCode::kParameterMismatch, "equality operands differ in length");
  cfg.Validate(e.field());
  const FieldParams& f = e.field();
  const size_t n = x.size();
  const unsigned L = cfg.mask_bits();
  if (n == 0) co_return std::vector<RepShare>{};

  std::vector<RepShare> diff(n);
  for (size_t i = 0; i < n; ++i) diff[i] = x[i] - y[i];
  std::vector<RepShare> d = co_await e.Mul(diff, diff);

  std::vector<RepShare> bits = e.tape().RandomBits(n * L);
  std::vector<RepShare> masked(n);
  for (size_t i = 0; i < n; ++i) {
    RepShare acc = d[i];
    FieldElement pow = FieldElement::One(f);
    FieldElement two(f, 2);
    for (unsigned j = 0; j < L; ++j) {
      acc += bits[i * L + j] * pow;
      pow *= two;
    }
    masked[i] = acc;
  }
  std::vector<FieldElement> c = co_await e.Open(masked);

  // Factors (1 - e_j): 1 - b_j where c_j = 0, b_j where c_j = 1.
  RepShare one = e.Constant(1);
  RepShare zero = e.Constant(0);
  std::vector<std::vector<RepShare>> level(n, std::vector<RepShare>(L));
  for (size_t i = 0; i < n; ++i) {
    Uint192 cv = c[i].value();
    bool overflow = cv.hi != 0 || (cv.lo >> L) != 0;
    for (unsigned j = 0; j < L; ++j) {
      const RepShare& b = bits[i * L + j];
      // An opened value at or above 2^L proves d != 0; the row collapses to
      // constant zero but keeps its shape so rounds stay data-independent.
      if (overflow) {
        level[i][j] = zero;
      } else {
        level[i][j] = cv.Bit(j) ? b : one - b;
      }
    }
  }
  while (n > 0 && level[0].size() > 1) {
    size_t width = level[0].size();
    size_t pairs = width / 2;
    std::vector<RepShare> lhs, rhs;
    lhs.reserve(n * pairs);
    rhs.reserve(n * pairs);
    for (size_t i = 0; i < n; ++i) {
      for (size_t p = 0; p < pairs; ++p) {
        lhs.push_back(level[i][2 * p]);
        rhs.push_back(level[i][2 * p + 1]);
      }
    }
    std::vector<RepShare> prod = co_await e.Mul(std::move(lhs), std::move(rhs));
    for (size_t i = 0; i < n; ++i) {
      std::vector<RepShare> next(prod.begin() + static_cast<ptrdiff_t>(i * pairs),
                                 prod.begin() + static_cast<ptrdiff_t>((i + 1) * pairs));
      if (width % 2 == 1) next.push_back(level[i][width - 1]);
      level[i] = std::move(next);
    }
  }
  std::vector<RepShare> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = level[i][0];
  co_return out;
}

Task<RepShare> EqzPair(Engine& e, RepShare x, RepShare y, EqzConfig cfg) {
  std::vector<RepShare> out = co_await EqzBatch(e, {std::move(x)}, {std::move(y)}, cfg);
  co_return out[0];
}

Task<std::vector<RepShare>> SelectRow(Engine& e, std::vector<RepShare> eq, std::vector<std::vector<RepShare>> rows) {
  if (eq.size() != rows.size()) throw Error(ErrorCode::kParameterMismatch, "selector and table differ in length");
  if (rows.empty()) throw Error(ErrorCode::kParameterMismatch, "empty table");
  const size_t width = rows[0].size();
  std::vector<RepShare> lhs, rhs;
  lhs.reserve(rows.size() * width);
  rhs.reserve(rows.size() * width);
  for (size_t y = 0; y < rows.size(); ++y) {
    if (rows[y].size() != width) throw Error(ErrorCode::kParameterMismatch, "table rows differ in width");
    for (size_t c = 0; c < width; ++c) {
      lhs.push_back(eq[y]);
      rhs.push_back(rows[y][c]);
    }
  }
  std::vector<RepShare> prod = co_await e.Mul(std::move(lhs), std::move(rhs));
  std::vector<RepShare> out(width, e.Constant(0));
  for (size_t y = 0; y < rows.size(); ++y) {
    for (size_t c = 0; c < width; ++c) out[c] += prod[y * width + c];
  }
  co_return out;
}

}  // namespace vsa
