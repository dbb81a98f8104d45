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

// A straight-line arithmetic circuit over F_p with a cleartext evaluator, a
// shared evaluator and a static multiplicative-depth analysis. It is the
// reference the engine's round counter is checked against.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vsa/engine.hpp"

namespace vsa {

class ArithCircuit {
 public:
  enum class Op : uint8_t { kInput, kConst, kAdd, kSub, kAddConst, kMulConst, kMul, kCube };
  struct Gate {
    Op op;
    uint32_t a = 0;
    uint32_t b = 0;
    FieldElement c;
  };

  explicit ArithCircuit(const FieldParams& field) : field_(&field) {}

  uint32_t Input();
  uint32_t Const(const FieldElement& c);
  uint32_t Add(uint32_t a, uint32_t b);
  uint32_t Sub(uint32_t a, uint32_t b);
  uint32_t AddConst(uint32_t a, const FieldElement& c);
  uint32_t MulConst(uint32_t a, const FieldElement& c);
  uint32_t Mul(uint32_t a, uint32_t b);
  // x^3; the shared evaluator uses one preprocessed cube tuple (depth 1).
  uint32_t Cube(uint32_t a);
  void MarkOutput(uint32_t w) { outputs_.push_back(w); }

  const FieldParams& field() const { return *field_; }
  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<uint32_t>& outputs() const { return outputs_; }
  size_t num_inputs() const { return num_inputs_; }
  size_t CountOp(Op op) const;

  // Per-wire multiplicative depth; Mul and Cube add one level.
  std::vector<unsigned> WireDepths() const;
  // Maximum depth over the outputs: the rounds a fully batched shared
  // evaluation needs before the outputs are opened.
  unsigned Depth() const;

  std::vector<FieldElement> EvalClear(std::span<const FieldElement> inputs) const;
  Task<std::vector<RepShare>> EvalShared(Engine& e, std::vector<RepShare> inputs) const;

  // Random circuit for property tests: `gates` non-input gates drawn from
  // all operations, outputs = the last few wires.
  static ArithCircuit Random(const FieldParams& field, size_t inputs, size_t gates, Prg& prg);

 private:
  uint32_t Push(Gate g);
  void Check(uint32_t w) const;

  const FieldParams* field_;
  std::vector<Gate> gates_;
  std::vector<uint32_t> outputs_;
  size_t num_inputs_ = 0;
};

}  // namespace vsa
