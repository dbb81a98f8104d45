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

#include "vsa/arith_circuit.hpp"

#include <algorithm>

namespace vsa {

void ArithCircuit::Check(uint32_t w) const {
  if (w >= gates_.size()) throw Error(ErrorCode::kInvalidArgument, "wire " + std::to_string(w) + " is not defined yet");
}

uint32_t ArithCircuit::Push(Gate g) {
  gates_.push_back(std::move(g));
  return static_cast<uint32_t>(gates_.size() - 1);
}

uint32_t ArithCircuit::Input() {
  ++num_inputs_;
  return Push({Op::kInput, static_cast<uint32_t>(num_inputs_ - 1), 0, {}});
}

uint32_t ArithCircuit::Const(const FieldElement& c) { return Push({Op::kConst, 0, 0, c}); }

uint32_t ArithCircuit::Add(uint32_t a, uint32_t b) {
  Check(a);
  Check(b);
  return Push({Op::kAdd, a, b, {}});
}

uint32_t ArithCircuit::Sub(uint32_t a, uint32_t b) {
  Check(a);
  Check(b);
  return Push({Op::kSub, a, b, {}});
}

uint32_t ArithCircuit::AddConst(uint32_t a, const FieldElement& c) {
  Check(a);
  return Push({Op::kAddConst, a, 0, c});
}

uint32_t ArithCircuit::MulConst(uint32_t a, const FieldElement& c) {
  Check(a);
  return Push({Op::kMulConst, a, 0, c});
}

uint32_t ArithCircuit::Mul(uint32_t a, uint32_t b) {
  Check(a);
  Check(b);
  return Push({Op::kMul, a, b, {}});
}

uint32_t ArithCircuit::Cube(uint32_t a) {
  Check(a);
  return Push({Op::kCube, a, 0, {}});
}

size_t ArithCircuit::CountOp(Op op) const {
  return static_cast<size_t>(std::count_if(gates_.begin(), gates_.end(), [op](const Gate& g) { return g.op == op; }));
}

std::vector<unsigned> ArithCircuit::WireDepths() const {
  std::vector<unsigned> d(gates_.size(), 0);
  for (size_t w = 0; w < gates_.size(); ++w) {
    const Gate& g = gates_[w];
    switch (g.op) {
      case Op::kInput:
      case Op::kConst:
        d[w] = 0;
        break;
      case Op::kAdd:
      case Op::kSub:
        d[w] = std::max(d[g.a], d[g.b]);
        break;
      case Op::kAddConst:
      case Op::kMulConst:
        d[w] = d[g.a];
        break;
      case Op::kMul:
        d[w] = std::max(d[g.a], d[g.b]) + 1;
        break;
      case Op::kCube:
        d[w] = d[g.a] + 1;
        break;
    }
  }
  return d;
}

unsigned ArithCircuit::Depth() const {
  auto d = WireDepths();
  unsigned out = 0;
  for (uint32_t w : outputs_) out = std::max(out, d[w]);
  return out;
}

std::vector<FieldElement> ArithCircuit::EvalClear(std::span<const FieldElement> inputs) const {
  if (inputs.size() != num_inputs_) throw Error(ErrorCode::kParameterMismatch, "wrong number of circuit inputs");
  std::vector<FieldElement> v(gates_.size());
  for (size_t w = 0; w < gates_.size(); ++w) {
    const Gate& g = gates_[w];
    switch (g.op) {
      case Op::kInput: v[w] = inputs[g.a]; break;
      case Op::kConst: v[w] = g.c; break;
      case Op::kAdd: v[w] = v[g.a] + v[g.b]; break;
      case Op::kSub: v[w] = v[g.a] - v[g.b]; break;
      case Op::kAddConst: v[w] = v[g.a] + g.c; break;
      case Op::kMulConst: v[w] = v[g.a] * g.c; break;
      case Op::kMul: v[w] = v[g.a] * v[g.b]; break;
      case Op::kCube: v[w] = v[g.a].Cube(); break;
    }
  }
  std::vector<FieldElement> out;
  for (uint32_t w : outputs_) out.push_back(v[w]);
  return out;
}

namespace {

Task<std::vector<RepShare>> MulLayer(Engine& e, std::vector<RepShare> x, std::vector<RepShare> y) {
  co_return co_await e.Mul(std::move(x), std::move(y));
}

Task<std::vector<RepShare>> CubeLayer(Engine& e, std::vector<RepShare> x) {
  co_return co_await e.CubeWithTuple(std::move(x));
}

}  // namespace

Task<std::vector<RepShare>> ArithCircuit::EvalShared(Engine& e, std::vector<RepShare> inputs) const {
  if (inputs.size() != num_inputs_) throw Error(ErrorCode::kParameterMismatch, "wrong number of circuit inputs");
  std::vector<unsigned> depth = WireDepths();
  unsigned max_depth = 0;
  for (unsigned d : depth) max_depth = std::max(max_depth, d);
  std::vector<RepShare> v(gates_.size());

  auto linear = [&](unsigned level) {
    for (size_t w = 0; w < gates_.size(); ++w) {
      if (depth[w] != level) continue;
      const Gate& g = gates_[w];
      switch (g.op) {
        case Op::kInput: v[w] = inputs[g.a]; break;
        case Op::kConst: v[w] = e.Constant(g.c); break;
        case Op::kAdd: v[w] = v[g.a] + v[g.b]; break;
        case Op::kSub: v[w] = v[g.a] - v[g.b]; break;
        case Op::kAddConst: v[w] = v[g.a].AddPublic(g.c); break;
        case Op::kMulConst: v[w] = v[g.a] * g.c; break;
        case Op::kMul:
        case Op::kCube: break;
      }
    }
  };

  linear(0);
  for (unsigned level = 1; level <= max_depth; ++level) {
    std::vector<uint32_t> mul_w, cube_w;
    std::vector<RepShare> mx, my, cx;
    for (size_t w = 0; w < gates_.size(); ++w) {
      if (depth[w] != level) continue;
      const Gate& g = gates_[w];
      if (g.op == Op::kMul) {
        mul_w.push_back(static_cast<uint32_t>(w));
        mx.push_back(v[g.a]);
        my.push_back(v[g.b]);
      } else if (g.op == Op::kCube) {
        cube_w.push_back(static_cast<uint32_t>(w));
        cx.push_back(v[g.a]);
      }
    }
    // Products and cubes of one level share a single layer.
    auto [prods, cubes] = co_await WhenAll(e, MulLayer(e, std::move(mx), std::move(my)), CubeLayer(e, std::move(cx)));
    for (size_t i = 0; i < mul_w.size(); ++i) v[mul_w[i]] = prods[i];
    for (size_t i = 0; i < cube_w.size(); ++i) v[cube_w[i]] = cubes[i];
    linear(level);
  }
  std::vector<RepShare> out;
  for (uint32_t w : outputs_) out.push_back(v[w]);
  co_return out;
}

ArithCircuit ArithCircuit::Random(const FieldParams& field, size_t inputs, size_t gates, Prg& prg) {
  ArithCircuit c(field);
  for (size_t i = 0; i < inputs; ++i) c.Input();
  auto pick = [&] { return static_cast<uint32_t>(prg.NextU64() % c.gates_.size()); };
  for (size_t i = 0; i < gates; ++i) {
    switch (prg.NextU64() % 7) {
      case 0: c.Const(prg.NextField(field)); break;
      case 1: c.Add(pick(), pick()); break;
      case 2: c.Sub(pick(), pick()); break;
      case 3: c.AddConst(pick(), prg.NextField(field)); break;
      case 4: c.MulConst(pick(), prg.NextField(field)); break;
      case 5: c.Mul(pick(), pick()); break;
      default: c.Cube(pick()); break;
    }
  }
  size_t outs = std::min<size_t>(5, c.gates_.size());
  for (size_t i = 0; i < outs; ++i) c.MarkOutput(static_cast<uint32_t>(c.gates_.size() - 1 - i));
  return c;
}

}  // namespace vsa
