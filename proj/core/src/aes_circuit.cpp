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

// Generator for the AES-128 Bristol circuit and the loader for the vendored
// copy. The S-box is the Boyar-Peralta tower-field circuit with 32 ANDs.

#include <array>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#include "vsa/boolcirc.hpp"

#ifndef VSA_SOURCE_DATA_DIR
#define VSA_SOURCE_DATA_DIR ""
#endif
#ifndef VSA_INSTALL_DATA_DIR
#define VSA_INSTALL_DATA_DIR ""
#endif

namespace vsa {

namespace {

using Byte = std::array<uint32_t, 8>;  // wire of bit k, LSB first

class Builder {
 public:
  explicit Builder(uint32_t inputs) : next_(inputs), inputs_(inputs) {}

  uint32_t Xor(uint32_t a, uint32_t b) { return Emit(GateKind::kXor, a, b); }
  uint32_t And(uint32_t a, uint32_t b) { return Emit(GateKind::kAnd, a, b); }
  uint32_t Inv(uint32_t a) { return Emit(GateKind::kInv, a, 0); }
  uint32_t Xnor(uint32_t a, uint32_t b) { return Inv(Xor(a, b)); }

  Byte Xor(const Byte& a, const Byte& b) {
    Byte o;
    for (int k = 0; k < 8; ++k) o[k] = Xor(a[k], b[k]);
    return o;
  }

  // Renumbers so that `outputs` become the last wires.
  BristolCircuit Finish(std::vector<size_t> in_groups, const std::vector<uint32_t>& outputs) {
    const uint32_t total = next_;
    std::vector<uint32_t> map(total, UINT32_MAX);
    for (uint32_t w = 0; w < inputs_; ++w) map[w] = w;
    const uint32_t first_out = total - static_cast<uint32_t>(outputs.size());
    for (size_t i = 0; i < outputs.size(); ++i) {
      if (outputs[i] < inputs_ || map[outputs[i]] != UINT32_MAX) {
        throw Error(ErrorCode::kInvalidArgument, "circuit output must be a distinct gate output");
      }
      map[outputs[i]] = first_out + static_cast<uint32_t>(i);
    }
    uint32_t id = inputs_;
    for (const auto& g : gates_) {
      if (map[g.out] == UINT32_MAX) map[g.out] = id++;
    }
    std::vector<BristolGate> gates = gates_;
    for (auto& g : gates) {
      if (g.kind != GateKind::kEq) g.in0 = map[g.in0];
      if (g.kind == GateKind::kXor || g.kind == GateKind::kAnd) g.in1 = map[g.in1];
      g.out = map[g.out];
    }
    return BristolCircuit::FromGates(total, std::move(in_groups), {outputs.size()}, std::move(gates));
  }

  // S(x) on a byte held LSB first.
  Byte Sbox(const Byte& in) {
    // x0 is the most significant bit.
    uint32_t x0 = in[7], x1 = in[6], x2 = in[5], x3 = in[4], x4 = in[3], x5 = in[2], x6 = in[1], x7 = in[0];
    // Top linear layer.
    uint32_t y14 = Xor(x3, x5);
    uint32_t y13 = Xor(x0, x6);
    uint32_t y9 = Xor(x0, x3);
    uint32_t y8 = Xor(x0, x5);
    uint32_t t0 = Xor(x1, x2);
    uint32_t y1 = Xor(t0, x7);
    uint32_t y4 = Xor(y1, x3);
    uint32_t y12 = Xor(y13, y14);
    uint32_t y2 = Xor(y1, x0);
    uint32_t y5 = Xor(y1, x6);
    uint32_t y3 = Xor(y5, y8);
    uint32_t t1 = Xor(x4, y12);
    uint32_t y15 = Xor(t1, x5);
    uint32_t y20 = Xor(t1, x1);
    uint32_t y6 = Xor(y15, x7);
    uint32_t y10 = Xor(y15, t0);
    uint32_t y11 = Xor(y20, y9);
    uint32_t y7 = Xor(x7, y11);
    uint32_t y17 = Xor(y10, y11);
    uint32_t y19 = Xor(y10, y8);
    uint32_t y16 = Xor(t0, y11);
    uint32_t y21 = Xor(y13, y16);
    uint32_t y18 = Xor(x0, y16);
    // Shared non-linear core: inversion in GF(2^4)^2.
    uint32_t t2 = And(y12, y15);
    uint32_t t3 = And(y3, y6);
    uint32_t t4 = Xor(t3, t2);
    uint32_t t5 = And(y4, x7);
    uint32_t t6 = Xor(t5, t2);
    uint32_t t7 = And(y13, y16);
    uint32_t t8 = And(y5, y1);
    uint32_t t9 = Xor(t8, t7);
    uint32_t t10 = And(y2, y7);
    uint32_t t11 = Xor(t10, t7);
    uint32_t t12 = And(y9, y11);
    uint32_t t13 = And(y14, y17);
    uint32_t t14 = Xor(t13, t12);
    uint32_t t15 = And(y8, y10);
    uint32_t t16 = Xor(t15, t12);
    uint32_t t17 = Xor(t4, t14);
    uint32_t t18 = Xor(t6, t16);
    uint32_t t19 = Xor(t9, t14);
    uint32_t t20 = Xor(t11, t16);
    uint32_t t21 = Xor(t17, y20);
    uint32_t t22 = Xor(t18, y19);
    uint32_t t23 = Xor(t19, y21);
    uint32_t t24 = Xor(t20, y18);
    uint32_t t25 = Xor(t21, t22);
    uint32_t t26 = And(t21, t23);
    uint32_t t27 = Xor(t24, t26);
    uint32_t t28 = And(t25, t27);
    uint32_t t29 = Xor(t28, t22);
    uint32_t t30 = Xor(t23, t24);
    uint32_t t31 = Xor(t22, t26);
    uint32_t t32 = And(t31, t30);
    uint32_t t33 = Xor(t32, t24);
    uint32_t t34 = Xor(t23, t33);
    uint32_t t35 = Xor(t27, t33);
    uint32_t t36 = And(t24, t35);
    uint32_t t37 = Xor(t36, t34);
    uint32_t t38 = Xor(t27, t36);
    uint32_t t39 = And(t29, t38);
    uint32_t t40 = Xor(t25, t39);
    uint32_t t41 = Xor(t40, t37);
    uint32_t t42 = Xor(t29, t33);
    uint32_t t43 = Xor(t29, t40);
    uint32_t t44 = Xor(t33, t37);
    uint32_t t45 = Xor(t42, t41);
    uint32_t z0 = And(t44, y15);
    uint32_t z1 = And(t37, y6);
    uint32_t z2 = And(t33, x7);
    uint32_t z3 = And(t43, y16);
    uint32_t z4 = And(t40, y1);
    uint32_t z5 = And(t29, y7);
    uint32_t z6 = And(t42, y11);
    uint32_t z7 = And(t45, y17);
    uint32_t z8 = And(t41, y10);
    uint32_t z9 = And(t44, y12);
    uint32_t z10 = And(t37, y3);
    uint32_t z11 = And(t33, y4);
    uint32_t z12 = And(t43, y13);
    uint32_t z13 = And(t40, y5);
    uint32_t z14 = And(t29, y2);
    uint32_t z15 = And(t42, y9);
    uint32_t z16 = And(t45, y14);
    uint32_t z17 = And(t41, y8);
    // Bottom linear layer.
    uint32_t t46 = Xor(z15, z16);
    uint32_t t47 = Xor(z10, z11);
    uint32_t t48 = Xor(z5, z13);
    uint32_t t49 = Xor(z9, z10);
    uint32_t t50 = Xor(z2, z12);
    uint32_t t51 = Xor(z2, z5);
    uint32_t t52 = Xor(z7, z8);
    uint32_t t53 = Xor(z0, z3);
    uint32_t t54 = Xor(z6, z7);
    uint32_t t55 = Xor(z16, z17);
    uint32_t t56 = Xor(z12, t48);
    uint32_t t57 = Xor(t50, t53);
    uint32_t t58 = Xor(z4, t46);
    uint32_t t59 = Xor(z3, t54);
    uint32_t t60 = Xor(t46, t57);
    uint32_t t61 = Xor(z14, t57);
    uint32_t t62 = Xor(t52, t58);
    uint32_t t63 = Xor(t49, t58);
    uint32_t t64 = Xor(z4, t59);
    uint32_t t65 = Xor(t61, t62);
    uint32_t t66 = Xor(z1, t63);
    uint32_t s0 = Xor(t59, t63);
    uint32_t s6 = Xnor(t56, t62);
    uint32_t s7 = Xnor(t48, t60);
    uint32_t t67 = Xor(t64, t65);
    uint32_t s3 = Xor(t53, t66);
    uint32_t s4 = Xor(t51, t66);
    uint32_t s5 = Xor(t47, t65);
    uint32_t s1 = Xnor(t64, s3);
    uint32_t s2 = Xnor(t55, t67);
    return Byte{s7, s6, s5, s4, s3, s2, s1, s0};
  }

  // Multiplication by x in GF(2^8) is a rewiring plus three XORs.
  Byte XTime(const Byte& a) {
    return Byte{a[7], Xor(a[0], a[7]), a[1], Xor(a[2], a[7]), Xor(a[3], a[7]), a[4], a[5], a[6]};
  }

 private:
  uint32_t Emit(GateKind kind, uint32_t a, uint32_t b) {
    gates_.push_back(BristolGate{kind, a, b, next_});
    return next_++;
  }

  uint32_t next_;
  uint32_t inputs_;
  std::vector<BristolGate> gates_;
};

Byte InputByte(uint32_t base, int index) {
  Byte b;
  for (int k = 0; k < 8; ++k) b[k] = base + 8 * index + k;
  return b;
}

}  // namespace

BristolCircuit GenerateSboxCircuit() {
  Builder b(8);
  Byte out = b.Sbox(InputByte(0, 0));
  return b.Finish({8}, std::vector<uint32_t>(out.begin(), out.end()));
}

BristolCircuit GenerateAes128Circuit() {
  Builder b(256);
  std::array<Byte, 16> key, state;
  for (int i = 0; i < 16; ++i) {
    key[i] = InputByte(0, i);
    state[i] = b.Xor(InputByte(128, i), key[i]);
  }
  // Key schedule as bytes w[4 * word + row].
  std::array<Byte, 16> round_key = key;
  static constexpr uint8_t kRcon[10] = {0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1b, 0x36};
  for (int round = 1; round <= 10; ++round) {
    std::array<Byte, 16> next;
    std::array<Byte, 4> temp;
    for (int r = 0; r < 4; ++r) temp[r] = b.Sbox(round_key[12 + (r + 1) % 4]);
    for (int k = 0; k < 8; ++k) {
      if ((kRcon[round - 1] >> k) & 1) temp[0][k] = b.Inv(temp[0][k]);
    }
    for (int r = 0; r < 4; ++r) next[r] = b.Xor(round_key[r], temp[r]);
    for (int word = 1; word < 4; ++word) {
      for (int r = 0; r < 4; ++r) next[4 * word + r] = b.Xor(round_key[4 * word + r], next[4 * (word - 1) + r]);
    }

    std::array<Byte, 16> sub;
    for (int i = 0; i < 16; ++i) sub[i] = b.Sbox(state[i]);
    std::array<Byte, 16> shifted;
    for (int c = 0; c < 4; ++c) {
      for (int r = 0; r < 4; ++r) shifted[r + 4 * c] = sub[r + 4 * ((c + r) % 4)];
    }
    std::array<Byte, 16> mixed = shifted;
    if (round < 10) {
      for (int c = 0; c < 4; ++c) {
        const Byte* a = &shifted[4 * c];
        std::array<Byte, 4> x2;
        for (int r = 0; r < 4; ++r) x2[r] = b.XTime(a[r]);
        for (int r = 0; r < 4; ++r) {
          // 2*a[r] + 3*a[r+1] + a[r+2] + a[r+3]
          Byte v = b.Xor(x2[r], x2[(r + 1) % 4]);
          v = b.Xor(v, a[(r + 1) % 4]);
          v = b.Xor(v, a[(r + 2) % 4]);
          mixed[4 * c + r] = b.Xor(v, a[(r + 3) % 4]);
        }
      }
    }
    for (int i = 0; i < 16; ++i) state[i] = b.Xor(mixed[i], next[i]);
    round_key = next;
  }
  std::vector<uint32_t> outputs;
  for (const auto& byte : state) outputs.insert(outputs.end(), byte.begin(), byte.end());
  return b.Finish({128, 128}, outputs);
}

BristolCircuit LoadAes128Circuit(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open AES circuit " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  std::string digest = ToHex(Sha3_256(AsBytes(text)));
  if (digest != kAes128CircuitSha3) {
    throw Error(ErrorCode::kIntegrity, "AES circuit " + path.string() + " has SHA3-256 " + digest + ", expected " +
                                           kAes128CircuitSha3);
  }
  BristolCircuit c = BristolCircuit::Parse(text);
  if (c.and_count() != 6400 || c.inputs() != std::vector<size_t>{128, 128} || c.outputs() != std::vector<size_t>{128}) {
    throw Error(ErrorCode::kIntegrity, "AES circuit has " + std::to_string(c.and_count()) + " AND gates, expected 6400");
  }
  return c;
}

std::filesystem::path DefaultAes128CircuitPath() {
  if (const char* env = std::getenv("VSA_AES_CIRCUIT"); env != nullptr && *env != '\0') return env;
  std::filesystem::path installed = std::filesystem::path(VSA_INSTALL_DATA_DIR) / "aes_128.txt";
  if (!std::string(VSA_INSTALL_DATA_DIR).empty() && std::filesystem::exists(installed)) return installed;
  return std::filesystem::path(VSA_SOURCE_DATA_DIR) / "aes_128.txt";
}

const BristolCircuit& Aes128Circuit() {
  static std::once_flag once;
  static std::unique_ptr<BristolCircuit> circuit;
  std::call_once(once, [] { circuit = std::make_unique<BristolCircuit>(LoadAes128Circuit(DefaultAes128CircuitPath())); });
  return *circuit;
}

// Recorded when data/aes_128.txt was generated with vsa-gen-aes-circuit.
const char kAes128CircuitSha3[] = "b085c66290a11027b0074eb5a6138908533464ccc77996016be48b6c1f4acfdc";

}  // namespace vsa
