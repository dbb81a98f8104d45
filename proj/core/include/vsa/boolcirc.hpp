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

// Bristol-fashion Boolean circuits: parsing, layering, cleartext and shared
// evaluation, plus the AES-based constructions of the Boolean backend.
//
// Text format:
//   ngates nwires
//   ninputs  size_1 ... size_k
//   noutputs size_1 ... size_m
//   <gate lines: "nin nout in... out KIND", KIND in XOR AND INV EQ EQW>
// Inputs occupy the first wires in group order, outputs the last wires.
//
// Bit order: wire j of a 128-bit group is bit j % 8 of byte j / 8.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vsa/bitvector.hpp"
#include "vsa/crypto.hpp"
#include "vsa/engine.hpp"

namespace vsa {

enum class GateKind : uint8_t { kXor, kAnd, kInv, kEq, kEqw };
std::string_view GateKindName(GateKind kind);

struct BristolGate {
  GateKind kind;
  uint32_t in0 = 0;  // EQ: the constant bit
  uint32_t in1 = 0;
  uint32_t out = 0;
  friend bool operator==(const BristolGate&, const BristolGate&) = default;
};

// Parse failures; all are ParseError (kParse) with a line number, and the
// kind tells them apart.
class BristolError : public ParseError {
 public:
  enum class Kind { kHeader, kGateSyntax, kUnknownGate, kWireRange, kDanglingWire, kReassignedWire, kCycle, kCount };
  BristolError(Kind kind, size_t line, const std::string& what) : ParseError(line, what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class BristolCircuit {
 public:
  static BristolCircuit Parse(std::string_view text);
  static BristolCircuit LoadFile(const std::filesystem::path& path);
  // Validates structure; gates may be listed in any order as long as the
  // dependencies are acyclic. Throws BristolError with line 0.
  static BristolCircuit FromGates(uint32_t num_wires, std::vector<size_t> inputs, std::vector<size_t> outputs,
                                  std::vector<BristolGate> gates);

  std::string Unparse() const;

  size_t num_wires() const { return num_wires_; }
  size_t num_gates() const { return gates_.size(); }
  const std::vector<size_t>& inputs() const { return inputs_; }
  const std::vector<size_t>& outputs() const { return outputs_; }
  size_t input_bits() const;
  size_t output_bits() const;
  // Gates in a topological order.
  const std::vector<BristolGate>& gates() const { return gates_; }

  size_t and_count() const { return and_count_; }
  size_t xor_count() const;
  // Longest chain of AND gates; rounds of a fully batched shared evaluation.
  unsigned and_depth() const { return and_depth_; }
  // Plain topological layers (gate indices): inputs of a gate are circuit
  // inputs or outputs of strictly earlier layers.
  std::vector<std::vector<uint32_t>> Layers() const;

  // One instance; inputs[g] has inputs()[g] bits. Returns one BitVector per
  // output group.
  std::vector<BitVector> Eval(const std::vector<BitVector>& inputs) const;

  // `instances` independent copies in one pass: inputs[g] holds instance i's
  // group g at bits [i * size_g, (i + 1) * size_g); outputs are laid out the
  // same way. AND gates of one AND level go out as one layer.
  Task<std::vector<BitShares>> EvalShared(Engine& e, std::vector<BitShares> inputs, size_t instances) const;

 private:
  void Analyze();

  uint32_t num_wires_ = 0;
  std::vector<size_t> inputs_;
  std::vector<size_t> outputs_;
  std::vector<BristolGate> gates_;
  std::vector<unsigned> and_level_;  // per gate
  size_t and_count_ = 0;
  unsigned and_depth_ = 0;
};

// Self-generated AES-128 encryption circuit (inputs: key, plaintext;
// output: ciphertext). S-boxes use a 32-AND tower-field circuit, so the
// whole cipher has 200 * 32 = 6400 AND gates.
BristolCircuit GenerateAes128Circuit();
// The 8-bit S-box alone (input byte -> S(byte)), for exhaustive checking.
BristolCircuit GenerateSboxCircuit();

// SHA3-256 (hex) of the vendored circuit file.
extern const char kAes128CircuitSha3[];
// Loads and validates a circuit file (hash and 6400 ANDs); throws kIntegrity.
BristolCircuit LoadAes128Circuit(const std::filesystem::path& path);
// Process-wide instance: $VSA_AES_CIRCUIT, else the installed data file,
// else the source-tree copy.
const BristolCircuit& Aes128Circuit();
std::filesystem::path DefaultAes128CircuitPath();

BitVector BlockBits(const Block128& block);
Block128 BitsBlock(const BitVector& bits, size_t offset = 0);

// AES_key_i(block_i) for `count` instances (keys and blocks 128 bits each,
// instance-major).
Task<BitShares> AesShared(Engine& e, BitShares keys, BitShares blocks, size_t count);
// CBC-MAC with zero IV over message.size() / 128 blocks; one AES depth
// per block.
Task<BitShares> CbcMacAesShared(Engine& e, BitShares key, BitShares message);
// ct_j = m_j xor AES_key(counter_j); all keystream blocks in parallel.
Task<BitShares> AesCtrShared(Engine& e, BitShares key, std::vector<Block128> counters, BitShares message);
// Same with secret-shared counter blocks (128 bits each).
Task<BitShares> AesCtrShared(Engine& e, BitShares key, BitShares counters, BitShares message);
// Keys of the rows whose 32-bit id equals target, XORed together: 32 XNORs
// and a 31-AND tree per row, then 128 selection ANDs per row (159 per row).
Task<BitShares> EqualitySelectBinary(Engine& e, BitShares target, BitShares ids, BitShares keys, size_t rows);

// Counter block j for the Boolean CTR mode: nonce bytes 0..7, j in bytes
// 8..15 (little-endian).
Block128 CtrCounterBlock(uint64_t nonce, uint64_t j);

}  // namespace vsa
