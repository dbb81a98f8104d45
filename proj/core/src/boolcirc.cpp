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

#include "vsa/boolcirc.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>

namespace vsa {

std::string_view GateKindName(GateKind kind) {
  switch (kind) {
    case GateKind::kXor: return "XOR";
    case GateKind::kAnd: return "AND";
    case GateKind::kInv: return "INV";
    case GateKind::kEq: return "EQ";
    case GateKind::kEqw: return "EQW";
  }
  return "?";
}

namespace {

using Kind = BristolError::Kind;

struct Line {
  size_t number;
  std::vector<std::string_view> tokens;
};

std::vector<Line> Tokenize(std::string_view text) {
  std::vector<Line> out;
  size_t number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++number;
    Line l{number, {}};
    size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) l.tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    if (!l.tokens.empty()) out.push_back(std::move(l));
    pos = end + 1;
  }
  return out;
}

bool ToNumber(std::string_view s, uint64_t& v) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

std::vector<size_t> ParseGroups(const Line& l) {
  uint64_t n;
  if (!ToNumber(l.tokens[0], n) || l.tokens.size() != n + 1) {
    throw BristolError(Kind::kHeader, l.number, "malformed wire group line");
  }
  std::vector<size_t> sizes;
  for (size_t i = 1; i <= n; ++i) {
    uint64_t v;
    if (!ToNumber(l.tokens[i], v)) throw BristolError(Kind::kHeader, l.number, "malformed wire group size");
    sizes.push_back(v);
  }
  return sizes;
}

size_t Sum(const std::vector<size_t>& v) {
  size_t s = 0;
  for (size_t x : v) s += x;
  return s;
}

bool IsBinary(GateKind k) { return k == GateKind::kXor || k == GateKind::kAnd; }

}  // namespace

size_t BristolCircuit::input_bits() const { return Sum(inputs_); }
size_t BristolCircuit::output_bits() const { return Sum(outputs_); }

size_t BristolCircuit::xor_count() const {
  return static_cast<size_t>(
      std::count_if(gates_.begin(), gates_.end(), [](const BristolGate& g) { return g.kind == GateKind::kXor; }));
}

namespace {

// Checks wire discipline and returns the gates in topological order
// (original order where it already is one).
std::vector<BristolGate> Validate(uint32_t num_wires, size_t in_bits, size_t out_bits, std::vector<BristolGate> gates,
                                  const std::vector<size_t>& lines, size_t output_line) {
  auto line_of = [&](size_t g) { return lines.empty() ? 0 : lines[g]; };
  if (in_bits > num_wires || out_bits > num_wires) {
    throw BristolError(Kind::kHeader, output_line, "wire groups exceed the wire count");
  }
  constexpr uint32_t kNone = UINT32_MAX;
  std::vector<uint32_t> producer(num_wires, kNone);
  for (size_t g = 0; g < gates.size(); ++g) {
    const auto& gate = gates[g];
    auto check_range = [&](uint32_t w) {
      if (w >= num_wires) {
        throw BristolError(Kind::kWireRange, line_of(g),
                           "wire " + std::to_string(w) + " out of range (" + std::to_string(num_wires) + " wires)");
      }
    };
    if (gate.kind != GateKind::kEq) check_range(gate.in0);
    if (IsBinary(gate.kind)) check_range(gate.in1);
    check_range(gate.out);
    if (gate.out < in_bits || producer[gate.out] != kNone) {
      throw BristolError(Kind::kReassignedWire, line_of(g), "wire " + std::to_string(gate.out) + " assigned twice");
    }
    producer[gate.out] = static_cast<uint32_t>(g);
  }
  std::vector<std::vector<uint32_t>> users(gates.size());
  std::vector<uint32_t> pending(gates.size(), 0);
  for (size_t g = 0; g < gates.size(); ++g) {
    const auto& gate = gates[g];
    auto dep = [&](uint32_t w) {
      if (w < in_bits) return;
      if (producer[w] == kNone) {
        throw BristolError(Kind::kDanglingWire, line_of(g), "wire " + std::to_string(w) + " is never assigned");
      }
      users[producer[w]].push_back(static_cast<uint32_t>(g));
      ++pending[g];
    };
    if (gate.kind != GateKind::kEq) dep(gate.in0);
    if (IsBinary(gate.kind)) dep(gate.in1);
  }
  for (size_t w = num_wires - out_bits; w < num_wires; ++w) {
    if (w >= in_bits && producer[w] == kNone) {
      throw BristolError(Kind::kDanglingWire, output_line, "output wire " + std::to_string(w) + " is never assigned");
    }
  }
  std::priority_queue<uint32_t, std::vector<uint32_t>, std::greater<>> ready;
  for (size_t g = 0; g < gates.size(); ++g) {
    if (pending[g] == 0) ready.push(static_cast<uint32_t>(g));
  }
  std::vector<BristolGate> order;
  order.reserve(gates.size());
  std::vector<bool> done(gates.size(), false);
  while (!ready.empty()) {
    uint32_t g = ready.top();
    ready.pop();
    order.push_back(gates[g]);
    done[g] = true;
    for (uint32_t u : users[g]) {
      if (--pending[u] == 0) ready.push(u);
    }
  }
  if (order.size() != gates.size()) {
    size_t g = static_cast<size_t>(std::find(done.begin(), done.end(), false) - done.begin());
    throw BristolError(Kind::kCycle, line_of(g), "cyclic dependency through wire " + std::to_string(gates[g].out));
  }
  return order;
}

}  // namespace

BristolCircuit BristolCircuit::FromGates(uint32_t num_wires, std::vector<size_t> inputs, std::vector<size_t> outputs,
                                         std::vector<BristolGate> gates) {
  BristolCircuit c;
  c.num_wires_ = num_wires;
  c.gates_ = Validate(num_wires, Sum(inputs), Sum(outputs), std::move(gates), {}, 0);
  c.inputs_ = std::move(inputs);
  c.outputs_ = std::move(outputs);
  c.Analyze();
  return c;
}

BristolCircuit BristolCircuit::Parse(std::string_view text) {
  std::vector<Line> lines = Tokenize(text);
  if (lines.size() < 3) {
    throw BristolError(Kind::kHeader, lines.empty() ? 1 : lines.back().number, "missing header lines");
  }
  uint64_t ngates, nwires;
  if (lines[0].tokens.size() != 2 || !ToNumber(lines[0].tokens[0], ngates) || !ToNumber(lines[0].tokens[1], nwires) ||
      nwires >= UINT32_MAX) {
    throw BristolError(Kind::kHeader, lines[0].number, "expected 'ngates nwires'");
  }
  std::vector<size_t> inputs = ParseGroups(lines[1]);
  std::vector<size_t> outputs = ParseGroups(lines[2]);

  std::vector<BristolGate> gates;
  std::vector<size_t> numbers;
  for (size_t i = 3; i < lines.size(); ++i) {
    const Line& l = lines[i];
    const auto& t = l.tokens;
    uint64_t nin, nout;
    if (t.size() < 4 || !ToNumber(t[0], nin) || !ToNumber(t[1], nout) || t.size() != nin + nout + 3) {
      throw BristolError(Kind::kGateSyntax, l.number, "malformed gate line");
    }
    std::string_view name = t.back();
    BristolGate g{};
    if (name == "XOR") g.kind = GateKind::kXor;
    else if (name == "AND") g.kind = GateKind::kAnd;
    else if (name == "INV") g.kind = GateKind::kInv;
    else if (name == "EQ") g.kind = GateKind::kEq;
    else if (name == "EQW") g.kind = GateKind::kEqw;
    else throw BristolError(Kind::kUnknownGate, l.number, "unknown gate kind '" + std::string(name) + "'");
    if (nin != (IsBinary(g.kind) ? 2u : 1u) || nout != 1) {
      throw BristolError(Kind::kGateSyntax, l.number, std::string(name) + " gate with wrong arity");
    }
    uint64_t w[3] = {0, 0, 0};
    for (size_t k = 0; k < nin + 1; ++k) {
      if (!ToNumber(t[2 + k], w[k]) || w[k] >= UINT32_MAX) {
        throw BristolError(Kind::kGateSyntax, l.number, "bad wire number '" + std::string(t[2 + k]) + "'");
      }
    }
    g.in0 = static_cast<uint32_t>(w[0]);
    if (nin == 2) {
      g.in1 = static_cast<uint32_t>(w[1]);
      g.out = static_cast<uint32_t>(w[2]);
    } else {
      g.out = static_cast<uint32_t>(w[1]);
    }
    if (g.kind == GateKind::kEq && g.in0 > 1) throw BristolError(Kind::kGateSyntax, l.number, "EQ constant must be 0 or 1");
    gates.push_back(g);
    numbers.push_back(l.number);
  }
  if (gates.size() != ngates) {
    throw BristolError(Kind::kCount, lines.back().number,
                       "header declares " + std::to_string(ngates) + " gates, found " + std::to_string(gates.size()));
  }
  BristolCircuit c;
  c.num_wires_ = static_cast<uint32_t>(nwires);
  c.gates_ = Validate(c.num_wires_, Sum(inputs), Sum(outputs), std::move(gates), numbers, lines[2].number);
  c.inputs_ = std::move(inputs);
  c.outputs_ = std::move(outputs);
  c.Analyze();
  return c;
}

BristolCircuit BristolCircuit::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open circuit file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

std::string BristolCircuit::Unparse() const {
  std::ostringstream out;
  out << gates_.size() << " " << num_wires_ << "\n" << inputs_.size();
  for (size_t s : inputs_) out << " " << s;
  out << "\n" << outputs_.size();
  for (size_t s : outputs_) out << " " << s;
  out << "\n\n";
  for (const auto& g : gates_) {
    if (IsBinary(g.kind)) {
      out << "2 1 " << g.in0 << " " << g.in1 << " " << g.out;
    } else {
      out << "1 1 " << g.in0 << " " << g.out;
    }
    out << " " << GateKindName(g.kind) << "\n";
  }
  return out.str();
}

void BristolCircuit::Analyze() {
  std::vector<unsigned> wire_level(num_wires_, 0);
  and_level_.assign(gates_.size(), 0);
  and_count_ = 0;
  and_depth_ = 0;
  for (size_t i = 0; i < gates_.size(); ++i) {
    const auto& g = gates_[i];
    unsigned lvl = 0;
    switch (g.kind) {
      case GateKind::kAnd:
        lvl = std::max(wire_level[g.in0], wire_level[g.in1]) + 1;
        ++and_count_;
        break;
      case GateKind::kXor: lvl = std::max(wire_level[g.in0], wire_level[g.in1]); break;
      case GateKind::kInv:
      case GateKind::kEqw: lvl = wire_level[g.in0]; break;
      case GateKind::kEq: lvl = 0; break;
    }
    wire_level[g.out] = lvl;
    and_level_[i] = lvl;
    and_depth_ = std::max(and_depth_, lvl);
  }
}

std::vector<std::vector<uint32_t>> BristolCircuit::Layers() const {
  std::vector<unsigned> depth(num_wires_, 0);
  std::vector<std::vector<uint32_t>> layers;
  for (size_t i = 0; i < gates_.size(); ++i) {
    const auto& g = gates_[i];
    unsigned d = 0;
    if (g.kind != GateKind::kEq) d = depth[g.in0];
    if (IsBinary(g.kind)) d = std::max(d, depth[g.in1]);
    depth[g.out] = d + 1;
    if (layers.size() < d + 1) layers.resize(d + 1);
    layers[d].push_back(static_cast<uint32_t>(i));
  }
  return layers;
}

std::vector<BitVector> BristolCircuit::Eval(const std::vector<BitVector>& inputs) const {
  if (inputs.size() != inputs_.size()) throw Error(ErrorCode::kParameterMismatch, "wrong number of input groups");
  std::vector<uint8_t> v(num_wires_, 0);
  size_t base = 0;
  for (size_t g = 0; g < inputs.size(); ++g) {
    if (inputs[g].size() != inputs_[g]) throw Error(ErrorCode::kParameterMismatch, "input group width mismatch");
    for (size_t j = 0; j < inputs_[g]; ++j) v[base + j] = inputs[g].Get(j);
    base += inputs_[g];
  }
  for (const auto& g : gates_) {
    switch (g.kind) {
      case GateKind::kXor: v[g.out] = v[g.in0] ^ v[g.in1]; break;
      case GateKind::kAnd: v[g.out] = v[g.in0] & v[g.in1]; break;
      case GateKind::kInv: v[g.out] = v[g.in0] ^ 1; break;
      case GateKind::kEq: v[g.out] = static_cast<uint8_t>(g.in0); break;
      case GateKind::kEqw: v[g.out] = v[g.in0]; break;
    }
  }
  std::vector<BitVector> out;
  size_t w = num_wires_ - output_bits();
  for (size_t size : outputs_) {
    BitVector b(size);
    for (size_t j = 0; j < size; ++j) b.Set(j, v[w++]);
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

// OR `n` bits of `src` into `dst` starting at bit `off`.
void PutBits(std::vector<uint64_t>& dst, size_t off, const uint64_t* src, size_t n) {
  for (size_t i = 0; i < n; i += 64) {
    size_t len = std::min<size_t>(64, n - i);
    uint64_t v = src[i / 64];
    if (len < 64) v &= (uint64_t{1} << len) - 1;
    size_t pos = off + i;
    size_t w = pos >> 6, s = pos & 63;
    dst[w] |= v << s;
    if (s != 0 && s + len > 64) dst[w + 1] |= v >> (64 - s);
  }
}

// `len` <= 64 bits of `src` starting at bit `pos`.
uint64_t GetBits(const std::vector<uint64_t>& src, size_t pos, size_t len) {
  size_t w = pos >> 6, s = pos & 63;
  uint64_t v = src[w] >> s;
  if (s != 0 && s + len > 64) v |= src[w + 1] << (64 - s);
  if (len < 64) v &= (uint64_t{1} << len) - 1;
  return v;
}

// Wire-major shared state: wire w, instance i at bit i of words
// [w * words, (w + 1) * words).
struct SlicedWires {
  size_t words;
  std::vector<uint64_t> lo, hi;
  uint64_t* Lo(uint32_t w) { return lo.data() + w * words; }
  uint64_t* Hi(uint32_t w) { return hi.data() + w * words; }
};

}  // namespace

Task<std::vector<BitShares>> BristolCircuit::EvalShared(Engine& e, std::vector<BitShares> inputs,
                                                        size_t instances) const {
  if (inputs.size() != inputs_.size()) throw Error(ErrorCode::kParameterMismatch, "wrong number of input groups");
  const uint8_t party = static_cast<uint8_t>(e.party());
  const size_t W = instances;
  SlicedWires s{(W + 63) / 64, {}, {}};
  s.lo.assign(num_wires_ * s.words, 0);
  s.hi.assign(num_wires_ * s.words, 0);
  const uint64_t last_mask = W % 64 == 0 ? ~uint64_t{0} : (uint64_t{1} << (W % 64)) - 1;
  auto mask_of = [&](size_t k) { return k + 1 == s.words ? last_mask : ~uint64_t{0}; };

  size_t base = 0;
  for (size_t g = 0; g < inputs.size(); ++g) {
    const size_t width = inputs_[g];
    if (inputs[g].size() != width * W) throw Error(ErrorCode::kParameterMismatch, "input group width mismatch");
    for (size_t i = 0; i < W; ++i) {
      for (size_t j = 0; j < width; ++j) {
        uint64_t bit = uint64_t{1} << (i & 63);
        if (inputs[g].lo.Get(i * width + j)) s.Lo(static_cast<uint32_t>(base + j))[i >> 6] |= bit;
        if (inputs[g].hi.Get(i * width + j)) s.Hi(static_cast<uint32_t>(base + j))[i >> 6] |= bit;
      }
    }
    base += width;
  }

  std::vector<std::vector<uint32_t>> ands(and_depth_ + 1), linear(and_depth_ + 1);
  for (size_t i = 0; i < gates_.size(); ++i) {
    (gates_[i].kind == GateKind::kAnd ? ands : linear)[and_level_[i]].push_back(static_cast<uint32_t>(i));
  }

  auto run_linear = [&](unsigned level) {
    for (uint32_t gi : linear[level]) {
      const auto& g = gates_[gi];
      uint64_t* lo = s.Lo(g.out);
      uint64_t* hi = s.Hi(g.out);
      for (size_t k = 0; k < s.words; ++k) {
        switch (g.kind) {
          case GateKind::kXor:
            lo[k] = s.Lo(g.in0)[k] ^ s.Lo(g.in1)[k];
            hi[k] = s.Hi(g.in0)[k] ^ s.Hi(g.in1)[k];
            break;
          case GateKind::kInv:
            // Complement = xor with public 1: party 0 flips lo, party 2 hi.
            lo[k] = s.Lo(g.in0)[k] ^ (party == 0 ? mask_of(k) : 0);
            hi[k] = s.Hi(g.in0)[k] ^ (party == 2 ? mask_of(k) : 0);
            break;
          case GateKind::kEqw:
            lo[k] = s.Lo(g.in0)[k];
            hi[k] = s.Hi(g.in0)[k];
            break;
          case GateKind::kEq:
            lo[k] = g.in0 && party == 0 ? mask_of(k) : 0;
            hi[k] = g.in0 && party == 2 ? mask_of(k) : 0;
            break;
          case GateKind::kAnd: break;
        }
      }
    }
  };

  run_linear(0);
  for (unsigned level = 1; level <= and_depth_; ++level) {
    const auto& layer = ands[level];
    const size_t n = layer.size() * W;
    BitShares x = EmptyBitShares(party, n);
    BitShares y = EmptyBitShares(party, n);
    for (size_t k = 0; k < layer.size(); ++k) {
      const auto& g = gates_[layer[k]];
      PutBits(x.lo.mutable_words(), k * W, s.Lo(g.in0), W);
      PutBits(x.hi.mutable_words(), k * W, s.Hi(g.in0), W);
      PutBits(y.lo.mutable_words(), k * W, s.Lo(g.in1), W);
      PutBits(y.hi.mutable_words(), k * W, s.Hi(g.in1), W);
    }
    BitShares z = co_await e.And(std::move(x), std::move(y));
    for (size_t k = 0; k < layer.size(); ++k) {
      const auto& g = gates_[layer[k]];
      for (size_t w = 0; w < s.words; ++w) {
        size_t len = std::min<size_t>(64, W - 64 * w);
        s.Lo(g.out)[w] = GetBits(z.lo.words(), k * W + 64 * w, len);
        s.Hi(g.out)[w] = GetBits(z.hi.words(), k * W + 64 * w, len);
      }
    }
    run_linear(level);
  }

  std::vector<BitShares> out;
  size_t wire = num_wires_ - output_bits();
  for (size_t width : outputs_) {
    BitShares o = EmptyBitShares(party, width * W);
    for (size_t j = 0; j < width; ++j, ++wire) {
      for (size_t i = 0; i < W; ++i) {
        uint64_t bit = uint64_t{1} << (i & 63);
        if (s.Lo(static_cast<uint32_t>(wire))[i >> 6] & bit) o.lo.Set(i * width + j, true);
        if (s.Hi(static_cast<uint32_t>(wire))[i >> 6] & bit) o.hi.Set(i * width + j, true);
      }
    }
    out.push_back(std::move(o));
  }
  co_return out;
}

BitVector BlockBits(const Block128& block) { return BitVector::FromBytes(block, 128); }

Block128 BitsBlock(const BitVector& bits, size_t offset) {
  Block128 b{};
  for (size_t i = 0; i < 128; ++i) {
    if (bits.Get(offset + i)) b[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
  }
  return b;
}

Block128 CtrCounterBlock(uint64_t nonce, uint64_t j) {
  Block128 b{};
  for (int i = 0; i < 8; ++i) {
    b[i] = static_cast<uint8_t>(nonce >> (8 * i));
    b[8 + i] = static_cast<uint8_t>(j >> (8 * i));
  }
  return b;
}

namespace {

BitShares Repeat(const BitShares& s, size_t times) {
  BitShares out{s.party, BitVector(0), BitVector(0)};
  for (size_t i = 0; i < times; ++i) out.Append(s);
  return out;
}

BitShares Gather(const BitShares& s, const std::vector<size_t>& idx) {
  BitShares out{s.party, BitVector(idx.size()), BitVector(idx.size())};
  for (size_t i = 0; i < idx.size(); ++i) {
    out.lo.Set(i, s.lo.Get(idx[i]));
    out.hi.Set(i, s.hi.Get(idx[i]));
  }
  return out;
}

}  // namespace

Task<BitShares> AesShared(Engine& e, BitShares keys, BitShares blocks, size_t count) {
  if (keys.size() != 128 * count || blocks.size() != 128 * count) {
    throw Error(ErrorCode::kParameterMismatch, "AES inputs must be 128 bits per instance");
  }
  std::vector<BitShares> in;
  in.push_back(std::move(keys));
  in.push_back(std::move(blocks));
  std::vector<BitShares> out = co_await Aes128Circuit().EvalShared(e, std::move(in), count);
  BitShares ct = std::move(out[0]);
  co_return ct;
}

Task<BitShares> CbcMacAesShared(Engine& e, BitShares key, BitShares message) {
  if (key.size() != 128 || message.size() % 128 != 0) {
    throw Error(ErrorCode::kParameterMismatch, "CBC-MAC needs a 128-bit key and whole blocks");
  }
  BitShares chain = e.ConstantBits(BitVector(128));
  for (size_t i = 0; i < message.size() / 128; ++i) {
    chain = co_await AesShared(e, key, chain ^ message.Slice(128 * i, 128), 1);
  }
  co_return chain;
}

Task<BitShares> AesCtrShared(Engine& e, BitShares key, BitShares counters, BitShares message) {
  if (key.size() != 128 || counters.size() % 128 != 0 || message.size() != counters.size()) {
    throw Error(ErrorCode::kParameterMismatch, "CTR needs one counter block per message block");
  }
  size_t blocks = counters.size() / 128;
  BitShares keys = Repeat(key, blocks);
  BitShares ks = co_await AesShared(e, std::move(keys), std::move(counters), blocks);
  co_return message ^ ks;
}

Task<BitShares> AesCtrShared(Engine& e, BitShares key, std::vector<Block128> counters, BitShares message) {
  BitVector ctr(0);
  for (const auto& c : counters) ctr.Append(BlockBits(c));
  BitShares shared = e.ConstantBits(ctr);
  BitShares out = co_await AesCtrShared(e, std::move(key), std::move(shared), std::move(message));
  co_return out;
}

Task<BitShares> EqualitySelectBinary(Engine& e, BitShares target, BitShares ids, BitShares keys, size_t rows) {
  if (target.size() != 32 || ids.size() != 32 * rows || keys.size() != 128 * rows) {
    throw Error(ErrorCode::kParameterMismatch, "selection expects 32-bit ids and 128-bit keys");
  }
  // XNOR: bit is 1 where id and target agree.
  BitShares eq = (ids ^ Repeat(target, rows)).Not();
  for (size_t width = 32; width > 1; width /= 2) {
    std::vector<size_t> even, odd;
    for (size_t r = 0; r < rows; ++r) {
      for (size_t j = 0; j < width; j += 2) {
        even.push_back(r * width + j);
        odd.push_back(r * width + j + 1);
      }
    }
    eq = co_await e.And(Gather(eq, even), Gather(eq, odd));
  }
  std::vector<size_t> spread;
  for (size_t r = 0; r < rows; ++r) spread.insert(spread.end(), 128, r);
  BitShares picked = co_await e.And(Gather(eq, spread), std::move(keys));
  BitShares key = e.ConstantBits(BitVector(128));
  for (size_t r = 0; r < rows; ++r) key ^= picked.Slice(128 * r, 128);
  co_return key;
}

}  // namespace vsa
