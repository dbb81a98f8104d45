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

#include "vsa/kdf.hpp"

#include <fstream>

#include "vsa/error.hpp"

namespace vsa {

SessionKeys Kdf(const Mimc& mimc, const FieldElement& master, uint64_t counter) {
  const FieldParams& f = mimc.field();
  FieldElement base = FieldElement(f, counter) * FieldElement(f, 3);
  return SessionKeys{mimc.Encrypt(master, base), mimc.Encrypt(master, base + FieldElement(f, 1)),
                     mimc.Encrypt(master, base + FieldElement(f, 2)), counter};
}

KdfWatermark::KdfWatermark(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  if (in && !(in >> last_)) throw Error(ErrorCode::kStorage, "corrupt counter file " + path_->string());
}

uint64_t KdfWatermark::last() const {
  std::lock_guard lock(mu_);
  return last_;
}

void KdfWatermark::Claim(uint64_t counter) {
  std::lock_guard lock(mu_);
  if (counter <= last_) {
    throw Error(ErrorCode::kCounterReuse,
                "counter " + std::to_string(counter) + " not above watermark " + std::to_string(last_));
  }
  if (path_) {
    auto tmp = *path_;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << counter << "\n";
      if (!out.flush()) throw Error(ErrorCode::kStorage, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, *path_);
  }
  last_ = counter;
}

SessionKeys KdfWatermark::Derive(const Mimc& mimc, const FieldElement& master, uint64_t counter) {
  Claim(counter);
  return Kdf(mimc, master, counter);
}

SessionKeys KdfWatermark::DeriveNext(const Mimc& mimc, const FieldElement& master) {
  uint64_t next;
  {
    std::lock_guard lock(mu_);
    next = last_ + 1;
  }
  return Derive(mimc, master, next);
}

}  // namespace vsa
