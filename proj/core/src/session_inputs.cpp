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

#include "vsa/session_inputs.hpp"

#include "vsa/error.hpp"

namespace vsa {
SessionInputs OpenSessionInputs(const FieldParams& field, int party, const KemPrivateKey& kem, const AtGenReq& req) {
  SessionInputs in;
  try {
    in.keys = SessionKeyShares::Decode(field, kem.Open(req.key_bundle, KeyBundleAad(party)));
    in.booking = BookingShares::Decode(field, kem.Open(req.booking_bundle, BookingBundleAad(party, req.session)));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCrypto) throw;
    throw Error(ErrorCode::kDecode, std::string("malformed share bundle: ") + e.what());
  }
  if (in.keys.backend != req.backend || in.booking.backend != req.backend) {
    throw Error(ErrorCode::kParameterMismatch, "share bundles do not match the requested backend");
  }
  in.keys.Check(party);
  in.booking.Check(party);
  return in;
}

}  // namespace vsa
