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

// Server side of an AT_GEN_REQ: unseal this server's key bundle and booking
// bundle into share inputs for Step2Generate.

#pragma once

#include "vsa/messages.hpp"
#include "vsa/pubkey.hpp"
#include "vsa/step2.hpp"

namespace vsa {

struct SessionInputs {
  SessionKeyShares keys;
  BookingShares booking;
};

// Error(kCrypto) when a bundle fails authentication, Error(kDecode) when it
// is malformed and Error(kParameterMismatch) when the bundles disagree with
// the request's backend or carry shares for another party.
SessionInputs OpenSessionInputs(const FieldParams& field, int party, const KemPrivateKey& kem, const AtGenReq& req);

}  // namespace vsa
