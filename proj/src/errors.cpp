//
// Copyright 2026 The FairFil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "fairfil/errors.hpp"

namespace fairfil {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kStaleCache: return "StaleCache";
    case Errc::kNonFiniteGradient: return "NonFiniteGradient";
    case Errc::kNonFiniteLoss: return "NonFiniteLoss";
    case Errc::kNonFiniteScore: return "NonFiniteScore";
    case Errc::kUntaggedSentence: return "UntaggedSentence";
    case Errc::kNoSuchDirection: return "NoSuchDirection";
    case Errc::kBadTemplate: return "BadTemplate";
    case Errc::kBadLexicon: return "BadLexicon";
    case Errc::kMissingWordEmbeddings: return "MissingWordEmbeddings";
    case Errc::kBatchTooSmall: return "BatchTooSmall";
    case Errc::kEmptyDataset: return "EmptyDataset";
    case Errc::kRowCountMismatch: return "RowCountMismatch";
    case Errc::kUnknownWord: return "UnknownWord";
    case Errc::kZeroVector: return "ZeroVector";
    case Errc::kEmptySet: return "EmptySet";
    case Errc::kDegenerateTest: return "DegenerateTest";
    case Errc::kSingleClassTraining: return "SingleClassTraining";
    case Errc::kBadMagic: return "BadMagic";
    case Errc::kTruncatedFile: return "TruncatedFile";
    case Errc::kNonFinitePayload: return "NonFinitePayload";
    case Errc::kDuplicateWord: return "DuplicateWord";
    case Errc::kBadConfig: return "BadConfig";
    case Errc::kIo: return "Io";
  }
  return "Unknown";
}

bool is_numeric(Errc code) {
  switch (code) {
    case Errc::kNonFiniteGradient:
    case Errc::kNonFiniteLoss:
    case Errc::kNonFiniteScore:
    case Errc::kDegenerateTest:
    case Errc::kZeroVector:
      return true;
    default:
      return false;
  }
}

}  // namespace fairfil
