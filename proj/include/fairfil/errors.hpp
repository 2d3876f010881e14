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

#ifndef FAIRFIL_ERRORS_HPP_
#define FAIRFIL_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairfil {

enum class Errc {
  kDimensionMismatch,
  kStaleCache,
  kNonFiniteGradient,
  kNonFiniteLoss,
  kNonFiniteScore,
  kUntaggedSentence,
  kNoSuchDirection,
  kBadTemplate,
  kBadLexicon,
  kMissingWordEmbeddings,
  kBatchTooSmall,
  kEmptyDataset,
  kRowCountMismatch,
  kUnknownWord,
  kZeroVector,
  kEmptySet,
  kDegenerateTest,
  kSingleClassTraining,
  kBadMagic,
  kTruncatedFile,
  kNonFinitePayload,
  kDuplicateWord,
  kBadConfig,
  kIo,
};

std::string_view errc_name(Errc code);

// Numeric errors map to CLI exit code 3, everything else to 2.
bool is_numeric(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fairfil

#endif  // FAIRFIL_ERRORS_HPP_
