// Copyright 2026 The concate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "concate/design.hpp"

#include <cctype>

#include "concate/errors.hpp"

namespace concate {

char design_letter(Design d) { return static_cast<char>('A' + static_cast<int>(d)); }

Design parse_design(std::string_view text) {
  if (text.size() == 1) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    if (c >= 'A' && c <= 'G') return static_cast<Design>(c - 'A');
  }
  throw ValidationError("unknown design '" + std::string(text) + "', expected one of A..G");
}

}  // namespace concate
