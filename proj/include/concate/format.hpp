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

#ifndef CONCATE_FORMAT_HPP_
#define CONCATE_FORMAT_HPP_

#include <string>

namespace concate {

// Locale-independent "%.12g"; NaN prints as NA.
std::string format_number(double x, int precision = 12);

// Quotes a CSV field when it contains a separator, quote or newline.
std::string csv_field(const std::string& s);

}  // namespace concate

#endif  // CONCATE_FORMAT_HPP_
