/*
 * Copyright 2026 The kip Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef KIP_ERRORS_H_
#define KIP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace kip {

// A caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed textual input (addresses, prefixes, timestamps, files).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An instant fell outside the observation window.
class OutOfWindow : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// The requested operation needs between-interval moments (w >= 2).
class UnsupportedWindow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid command-line or configuration values.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw ContractViolation(what);
}

}  // namespace kip

#endif  // KIP_ERRORS_H_
