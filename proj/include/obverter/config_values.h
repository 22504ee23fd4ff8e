// Copyright 2026 The Obverter Authors
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

// Strict scalar and list parsing for `key = value` settings. Every parser
// rejects trailing characters and names the key in its error.

#ifndef OBVERTER_CONFIG_VALUES_H_
#define OBVERTER_CONFIG_VALUES_H_

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace obverter::config_values {

inline std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view text, const char* kind) {
  text = Trim(text);
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument(std::string(key) + ": expected " + kind + ", got '" +
                                std::string(text) + "'");
  }
  return value;
}

inline int ParseInt(std::string_view key, std::string_view text) {
  return ParseNumber<int>(key, text, "an integer");
}
inline std::uint64_t ParseU64(std::string_view key, std::string_view text) {
  return ParseNumber<std::uint64_t>(key, text, "an unsigned 64-bit integer");
}
inline float ParseFloat(std::string_view key, std::string_view text) {
  return ParseNumber<float>(key, text, "a number");
}
inline double ParseDouble(std::string_view key, std::string_view text) {
  return ParseNumber<double>(key, text, "a number");
}

inline std::vector<std::string> SplitList(std::string_view text) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = text.find(',');
    const std::string_view item = Trim(text.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

inline std::vector<int> ParseIntList(std::string_view key, std::string_view text) {
  std::vector<int> out;
  for (const std::string& item : SplitList(text)) out.push_back(ParseInt(key, item));
  if (out.empty()) throw std::invalid_argument(std::string(key) + ": empty list");
  return out;
}

inline std::string JoinList(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ",";
    out += items[i];
  }
  return out;
}

}  // namespace obverter::config_values

#endif  // OBVERTER_CONFIG_VALUES_H_
