// Copyright 2026 The graphseq Authors.
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

#pragma once

// Two-tier attribute rules: a syntactic regular expression (python-style
// syntax, full-string match) followed by a semantic predicate.

#include <charconv>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/regex.hpp>
#include <json.hpp>

#include "graphseq/common.hpp"

namespace graphseq {

/// Byte that separates edge attribute slots inside one attribute span.
inline constexpr char kUnitSeparator = '\x1f';

namespace patterns {

// Shipped exactly as published; do not edit.
inline constexpr std::string_view kWindowsExecutable =
    R"(^[A-Za-z]:\\(?:[^\\/:*?\"<>|\r\n]+\\)*[^\\/:*?\"<>|\r\n]*\.exe$)";
inline constexpr std::string_view kLinuxExecutable = R"(^/([^/\0]+/)*[^/\0]+$)";
inline constexpr std::string_view kWindowsPath =
    R"(^[A-Za-z]:\\(?:[^\\/:*?\"<>|\r\n]+\\)*[^\\/:*?\"<>|\r\n]*$)";
inline constexpr std::string_view kLinuxPath = R"(^/([^/\0]+/)*[^/\0]+$)";
inline constexpr std::string_view kIpAndPort = R"(^(?:\d{1,3}\.){3}\d{1,3}\|\d{1,5}$)";

// Free text: any byte sequence.
inline constexpr std::string_view kAnyText = R"(^[\s\S]*$)";

}  // namespace patterns

enum class SemanticCheck {
  kNone,         // only the separator-byte ban
  kIpPortRange,  // octets <= 255, port <= 65535
};

inline std::string_view to_string(SemanticCheck c) {
  switch (c) {
    case SemanticCheck::kNone:
      return "none";
    case SemanticCheck::kIpPortRange:
      return "ip_port_range";
  }
  return "none";
}

inline SemanticCheck semantic_check_from_string(std::string_view s) {
  if (s == "none") return SemanticCheck::kNone;
  if (s == "ip_port_range") return SemanticCheck::kIpPortRange;
  throw SchemaError("unknown semantic predicate '" + std::string(s) + "'");
}

struct AttributeVerdict {
  bool syntactic = false;
  bool semantic = false;  // false whenever syntactic is false

  bool valid() const { return syntactic && semantic; }
  friend bool operator==(const AttributeVerdict&, const AttributeVerdict&) = default;
};

namespace detail {

inline bool parse_bounded(std::string_view digits, unsigned long limit) {
  unsigned long v = 0;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  return ec == std::errc{} && p == digits.data() + digits.size() && v <= limit;
}

// Called only after the syntactic tier accepted "a.b.c.d|port".
inline bool ip_port_in_range(std::string_view text) {
  auto bar = text.find('|');
  if (bar == std::string_view::npos) return false;
  std::string_view ip = text.substr(0, bar);
  for (int octet = 0; octet < 4; ++octet) {
    auto dot = ip.find('.');
    auto part = ip.substr(0, dot);
    if (!parse_bounded(part, 255)) return false;
    if (dot == std::string_view::npos) {
      if (octet != 3) return false;
      break;
    }
    ip.remove_prefix(dot + 1);
  }
  return parse_bounded(text.substr(bar + 1), 65535);
}

}  // namespace detail

/// Validation rule for one attribute kind.
class AttributeRule {
 public:
  AttributeRule(std::string kind, std::string pattern, SemanticCheck semantic,
                std::string default_value)
      : kind_(std::move(kind)),
        pattern_(std::move(pattern)),
        semantic_(semantic),
        default_value_(std::move(default_value)) {
    try {
      regex_ = std::make_shared<const boost::regex>(
          pattern_, boost::regex::perl | boost::regex::no_mod_m);
    } catch (const boost::regex_error& e) {
      throw SchemaError("rule '" + kind_ + "': pattern does not compile: " + e.what());
    }
    if (!check(default_value_).valid()) {
      throw SchemaError("rule '" + kind_ + "': default value fails its own rule");
    }
  }

  const std::string& kind() const { return kind_; }
  const std::string& pattern() const { return pattern_; }
  SemanticCheck semantic() const { return semantic_; }
  const std::string& default_value() const { return default_value_; }

  AttributeVerdict check(std::string_view text) const {
    AttributeVerdict v;
    v.syntactic = boost::regex_match(text.begin(), text.end(), *regex_);
    if (!v.syntactic) return v;
    if (text.find(kUnitSeparator) != std::string_view::npos) return v;
    switch (semantic_) {
      case SemanticCheck::kNone:
        v.semantic = true;
        break;
      case SemanticCheck::kIpPortRange:
        v.semantic = detail::ip_port_in_range(text);
        break;
    }
    return v;
  }

 private:
  std::string kind_;
  std::string pattern_;
  SemanticCheck semantic_;
  std::string default_value_;
  std::shared_ptr<const boost::regex> regex_;
};

inline AttributeVerdict validate_attribute(const AttributeRule& rule, std::string_view text) {
  return rule.check(text);
}

/// Rules shipped with the library, keyed by kind name.
inline std::vector<AttributeRule> builtin_rules() {
  return {
      {"windows_executable", std::string(patterns::kWindowsExecutable), SemanticCheck::kNone,
       R"(C:\Windows\System32\svchost.exe)"},
      {"linux_executable", std::string(patterns::kLinuxExecutable), SemanticCheck::kNone,
       "/usr/bin/true"},
      {"windows_path", std::string(patterns::kWindowsPath), SemanticCheck::kNone,
       R"(C:\Windows\Temp\unknown.tmp)"},
      {"linux_path", std::string(patterns::kLinuxPath), SemanticCheck::kNone, "/tmp/unknown"},
      {"ip_port", std::string(patterns::kIpAndPort), SemanticCheck::kIpPortRange, "0.0.0.0|0"},
      {"text", std::string(patterns::kAnyText), SemanticCheck::kNone, ""},
  };
}

inline nlohmann::ordered_json rule_to_json(const AttributeRule& r) {
  nlohmann::ordered_json j;
  j["kind"] = r.kind();
  j["pattern"] = r.pattern();
  j["semantic"] = std::string(to_string(r.semantic()));
  j["default"] = r.default_value();
  return j;
}

inline AttributeRule rule_from_json(const nlohmann::json& j) {
  try {
    return AttributeRule(j.at("kind").get<std::string>(), j.at("pattern").get<std::string>(),
                         semantic_check_from_string(j.value("semantic", std::string("none"))),
                         j.value("default", std::string()));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed attribute rule: ") + e.what());
  }
}

/// Rules file: a JSON list of rule objects.
inline std::vector<AttributeRule> load_rules(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("rules file: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("rules file: top level must be a list");
  std::vector<AttributeRule> out;
  for (const auto& r : doc) out.push_back(rule_from_json(r));
  return out;
}

inline std::string save_rules(const std::vector<AttributeRule>& rules) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : rules) doc.push_back(rule_to_json(r));
  return doc.dump(2) + "\n";
}

}  // namespace graphseq
