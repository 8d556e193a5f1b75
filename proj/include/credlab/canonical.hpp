#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "credlab/bytes.hpp"

namespace credlab {

/// Node of the canonical text profile: a strict JSON subset with exactly one
/// byte representation per value.
///
/// Profile rules:
///   - values are booleans, non-negative integers, strings, arrays, objects;
///     no null, no floats
///   - object keys sorted lexicographically by UTF-8 bytes, unique
///   - no insignificant whitespace anywhere
///   - integers in minimal decimal form (no sign, no leading zeros)
///   - strings are UTF-8 whose NFC status is decidable without normalization
///     tables (canonical combining class 0 and NFC quick-check Yes for every
///     codepoint); escapes are exactly the mandatory set
///
/// The parser accepts only bytes the writer could have produced, so
/// serialize and parse are mutual inverses on their domains.
class Value {
  public:
    using Array = std::vector<Value>;
    using Object = std::map<std::string, Value>;

    Value() : v_(Object{}) {}
    Value(bool b) : v_(b) {}
    Value(std::int64_t i) : v_(i) {}
    Value(std::uint64_t i);
    Value(int i) : v_(static_cast<std::int64_t>(i)) {}
    Value(std::string s) : v_(std::move(s)) {}
    Value(const char* s) : v_(std::string(s)) {}
    Value(Array a) : v_(std::move(a)) {}
    Value(Object o) : v_(std::move(o)) {}

    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_integer() const { return std::holds_alternative<std::int64_t>(v_); }
    bool is_string() const { return std::holds_alternative<std::string>(v_); }
    bool is_array() const { return std::holds_alternative<Array>(v_); }
    bool is_object() const { return std::holds_alternative<Object>(v_); }

    bool as_bool() const;
    std::int64_t as_integer() const;
    const std::string& as_string() const;
    const Array& as_array() const;
    const Object& as_object() const;
    Array& as_array();
    Object& as_object();

    // Object conveniences; at() throws MalformedDocument when missing.
    bool has(std::string_view key) const;
    const Value& at(std::string_view key) const;
    const Value* find(std::string_view key) const;
    void set(std::string key, Value v);
    void erase(std::string_view key);

    friend bool operator==(const Value&, const Value&) = default;

  private:
    std::variant<bool, std::int64_t, std::string, Array, Object> v_;
};

/// Serializes to the unique canonical byte form.
/// Throws NonCanonicalValue for values outside the profile (negative
/// integers, invalid UTF-8, strings failing the NFC check).
Bytes canonical_bytes(const Value& value);

std::string canonical_text(const Value& value);

/// Strict parse: accepts exactly the canonical byte form, rejecting
/// whitespace, unsorted or duplicate keys, non-minimal numbers and escapes.
/// Throws MalformedDocument.
Value parse_canonical(ByteView bytes);
Value parse_canonical(std::string_view text);

/// True when the string satisfies the profile's text rules (valid UTF-8 and
/// conservatively verifiable NFC).
bool is_profile_string(std::string_view s);

} // namespace credlab
