#include "credlab/canonical.hpp"

#include <algorithm>
#include <cstdio>

#include "credlab/errors.hpp"

namespace credlab {

namespace {

struct CodepointRange {
    std::uint32_t first;
    std::uint32_t last;
};

constexpr CodepointRange kNfcRejectRanges[] = {
#include "nfc_reject_ranges.inc"
};

bool nfc_rejected(std::uint32_t cp) {
    auto it = std::upper_bound(std::begin(kNfcRejectRanges), std::end(kNfcRejectRanges), cp,
                               [](std::uint32_t v, const CodepointRange& r) { return v < r.first; });
    if (it == std::begin(kNfcRejectRanges)) return false;
    --it;
    return cp >= it->first && cp <= it->last;
}

// Strict UTF-8 decode of one codepoint at s[i]; rejects overlong forms,
// surrogates and values above U+10FFFF. Returns false on error.
bool decode_utf8(std::string_view s, std::size_t& i, std::uint32_t& cp) {
    std::uint8_t b0 = static_cast<std::uint8_t>(s[i]);
    if (b0 < 0x80) {
        cp = b0;
        i += 1;
        return true;
    }
    auto cont = [&](std::size_t k) {
        return i + k < s.size() && (static_cast<std::uint8_t>(s[i + k]) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0) {
        if (!cont(1)) return false;
        cp = (b0 & 0x1Fu) << 6 | (static_cast<std::uint8_t>(s[i + 1]) & 0x3Fu);
        if (cp < 0x80) return false;
        i += 2;
        return true;
    }
    if ((b0 & 0xF0) == 0xE0) {
        if (!cont(1) || !cont(2)) return false;
        cp = (b0 & 0x0Fu) << 12 | (static_cast<std::uint8_t>(s[i + 1]) & 0x3Fu) << 6 |
             (static_cast<std::uint8_t>(s[i + 2]) & 0x3Fu);
        if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += 3;
        return true;
    }
    if ((b0 & 0xF8) == 0xF0) {
        if (!cont(1) || !cont(2) || !cont(3)) return false;
        cp = (b0 & 0x07u) << 18 | (static_cast<std::uint8_t>(s[i + 1]) & 0x3Fu) << 12 |
             (static_cast<std::uint8_t>(s[i + 2]) & 0x3Fu) << 6 | (static_cast<std::uint8_t>(s[i + 3]) & 0x3Fu);
        if (cp < 0x10000 || cp > 0x10FFFF) return false;
        i += 4;
        return true;
    }
    return false;
}

void write_string(std::string& out, std::string_view s) {
    if (!is_profile_string(s)) {
        raise(ErrorCode::NonCanonicalValue, "string is not valid NFC-checked UTF-8");
    }
    out.push_back('"');
    for (char ch : s) {
        std::uint8_t b = static_cast<std::uint8_t>(ch);
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\b': out += "\\b"; break;
        case '\t': out += "\\t"; break;
        case '\n': out += "\\n"; break;
        case '\f': out += "\\f"; break;
        case '\r': out += "\\r"; break;
        default:
            if (b < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "\\u%04x", b);
                out += buf;
            } else {
                out.push_back(ch);
            }
        }
    }
    out.push_back('"');
}

void write_value(std::string& out, const Value& v) {
    if (v.is_bool()) {
        out += v.as_bool() ? "true" : "false";
    } else if (v.is_integer()) {
        std::int64_t i = v.as_integer();
        if (i < 0) {
            raise(ErrorCode::NonCanonicalValue, "negative integers are outside the profile");
        }
        out += std::to_string(i);
    } else if (v.is_string()) {
        write_string(out, v.as_string());
    } else if (v.is_array()) {
        out.push_back('[');
        bool first = true;
        for (const Value& e : v.as_array()) {
            if (!first) out.push_back(',');
            first = false;
            write_value(out, e);
        }
        out.push_back(']');
    } else {
        out.push_back('{');
        bool first = true;
        for (const auto& [key, val] : v.as_object()) {
            if (!first) out.push_back(',');
            first = false;
            write_string(out, key);
            out.push_back(':');
            write_value(out, val);
        }
        out.push_back('}');
    }
}

class StrictParser {
  public:
    explicit StrictParser(std::string_view text) : text_(text) {}

    Value parse_document() {
        Value v = parse_value(0);
        if (pos_ != text_.size()) {
            fail("trailing bytes after document");
        }
        return v;
    }

  private:
    [[noreturn]] void fail(const std::string& why) {
        raise(ErrorCode::MalformedDocument, why + " at byte " + std::to_string(pos_));
    }

    char peek() {
        if (pos_ >= text_.size()) fail("unexpected end of input");
        return text_[pos_];
    }

    char take() {
        char c = peek();
        ++pos_;
        return c;
    }

    void expect(char c) {
        if (take() != c) {
            --pos_;
            fail(std::string("expected '") + c + "'");
        }
    }

    Value parse_value(int depth) {
        if (depth > kMaxDepth) fail("nesting too deep");
        char c = peek();
        switch (c) {
        case 't':
        case 'f': return parse_bool();
        case '"': return Value(parse_string());
        case '[': return parse_array(depth);
        case '{': return parse_object(depth);
        default:
            if (c >= '0' && c <= '9') return parse_integer();
            fail("unexpected byte");
        }
    }

    Value parse_bool() {
        if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            return Value(true);
        }
        if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            return Value(false);
        }
        fail("malformed literal");
    }

    Value parse_integer() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
        std::string_view digits = text_.substr(start, pos_ - start);
        if (digits.size() > 1 && digits[0] == '0') fail("integer has leading zero");
        if (digits.size() > 19) fail("integer too large");
        std::int64_t value = 0;
        for (char d : digits) {
            if (value > (INT64_MAX - (d - '0')) / 10) fail("integer too large");
            value = value * 10 + (d - '0');
        }
        return Value(value);
    }

    std::string parse_string() {
        expect('"');
        std::string out;
        for (;;) {
            if (pos_ >= text_.size()) fail("unterminated string");
            char c = take();
            if (c == '"') break;
            if (c == '\\') {
                char e = take();
                switch (e) {
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case 'b': out.push_back('\b'); break;
                case 't': out.push_back('\t'); break;
                case 'n': out.push_back('\n'); break;
                case 'f': out.push_back('\f'); break;
                case 'r': out.push_back('\r'); break;
                case 'u': {
                    unsigned v = 0;
                    for (int k = 0; k < 4; ++k) {
                        char h = take();
                        if (h >= '0' && h <= '9') v = v << 4 | static_cast<unsigned>(h - '0');
                        else if (h >= 'a' && h <= 'f') v = v << 4 | static_cast<unsigned>(h - 'a' + 10);
                        else fail("bad \\u escape digit");
                    }
                    // Only the control characters without a short escape may
                    // be \u-escaped; anything else has a shorter form and is
                    // therefore non-canonical.
                    if (v >= 0x20 || v == 0x08 || v == 0x09 || v == 0x0A || v == 0x0C || v == 0x0D) {
                        fail("non-minimal \\u escape");
                    }
                    out.push_back(static_cast<char>(v));
                    break;
                }
                default: fail("unknown escape");
                }
            } else if (static_cast<std::uint8_t>(c) < 0x20) {
                fail("unescaped control character");
            } else {
                out.push_back(c);
            }
        }
        if (!is_profile_string(out)) fail("string is not valid NFC-checked UTF-8");
        return out;
    }

    Value parse_array(int depth) {
        expect('[');
        Value::Array items;
        if (peek() == ']') {
            ++pos_;
            return Value(std::move(items));
        }
        for (;;) {
            items.push_back(parse_value(depth + 1));
            char c = take();
            if (c == ']') break;
            if (c != ',') {
                --pos_;
                fail("expected ',' or ']'");
            }
        }
        return Value(std::move(items));
    }

    Value parse_object(int depth) {
        expect('{');
        Value::Object members;
        if (peek() == '}') {
            ++pos_;
            return Value(std::move(members));
        }
        std::string prev_key;
        bool have_prev = false;
        for (;;) {
            std::string key = parse_string();
            if (have_prev && key <= prev_key) fail("object keys not in strict ascending order");
            expect(':');
            members.emplace(key, parse_value(depth + 1));
            prev_key = std::move(key);
            have_prev = true;
            char c = take();
            if (c == '}') break;
            if (c != ',') {
                --pos_;
                fail("expected ',' or '}'");
            }
        }
        return Value(std::move(members));
    }

    static constexpr int kMaxDepth = 64;

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

Value::Value(std::uint64_t i) {
    if (i > static_cast<std::uint64_t>(INT64_MAX)) {
        raise(ErrorCode::NonCanonicalValue, "integer too large for the profile");
    }
    v_ = static_cast<std::int64_t>(i);
}

bool Value::as_bool() const {
    if (!is_bool()) raise(ErrorCode::MalformedDocument, "value is not a boolean");
    return std::get<bool>(v_);
}

std::int64_t Value::as_integer() const {
    if (!is_integer()) raise(ErrorCode::MalformedDocument, "value is not an integer");
    return std::get<std::int64_t>(v_);
}

const std::string& Value::as_string() const {
    if (!is_string()) raise(ErrorCode::MalformedDocument, "value is not a string");
    return std::get<std::string>(v_);
}

const Value::Array& Value::as_array() const {
    if (!is_array()) raise(ErrorCode::MalformedDocument, "value is not an array");
    return std::get<Array>(v_);
}

const Value::Object& Value::as_object() const {
    if (!is_object()) raise(ErrorCode::MalformedDocument, "value is not an object");
    return std::get<Object>(v_);
}

Value::Array& Value::as_array() {
    if (!is_array()) raise(ErrorCode::MalformedDocument, "value is not an array");
    return std::get<Array>(v_);
}

Value::Object& Value::as_object() {
    if (!is_object()) raise(ErrorCode::MalformedDocument, "value is not an object");
    return std::get<Object>(v_);
}

bool Value::has(std::string_view key) const { return find(key) != nullptr; }

const Value& Value::at(std::string_view key) const {
    const Value* v = find(key);
    if (!v) raise(ErrorCode::MalformedDocument, "missing member: " + std::string(key));
    return *v;
}

const Value* Value::find(std::string_view key) const {
    if (!is_object()) return nullptr;
    const Object& o = std::get<Object>(v_);
    auto it = o.find(std::string(key));
    return it == o.end() ? nullptr : &it->second;
}

void Value::set(std::string key, Value v) { as_object().insert_or_assign(std::move(key), std::move(v)); }

void Value::erase(std::string_view key) { as_object().erase(std::string(key)); }

std::string canonical_text(const Value& value) {
    std::string out;
    write_value(out, value);
    return out;
}

Bytes canonical_bytes(const Value& value) {
    std::string text = canonical_text(value);
    return Bytes(text.begin(), text.end());
}

Value parse_canonical(std::string_view text) { return StrictParser(text).parse_document(); }

Value parse_canonical(ByteView bytes) {
    return parse_canonical(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

bool is_profile_string(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        std::uint32_t cp = 0;
        if (!decode_utf8(s, i, cp)) return false;
        if (cp >= 0x300 && nfc_rejected(cp)) return false;
    }
    return true;
}

} // namespace credlab
