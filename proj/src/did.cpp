#include "credlab/did.hpp"

#include <algorithm>

#include "credlab/errors.hpp"

namespace credlab {

namespace {

bool valid_method(std::string_view m) {
    if (m.empty()) return false;
    return std::all_of(m.begin(), m.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); });
}

bool valid_method_id(std::string_view id) {
    if (id.empty()) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' ||
               c == '_' || c == '-';
    });
}

Value endpoint_to_value(const ServiceEndpoint& ep) {
    Value::Object o;
    o.emplace("id", ep.id);
    o.emplace("type", ep.type);
    o.emplace("url", ep.url);
    return Value(std::move(o));
}

ServiceEndpoint endpoint_from_value(const Value& v) {
    ServiceEndpoint ep;
    ep.id = v.at("id").as_string();
    ep.type = v.at("type").as_string();
    ep.url = v.at("url").as_string();
    return ep;
}

} // namespace

Did Did::parse(std::string_view text) { return parse_did(text); }

Did parse_did(std::string_view text) {
    if (text.substr(0, 4) != "did:") {
        raise(ErrorCode::MalformedDid, "missing did: prefix in \"" + std::string(text) + "\"");
    }
    std::string_view rest = text.substr(4);
    std::size_t colon = rest.find(':');
    if (colon == std::string_view::npos) {
        raise(ErrorCode::MalformedDid, "missing method separator in \"" + std::string(text) + "\"");
    }
    std::string_view method = rest.substr(0, colon);
    std::string_view method_id = rest.substr(colon + 1);
    if (!valid_method(method) || !valid_method_id(method_id)) {
        raise(ErrorCode::MalformedDid, "bad method or method id in \"" + std::string(text) + "\"");
    }
    return Did{std::string(method), std::string(method_id)};
}

void DidDocument::validate() const {
    if (version < 1) {
        raise(ErrorCode::MalformedDocument, "document version must be >= 1");
    }
    for (const auto& auth : authentication) {
        if (!find_method(auth)) {
            raise(ErrorCode::MalformedDocument, "authentication references unknown method: " + auth);
        }
    }
}

const VerificationMethod* DidDocument::find_method(std::string_view method_id) const {
    for (const auto& vm : verification_methods) {
        if (vm.id == method_id) return &vm;
    }
    return nullptr;
}

bool DidDocument::has_endpoint_type(std::string_view type) const {
    return std::any_of(service_endpoints.begin(), service_endpoints.end(),
                       [&](const ServiceEndpoint& ep) { return ep.type == type; });
}

Value DidDocument::to_value() const {
    Value::Object o;
    Value::Array auth;
    for (const auto& a : authentication) auth.emplace_back(a);
    o.emplace("authentication", std::move(auth));
    o.emplace("id", id.str());
    Value::Array services;
    for (const auto& ep : service_endpoints) services.push_back(endpoint_to_value(ep));
    o.emplace("service", std::move(services));
    o.emplace("updatedAt", updated_at.str());
    Value::Array methods;
    for (const auto& vm : verification_methods) {
        Value::Object m;
        m.emplace("algorithm", vm.algorithm);
        m.emplace("id", vm.id);
        m.emplace("publicKey", vm.public_key.hex());
        methods.push_back(Value(std::move(m)));
    }
    o.emplace("verificationMethod", std::move(methods));
    o.emplace("version", static_cast<std::int64_t>(version));
    return Value(std::move(o));
}

DidDocument DidDocument::from_value(const Value& value) {
    DidDocument doc;
    doc.id = parse_did(value.at("id").as_string());
    for (const Value& m : value.at("verificationMethod").as_array()) {
        VerificationMethod vm;
        vm.id = m.at("id").as_string();
        vm.public_key = Ed25519PublicKey::from_hex(m.at("publicKey").as_string());
        vm.algorithm = m.at("algorithm").as_string();
        doc.verification_methods.push_back(std::move(vm));
    }
    for (const Value& a : value.at("authentication").as_array()) {
        doc.authentication.push_back(a.as_string());
    }
    for (const Value& s : value.at("service").as_array()) {
        doc.service_endpoints.push_back(endpoint_from_value(s));
    }
    std::int64_t v = value.at("version").as_integer();
    if (v < 1) raise(ErrorCode::MalformedDocument, "document version must be >= 1");
    doc.version = static_cast<std::uint64_t>(v);
    doc.updated_at = Timestamp::parse(value.at("updatedAt").as_string());
    doc.validate();
    return doc;
}

DidDocument make_key_document(const Did& did, const Ed25519PublicKey& pk, Timestamp updated_at) {
    DidDocument doc;
    doc.id = did;
    std::string key_id = did.str() + "#key-1";
    doc.verification_methods.push_back(VerificationMethod{key_id, pk});
    doc.authentication.push_back(key_id);
    doc.version = 1;
    doc.updated_at = updated_at;
    return doc;
}

std::pair<Did, DidDocument> did_key_from_public_key(ByteView public_key) {
    if (public_key.size() != 32) {
        raise(ErrorCode::InvalidKey, "expected a 32-byte Ed25519 public key, got " +
                                         std::to_string(public_key.size()) + " bytes");
    }
    Ed25519PublicKey pk;
    std::copy(public_key.begin(), public_key.end(), pk.bytes.begin());
    return did_key_from_public_key(pk);
}

std::pair<Did, DidDocument> did_key_from_public_key(const Ed25519PublicKey& public_key) {
    Bytes multicodec;
    multicodec.reserve(34);
    multicodec.push_back(0xED); // multicodec ed25519-pub
    multicodec.push_back(0x01);
    multicodec.insert(multicodec.end(), public_key.bytes.begin(), public_key.bytes.end());
    Did did{"key", "z" + base58btc_encode(multicodec)};
    // did:key documents are derived, not published; they carry a fixed epoch
    // timestamp so derivation is deterministic.
    return {did, make_key_document(did, public_key, Timestamp::from_epoch_seconds(0))};
}

std::optional<Ed25519PublicKey> did_key_public_key(const Did& did) {
    if (did.method != "key" || did.method_id.size() < 2 || did.method_id[0] != 'z') return std::nullopt;
    Bytes raw;
    try {
        raw = base58btc_decode(std::string_view(did.method_id).substr(1));
    } catch (const Error&) {
        return std::nullopt;
    }
    if (raw.size() != 34 || raw[0] != 0xED || raw[1] != 0x01) return std::nullopt;
    Ed25519PublicKey pk;
    std::copy(raw.begin() + 2, raw.end(), pk.bytes.begin());
    return pk;
}

std::optional<DidDocument> StubResolver::resolve(const Did& did) const {
    for (const auto& doc : docs_) {
        if (doc.id == did) return doc;
    }
    if (auto pk = did_key_public_key(did)) {
        return did_key_from_public_key(*pk).second;
    }
    return std::nullopt;
}

} // namespace credlab
