#include "credlab/credential.hpp"

#include <algorithm>

#include "credlab/errors.hpp"

namespace credlab {

namespace {

constexpr const char* kSubjectFields[] = {"IgG", "IgM", "birthDate", "familyName", "givenName", "image"};

bool is_known_subject_field(std::string_view name) {
    return name == "id" ||
           std::any_of(std::begin(kSubjectFields), std::end(kSubjectFields),
                       [&](const char* f) { return name == f; });
}

Value claims_to_subject_value(const Did& subject_did, const std::map<std::string, ClaimValue>& claims) {
    Value::Object subject;
    subject.emplace("id", subject_did.str());
    for (const auto& [name, value] : claims) {
        if (name == "id") {
            raise(ErrorCode::InvalidBody, "claim name 'id' collides with the subject identifier");
        }
        subject.emplace(name, value.to_value());
    }
    return Value(std::move(subject));
}

} // namespace

ClaimValue ClaimValue::bytes(Bytes b) {
    if (b.size() > kMaxClaimBytes) {
        raise(ErrorCode::InvalidBody, "byte claim exceeds 1 MiB");
    }
    return ClaimValue(std::move(b));
}

Value ClaimValue::to_value() const {
    switch (kind()) {
    case ClaimKind::Text: return Value(as_text());
    case ClaimKind::Flag: return Value(as_flag());
    case ClaimKind::Date: return Value(as_date().str());
    case ClaimKind::DateTime: return Value(as_datetime().str());
    case ClaimKind::Bytes: return Value(to_hex(as_bytes()));
    }
    raise(ErrorCode::InvalidBody, "unreachable claim kind");
}

ClaimValue ClaimValue::from_value(const Value& v, ClaimKind kind) {
    switch (kind) {
    case ClaimKind::Text: return text(v.as_string());
    case ClaimKind::Flag: return flag(v.as_bool());
    case ClaimKind::Date: return date(Date::parse(v.as_string()));
    case ClaimKind::DateTime: return datetime(Timestamp::parse(v.as_string()));
    case ClaimKind::Bytes: return bytes(from_hex(v.as_string()));
    }
    raise(ErrorCode::InvalidBody, "unreachable claim kind");
}

const std::map<std::string, ClaimKind>& card_claim_schema() {
    static const std::map<std::string, ClaimKind> schema = {
        {"IgG", ClaimKind::Flag},      {"IgM", ClaimKind::Flag},        {"birthDate", ClaimKind::Date},
        {"familyName", ClaimKind::Text}, {"givenName", ClaimKind::Text}, {"image", ClaimKind::Bytes},
    };
    return schema;
}

bool is_card_claim_field(std::string_view name) {
    return card_claim_schema().count(std::string(name)) > 0;
}

void CredentialBody::validate() const {
    if (id.empty()) {
        raise(ErrorCode::InvalidBody, "credential id must be non-empty");
    }
    auto has_type = [&](const char* t) {
        return std::find(credential_types.begin(), credential_types.end(), t) != credential_types.end();
    };
    if (!has_type(kTypeVerifiableCredential) || !has_type(kTypeImmunityCard)) {
        raise(ErrorCode::InvalidBody, "type list must contain the base and card types");
    }
    if (!(issuance_date < expiration_date)) {
        raise(ErrorCode::InvalidBody, "issuance date must precede expiration date");
    }
    for (const auto& [name, kind] : card_claim_schema()) {
        auto it = claims.find(name);
        if (it == claims.end()) {
            if (name == "image") continue; // optional photo digest
            raise(ErrorCode::InvalidBody, "missing card claim: " + name);
        }
        if (it->second.kind() != kind) {
            raise(ErrorCode::InvalidBody, "claim " + name + " has the wrong kind");
        }
    }
    for (const auto& [name, value] : claims) {
        if (!is_card_claim_field(name)) {
            raise(ErrorCode::InvalidBody, "claim outside the card schema: " + name);
        }
        if (value.kind() == ClaimKind::Bytes && value.as_bytes().size() > kMaxClaimBytes) {
            raise(ErrorCode::InvalidBody, "byte claim exceeds 1 MiB");
        }
    }
}

Value CredentialBody::to_value() const {
    Value::Object o;
    o.emplace("credentialSubject", claims_to_subject_value(subject_did, claims));
    o.emplace("expirationDate", expiration_date.str());
    o.emplace("id", id);
    o.emplace("issuanceDate", issuance_date.str());
    o.emplace("issuer", issuer_did.str());
    Value::Array types;
    for (const auto& t : credential_types) types.emplace_back(t);
    o.emplace("type", std::move(types));
    return Value(std::move(o));
}

CredentialBody CredentialBody::from_value(const Value& value) {
    CredentialBody body;
    body.id = value.at("id").as_string();
    for (const Value& t : value.at("type").as_array()) body.credential_types.push_back(t.as_string());
    body.issuer_did = parse_did(value.at("issuer").as_string());
    body.issuance_date = Timestamp::parse(value.at("issuanceDate").as_string());
    body.expiration_date = Timestamp::parse(value.at("expirationDate").as_string());
    const Value& subject = value.at("credentialSubject");
    body.subject_did = parse_did(subject.at("id").as_string());
    const auto& schema = card_claim_schema();
    for (const auto& [name, v] : subject.as_object()) {
        if (name == "id") continue;
        auto it = schema.find(name);
        if (it == schema.end()) {
            raise(ErrorCode::InvalidBody, "claim outside the card schema: " + name);
        }
        body.claims.emplace(name, ClaimValue::from_value(v, it->second));
    }
    body.validate();
    return body;
}

Value Proof::to_value() const {
    Value::Object o;
    o.emplace("algorithm", algorithm);
    o.emplace("attachment", attachment == ProofAttachment::Embedded ? "embedded" : "detached");
    if (attachment == ProofAttachment::Detached) {
        if (!body_digest) {
            raise(ErrorCode::InvalidBody, "detached proof requires a body digest");
        }
        o.emplace("bodyDigest", body_digest->hex());
    }
    o.emplace("created", created.str());
    o.emplace("signature", signature.hex());
    o.emplace("verificationMethod", verification_method);
    return Value(std::move(o));
}

Proof Proof::from_value(const Value& value) {
    Proof p;
    p.algorithm = value.at("algorithm").as_string();
    if (p.algorithm != kProofAlgorithm) {
        raise(ErrorCode::MalformedDocument, "unknown proof algorithm: " + p.algorithm);
    }
    const std::string& mode = value.at("attachment").as_string();
    if (mode == "embedded") {
        p.attachment = ProofAttachment::Embedded;
    } else if (mode == "detached") {
        p.attachment = ProofAttachment::Detached;
        p.body_digest = Digest32::from_hex(value.at("bodyDigest").as_string());
    } else {
        raise(ErrorCode::MalformedDocument, "unknown proof attachment: " + mode);
    }
    p.created = Timestamp::parse(value.at("created").as_string());
    p.signature = Signature::from_hex(value.at("signature").as_string());
    p.verification_method = value.at("verificationMethod").as_string();
    return p;
}

Value VerifiableCredential::to_value() const {
    Value v = body.to_value();
    v.set("proof", proof.to_value());
    return v;
}

VerifiableCredential VerifiableCredential::from_value(const Value& value) {
    VerifiableCredential vc;
    vc.proof = Proof::from_value(value.at("proof"));
    Value body_only = value;
    body_only.erase("proof");
    vc.body = CredentialBody::from_value(body_only);
    return vc;
}

Bytes canonicalize(const CredentialBody& body) {
    body.validate();
    return canonical_bytes(body.to_value());
}

CredentialBody parse_body(ByteView bytes) { return CredentialBody::from_value(parse_canonical(bytes)); }

VerifiableCredential sign_credential(const CredentialBody& body, const Ed25519Keypair& issuer_key,
                                     ProofAttachment mode, Timestamp created, std::string verification_method) {
    Bytes message = canonicalize(body);
    VerifiableCredential vc;
    vc.body = body;
    vc.proof.algorithm = kProofAlgorithm;
    vc.proof.verification_method =
        verification_method.empty() ? body.issuer_did.str() + "#key-1" : std::move(verification_method);
    vc.proof.created = created;
    vc.proof.attachment = mode;
    vc.proof.signature = ed25519_sign(issuer_key.secret_key, message);
    if (mode == ProofAttachment::Detached) {
        vc.proof.body_digest = sha256(message);
    }
    return vc;
}

namespace {

struct RawCredential {
    Value body; // received document minus "proof"
    std::optional<Proof> proof;
    Did issuer;
    Did subject;
    Timestamp expiration;
};

RawCredential split_document(const Value& doc) {
    RawCredential raw;
    raw.body = doc;
    raw.body.erase("proof");
    if (const Value* p = doc.find("proof")) {
        raw.proof = Proof::from_value(*p);
    }
    raw.issuer = parse_did(raw.body.at("issuer").as_string());
    raw.subject = parse_did(raw.body.at("credentialSubject").at("id").as_string());
    raw.expiration = Timestamp::parse(raw.body.at("expirationDate").as_string());
    return raw;
}

std::optional<VerificationMethod> resolve_method(const RawCredential& raw, const DidResolver& resolver,
                                                 Verdict& failure) {
    auto issuer_doc = resolver.resolve(raw.issuer);
    if (!issuer_doc) {
        failure = Verdict::reject(RejectReason::ResolutionFailure, "cannot resolve " + raw.issuer.str());
        return std::nullopt;
    }
    const VerificationMethod* vm = issuer_doc->find_method(raw.proof->verification_method);
    if (!vm || vm->algorithm != "ed25519") {
        failure = Verdict::reject(RejectReason::UnknownVerificationMethod,
                                  raw.proof->verification_method + " is not a key of " + raw.issuer.str());
        return std::nullopt;
    }
    return *vm;
}

Verdict verify_strict(const RawCredential& raw, const DidResolver& resolver, Timestamp now) {
    if (!raw.proof) {
        return Verdict::reject(RejectReason::SignatureMismatch, "document carries no proof");
    }
    Verdict failure = Verdict::accept();
    auto vm = resolve_method(raw, resolver, failure);
    if (!vm) return failure;

    Bytes body_bytes = canonical_bytes(raw.body);
    if (raw.proof->attachment == ProofAttachment::Detached) {
        if (!raw.proof->body_digest || *raw.proof->body_digest != sha256(body_bytes)) {
            return Verdict::reject(RejectReason::SignatureMismatch, "detached digest does not name this body");
        }
    }
    if (!ed25519_verify(vm->public_key, body_bytes, raw.proof->signature)) {
        return Verdict::reject(RejectReason::SignatureMismatch, "signature does not cover the received bytes");
    }
    if (now >= raw.expiration) {
        return Verdict::reject(RejectReason::Expired, "credential expired " + raw.expiration.str());
    }
    return Verdict::accept();
}

Verdict verify_permissive(const RawCredential& raw, const DidResolver& resolver, const RegistryChain* chain,
                          SeenDigestLedger* seen) {
    Digest32 body_digest = sha256(canonical_bytes(raw.body));

    if (!raw.proof) {
        // Signature-exclusion pitfall: an on-chain anchor for the subject is
        // taken as vouching for the proofless document.
        if (chain && !anchors_for(*chain, raw.subject).empty()) {
            if (seen) seen->record(body_digest);
            return Verdict::accept();
        }
        return Verdict::reject(RejectReason::SignatureMismatch, "no proof and no anchor to fall back on");
    }

    // Re-attachment pitfall: a detached proof naming a digest this verifier
    // has already accepted passes without any signature recomputation.
    if (raw.proof->attachment == ProofAttachment::Detached && raw.proof->body_digest && seen &&
        seen->contains(*raw.proof->body_digest)) {
        return Verdict::accept();
    }

    Verdict failure = Verdict::accept();
    auto vm = resolve_method(raw, resolver, failure);
    if (!vm) return failure;

    // Full-body check first, so everything strict accepts is accepted here.
    Bytes body_bytes = canonical_bytes(raw.body);
    if (ed25519_verify(vm->public_key, body_bytes, raw.proof->signature)) {
        if (seen) seen->record(sha256(body_bytes));
        return Verdict::accept();
    }
    // Schema projection: only the known fields are treated as signed; raw
    // extras ride along for display.
    Bytes projected = canonical_bytes(project_to_schema(raw.body));
    if (ed25519_verify(vm->public_key, projected, raw.proof->signature)) {
        if (seen) seen->record(sha256(body_bytes));
        return Verdict::accept();
    }
    return Verdict::reject(RejectReason::SignatureMismatch, "signature covers neither body nor projection");
}

} // namespace

Value project_to_schema(const Value& document_body) {
    Value::Object projected;
    for (const char* field : {"expirationDate", "id", "issuanceDate", "issuer", "type"}) {
        if (const Value* v = document_body.find(field)) projected.emplace(field, *v);
    }
    if (const Value* subject = document_body.find("credentialSubject")) {
        if (subject->is_object()) {
            Value::Object sub;
            for (const auto& [name, v] : subject->as_object()) {
                if (is_known_subject_field(name)) sub.emplace(name, v);
            }
            projected.emplace("credentialSubject", Value(std::move(sub)));
        }
    }
    return Value(std::move(projected));
}

Verdict verify_credential_document(ByteView document, const DidResolver& resolver, VerifyProfile profile,
                                   Timestamp now, const RegistryChain* chain, SeenDigestLedger* seen) {
    RawCredential raw;
    try {
        raw = split_document(parse_canonical(document));
    } catch (const Error& e) {
        return Verdict::reject(RejectReason::MalformedDocument, e.what());
    }
    if (profile == VerifyProfile::Strict) {
        return verify_strict(raw, resolver, now);
    }
    return verify_permissive(raw, resolver, chain, seen);
}

Verdict verify_credential(const VerifiableCredential& vc, const DidResolver& resolver, VerifyProfile profile,
                          Timestamp now, const RegistryChain* chain, SeenDigestLedger* seen) {
    return verify_credential_document(vc.to_bytes(), resolver, profile, now, chain, seen);
}

} // namespace credlab
