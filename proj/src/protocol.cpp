#include "credlab/protocol.hpp"

#include "credlab/errors.hpp"

namespace credlab {

namespace {

template <std::size_t N>
std::array<std::uint8_t, N> fixed_from_hex(const std::string& hex, const char* what) {
    Bytes raw = from_hex(hex);
    if (raw.size() != N) {
        raise(ErrorCode::MalformedDocument, std::string(what) + ": wrong length");
    }
    std::array<std::uint8_t, N> out{};
    std::copy(raw.begin(), raw.end(), out.begin());
    return out;
}

struct Registration {
    Did did;
    Ed25519Keypair keys;
};

Registration publish_actor(std::string_view name, RegistryChain& chain, const std::vector<Authority>& authorities,
                           Timestamp now, RandomSource& rng, const std::optional<ServiceEndpoint>& endpoint) {
    Registration reg;
    reg.keys = Ed25519Keypair::generate(rng);
    reg.did = Did::sim(name);
    DidDocument doc = make_key_document(reg.did, reg.keys.public_key, now);
    if (endpoint) {
        doc.service_endpoints.push_back(*endpoint);
    }
    chain = append_block(chain, {DidDocPublish{std::move(doc)}}, authorities, now);
    return reg;
}

Value anchor_secret_to_value(const AnchorSecret& secret) {
    Value::Object o;
    if (const auto* salt = std::get_if<Salt32>(&secret)) {
        o.emplace("kind", "salt");
        o.emplace("salt", to_hex(*salt));
    } else {
        o.emplace("key", std::get<X25519SecretKey>(secret).hex());
        o.emplace("kind", "decryptionKey");
    }
    return Value(std::move(o));
}

AnchorSecret anchor_secret_from_value(const Value& v) {
    const std::string& kind = v.at("kind").as_string();
    if (kind == "salt") {
        return fixed_from_hex<32>(v.at("salt").as_string(), "salt");
    }
    if (kind == "decryptionKey") {
        return X25519SecretKey::from_hex(v.at("key").as_string());
    }
    raise(ErrorCode::MalformedDocument, "unknown anchor secret kind: " + kind);
}

} // namespace

Bytes Challenge::core_bytes() const {
    Value::Object o;
    o.emplace("expiresAt", expires_at.str());
    o.emplace("nonce", to_hex(nonce));
    o.emplace("verifierDid", verifier_did.str());
    return canonical_bytes(Value(std::move(o)));
}

Value Challenge::to_value() const {
    Value::Object o;
    o.emplace("expiresAt", expires_at.str());
    o.emplace("nonce", to_hex(nonce));
    o.emplace("verifierDid", verifier_did.str());
    if (verifier_signature) {
        o.emplace("verifierSignature", verifier_signature->hex());
    }
    return Value(std::move(o));
}

Challenge Challenge::from_value(const Value& value) {
    Challenge c;
    c.nonce = fixed_from_hex<16>(value.at("nonce").as_string(), "nonce");
    c.verifier_did = parse_did(value.at("verifierDid").as_string());
    c.expires_at = Timestamp::parse(value.at("expiresAt").as_string());
    if (const Value* sig = value.find("verifierSignature")) {
        c.verifier_signature = Signature::from_hex(sig->as_string());
    }
    return c;
}

Value Presentation::to_value() const {
    Value::Object o;
    o.emplace("credential", credential.to_value());
    if (disclosed_secret) {
        o.emplace("disclosedSecret", anchor_secret_to_value(*disclosed_secret));
    }
    if (holder_proof) {
        Value::Object hp;
        hp.emplace("challenge", holder_proof->challenge.to_value());
        hp.emplace("signature", holder_proof->signature.hex());
        o.emplace("holderProof", Value(std::move(hp)));
    }
    return Value(std::move(o));
}

Presentation Presentation::from_value(const Value& value) {
    Presentation p;
    p.credential = VerifiableCredential::from_value(value.at("credential"));
    if (const Value* secret = value.find("disclosedSecret")) {
        p.disclosed_secret = anchor_secret_from_value(*secret);
    }
    if (const Value* hp = value.find("holderProof")) {
        HolderProof proof;
        proof.challenge = Challenge::from_value(hp->at("challenge"));
        proof.signature = Signature::from_hex(hp->at("signature").as_string());
        p.holder_proof = proof;
    }
    return p;
}

HospitalState register_hospital(std::string_view name, RegistryChain& chain,
                                const std::vector<Authority>& authorities, Timestamp now, RandomSource& rng,
                                std::string endpoint_url) {
    if (endpoint_url.empty()) {
        endpoint_url = "https://" + std::string(name) + ".example.org/testing";
    }
    Did did = Did::sim(name);
    ServiceEndpoint endpoint{did.str() + "#covid-testing", kCovidTestingEndpointType, std::move(endpoint_url)};
    Registration reg = publish_actor(name, chain, authorities, now, rng, endpoint);
    return HospitalState{reg.did, reg.keys};
}

HolderState register_patient(std::string_view name, RegistryChain& chain, const std::vector<Authority>& authorities,
                             Timestamp now, RandomSource& rng) {
    Registration reg = publish_actor(name, chain, authorities, now, rng, std::nullopt);
    return HolderState{reg.did, reg.keys, std::nullopt, std::nullopt};
}

VerifierState register_verifier(std::string_view name, RegistryChain& chain,
                                const std::vector<Authority>& authorities, Timestamp now, RandomSource& rng) {
    Registration reg = publish_actor(name, chain, authorities, now, rng, std::nullopt);
    return VerifierState{reg.did, reg.keys, {}, {}};
}

VerifiableCredential issue_test_result(const HospitalState& hospital, const Did& patient,
                                       const IdentityFields& identity, bool igm, bool igg, Timestamp now) {
    if (identity.photo_digest == Digest32{}) {
        raise(ErrorCode::InvalidBody, "identity check requires a photo digest");
    }
    CredentialBody body;
    Digest32 id_digest = sha256(concat({as_bytes(hospital.did.str()), as_bytes(patient.str()), as_bytes(now.str())}));
    body.id = "urn:immunity-card:" + id_digest.hex().substr(0, 16);
    body.credential_types = {kTypeVerifiableCredential, kTypeImmunityCard};
    body.issuer_did = hospital.did;
    body.issuance_date = now;
    body.expiration_date = now.plus_days(365);
    body.subject_did = patient;
    body.claims.emplace("givenName", ClaimValue::text(identity.given_name));
    body.claims.emplace("familyName", ClaimValue::text(identity.family_name));
    body.claims.emplace("birthDate", ClaimValue::date(identity.birth_date));
    body.claims.emplace("IgM", ClaimValue::flag(igm));
    body.claims.emplace("IgG", ClaimValue::flag(igg));
    body.claims.emplace("image", ClaimValue::bytes(Bytes(identity.photo_digest.bytes.begin(),
                                                         identity.photo_digest.bytes.end())));
    return sign_credential(body, hospital.keys, ProofAttachment::Embedded, now);
}

Bytes anchor_preimage(const VerifiableCredential& vc) {
    return concat({ByteView(canonicalize(vc.body)), vc.proof.signature.view()});
}

void anchor_credential(HolderState& holder, Profile profile, AnchorMode mode, RegistryChain& chain,
                       const std::vector<Authority>& authorities, Timestamp now, RandomSource& rng) {
    if (!holder.credential) {
        raise(ErrorCode::MissingCredential, "holder has no credential to anchor");
    }
    Bytes preimage = anchor_preimage(*holder.credential);
    AnchorPayload payload;
    if (profile == Profile::Baseline) {
        payload = PlainHashAnchor{sha256(preimage)};
        holder.anchor_secret.reset();
    } else if (mode == AnchorMode::Salted) {
        SaltedCommitment c = commit(preimage, rng);
        payload = SaltedCommitmentAnchor{c.commitment};
        holder.anchor_secret = c.salt;
    } else {
        // Fresh recipient keypair per anchor so disclosing the decryption key
        // later never exposes anything else.
        X25519Keypair recipient = X25519Keypair::generate(rng);
        payload = seal(sha256(preimage), recipient.public_key, rng);
        holder.anchor_secret = recipient.secret_key;
    }
    chain = append_block(chain, {CredentialAnchor{std::move(payload), holder.did}}, authorities, now);
}

Challenge make_challenge(const VerifierState& verifier, Profile profile, Timestamp now, RandomSource& rng,
                         std::int64_t ttl_seconds) {
    Challenge c;
    c.nonce = rng.array<16>();
    c.verifier_did = verifier.did;
    c.expires_at = now.plus_seconds(ttl_seconds);
    if (profile == Profile::Hardened) {
        c.verifier_signature = ed25519_sign(verifier.keys.secret_key, c.core_bytes());
    }
    return c;
}

Presentation present(const HolderState& holder, const Did& verifier_did, const std::optional<Challenge>& challenge,
                     Profile profile, const RegistryChain& chain, Timestamp now) {
    if (!holder.credential) {
        raise(ErrorCode::MissingCredential, "holder has no credential to present");
    }
    Presentation p;
    p.credential = *holder.credential;
    p.disclosed_secret = holder.anchor_secret;

    if (profile == Profile::Baseline) {
        // No key material operations: the credential is handed over as-is.
        return p;
    }

    if (!challenge) {
        raise(ErrorCode::InvalidChallenge, "hardened presentation requires a challenge");
    }
    if (!challenge->verifier_signature) {
        raise(ErrorCode::InvalidChallenge, "challenge is unsigned");
    }
    if (challenge->verifier_did != verifier_did) {
        raise(ErrorCode::InvalidChallenge, "challenge was issued by a different verifier");
    }
    if (now >= challenge->expires_at) {
        raise(ErrorCode::InvalidChallenge, "challenge has expired");
    }
    DidDocument verifier_doc;
    try {
        verifier_doc = resolve(verifier_did, chain);
    } catch (const Error&) {
        raise(ErrorCode::InvalidChallenge, "cannot resolve the challenging verifier");
    }
    bool signature_ok = false;
    for (const auto& vm : verifier_doc.verification_methods) {
        if (ed25519_verify(vm.public_key, challenge->core_bytes(), *challenge->verifier_signature)) {
            signature_ok = true;
            break;
        }
    }
    if (!signature_ok) {
        raise(ErrorCode::InvalidChallenge, "challenge signature does not verify under the verifier's keys");
    }

    HolderProof proof;
    proof.challenge = *challenge;
    proof.signature = ed25519_sign(holder.keys.secret_key,
                                   concat({ByteView(canonicalize(p.credential.body)), challenge->core_bytes()}));
    p.holder_proof = proof;
    return p;
}

namespace {

struct CheckRecorder {
    std::vector<CheckResult> checks;
    std::optional<RejectReason> first_failure;
    std::string first_detail;

    void add(std::string name, bool passed, RejectReason fail_reason, std::string detail) {
        checks.push_back(CheckResult{std::move(name), passed, detail});
        if (!passed && !first_failure) {
            first_failure = fail_reason;
            first_detail = std::move(detail);
        }
    }

    VerifierDecision decision() const {
        VerifierDecision d;
        d.checks = checks;
        if (first_failure) {
            d.verdict = Verdict::reject(*first_failure, first_detail);
        } else {
            d.verdict = Verdict::accept();
        }
        return d;
    }
};

bool anchor_matches(const Presentation& p, const RegistryChain& chain, std::string& detail) {
    Bytes preimage = anchor_preimage(p.credential);
    Digest32 plain_digest = sha256(preimage);

    if (!p.disclosed_secret) {
        if (find_anchor(chain, plain_digest)) {
            detail = "plain anchor found";
            return true;
        }
        detail = "no anchor matches the presented credential";
        return false;
    }
    if (const auto* salt = std::get_if<Salt32>(&*p.disclosed_secret)) {
        Digest32 commitment = sha256(concat({*salt, preimage}));
        if (find_anchor(chain, commitment)) {
            detail = "salted commitment opens to the presented credential";
            return true;
        }
        detail = "disclosed salt does not open any on-chain commitment";
        return false;
    }
    const auto& key = std::get<X25519SecretKey>(*p.disclosed_secret);
    for (const auto& [loc, anchor] : anchors_for(chain, p.credential.body.subject_did)) {
        const auto* sealed = std::get_if<SealedCiphertextAnchor>(&anchor.anchor);
        if (!sealed) continue;
        try {
            if (open_sealed(*sealed, key) == plain_digest) {
                detail = "sealed anchor opens to the presented credential";
                return true;
            }
        } catch (const Error&) {
            // wrong key for this anchor; keep scanning
        }
    }
    detail = "disclosed key opens no sealed anchor for this subject";
    return false;
}

} // namespace

VerifierDecision verify_presentation(VerifierState& verifier, const Presentation& presentation,
                                     const RegistryChain& chain, Timestamp now, Profile profile,
                                     const DidResolver* resolver_override) {
    CheckRecorder rec;
    RegistryResolver chain_resolver(chain);
    const DidResolver& resolver = resolver_override ? *resolver_override : chain_resolver;

    Verdict issuer = verify_credential(presentation.credential, resolver, VerifyProfile::Strict, now);
    // Expiry is reported as its own check below; other strict failures are
    // issuer-signature failures.
    bool issuer_ok = issuer.accepted || issuer.reason == RejectReason::Expired;
    rec.add("issuer-signature", issuer_ok, issuer.reason.value_or(RejectReason::SignatureMismatch),
            issuer_ok ? "strict verification passed" : issuer.detail);

    std::string anchor_detail;
    bool anchored = anchor_matches(presentation, chain, anchor_detail);
    rec.add("anchor-match", anchored, RejectReason::AnchorMismatch, anchor_detail);

    bool unexpired = now < presentation.credential.body.expiration_date;
    rec.add("expiry", unexpired, RejectReason::Expired,
            unexpired ? "credential within validity window"
                      : "credential expired " + presentation.credential.body.expiration_date.str());

    if (profile == Profile::Hardened) {
        // Holder binding: the proof key must belong to the subject's resolved
        // document and the signature must cover credential and challenge.
        bool binding_ok = false;
        std::string binding_detail;
        if (!presentation.holder_proof) {
            binding_detail = "presentation carries no holder proof";
        } else {
            auto subject_doc = resolver.resolve(presentation.credential.body.subject_did);
            if (!subject_doc) {
                binding_detail = "cannot resolve the subject's document";
            } else {
                Bytes message = concat({ByteView(canonicalize(presentation.credential.body)),
                                        presentation.holder_proof->challenge.core_bytes()});
                for (const auto& vm : subject_doc->verification_methods) {
                    if (ed25519_verify(vm.public_key, message, presentation.holder_proof->signature)) {
                        binding_ok = true;
                        break;
                    }
                }
                binding_detail = binding_ok ? "holder proof verifies under the subject's key"
                                            : "holder proof does not verify under any subject key";
            }
        }
        rec.add("holder-binding", binding_ok, RejectReason::HolderBindingFailure, binding_detail);

        bool freshness_ok = false;
        RejectReason freshness_reason = RejectReason::InvalidChallenge;
        std::string freshness_detail;
        if (!presentation.holder_proof) {
            freshness_detail = "no challenge to check";
        } else {
            const Challenge& ch = presentation.holder_proof->challenge;
            if (ch.verifier_did != verifier.did) {
                freshness_detail = "challenge was issued for " + ch.verifier_did.str();
            } else if (!ch.verifier_signature ||
                       !ed25519_verify(verifier.keys.public_key, ch.core_bytes(), *ch.verifier_signature)) {
                freshness_detail = "challenge is not one this verifier signed";
            } else if (now >= ch.expires_at) {
                freshness_detail = "challenge expired " + ch.expires_at.str();
            } else if (verifier.seen_nonces.count(ch.nonce)) {
                freshness_reason = RejectReason::ReplayedChallenge;
                freshness_detail = "nonce already consumed";
            } else {
                freshness_ok = true;
                freshness_detail = "challenge fresh and single-use";
            }
        }
        rec.add("challenge-freshness", freshness_ok, freshness_reason, freshness_detail);
    }

    VerifierDecision decision = rec.decision();
    if (decision.verdict.accepted && profile == Profile::Hardened && presentation.holder_proof) {
        verifier.seen_nonces.insert(presentation.holder_proof->challenge.nonce);
    }
    return decision;
}

} // namespace credlab
