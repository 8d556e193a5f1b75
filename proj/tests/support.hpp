#pragma once

// Shared fixtures and randomized generators for the test suites.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "credlab/attacks.hpp"
#include "credlab/scenario.hpp"

namespace credlab::testing {

inline std::filesystem::path source_dir() { return CREDLAB_SOURCE_DIR; }

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --- golden fixture -------------------------------------------------------

/// Issuer keypair behind the checked-in credential fixture. The seed is
/// arbitrary but frozen; change it and the fixture must be regenerated.
inline Ed25519Keypair golden_issuer_keypair() {
    return Ed25519Keypair::from_seed(sha256(as_bytes("immunity-card fixture issuer")).bytes);
}

inline Did golden_issuer_did() { return parse_did("did:web:vc.transmute.world"); }

inline Did golden_subject_did() {
    return parse_did("did:key:z6MkjRagNiMu91DduvCvgEsqLZDVzrJzFrwahc4tXLt9DoHd");
}

inline Digest32 golden_photo_digest() { return sha256(as_bytes("photo:Louis:Pasteur")); }

inline CredentialBody golden_body() {
    CredentialBody body;
    body.id = "http://example.com/credential/123";
    body.credential_types = {kTypeVerifiableCredential, kTypeImmunityCard};
    body.issuer_did = golden_issuer_did();
    body.issuance_date = Timestamp::parse("2019-12-11T03:50:55Z");
    body.expiration_date = Timestamp::parse("2020-12-11T03:50:55Z");
    body.subject_did = golden_subject_did();
    body.claims.emplace("givenName", ClaimValue::text("Louis"));
    body.claims.emplace("familyName", ClaimValue::text("Pasteur"));
    body.claims.emplace("birthDate", ClaimValue::date(Date::from_ymd(1958, 7, 17)));
    body.claims.emplace("IgM", ClaimValue::flag(false));
    body.claims.emplace("IgG", ClaimValue::flag(true));
    Digest32 photo = golden_photo_digest();
    body.claims.emplace("image", ClaimValue::bytes(Bytes(photo.bytes.begin(), photo.bytes.end())));
    return body;
}

inline VerifiableCredential golden_credential() {
    return sign_credential(golden_body(), golden_issuer_keypair(), ProofAttachment::Embedded,
                           Timestamp::parse("2019-12-11T03:50:55Z"));
}

/// Resolver that knows the fixture's foreign-method issuer.
inline StubResolver golden_resolver() {
    StubResolver resolver;
    resolver.add(make_key_document(golden_issuer_did(), golden_issuer_keypair().public_key,
                                   Timestamp::parse("2019-12-11T03:50:55Z")));
    return resolver;
}

inline Timestamp golden_verify_time() { return Timestamp::parse("2020-01-05T12:00:00Z"); }

// --- randomized generators ------------------------------------------------

inline std::string gen_name(RandomSource& rng) {
    static const std::string safe[] = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l",
                                       "m", "n", "o", "p", "q", "r", "s", "t", "u", "v", "w", "x",
                                       "y", "z", "A", "B", "C", "D", "E", "é", "ü", "ñ"};
    std::size_t len = 1 + rng.below(10);
    std::string out;
    for (std::size_t i = 0; i < len; ++i) {
        out += safe[rng.below(std::size(safe))];
    }
    return out;
}

inline Date gen_birth_date(RandomSource& rng) {
    std::int64_t first = Date::from_ymd(1900, 1, 1).day_number();
    std::int64_t last = Date::from_ymd(2020, 12, 31).day_number();
    return Date::from_day_number(first + static_cast<std::int64_t>(rng.below(last - first + 1)));
}

inline Timestamp gen_timestamp(RandomSource& rng) {
    // 2015..2030, whole seconds
    return Timestamp::from_epoch_seconds(1420070400 + static_cast<std::int64_t>(rng.below(473000000)));
}

/// Random schema-valid body. Issuer fixed by the caller so signatures stay
/// resolvable.
inline CredentialBody gen_body(RandomSource& rng, const Did& issuer) {
    CredentialBody body;
    body.id = "urn:test:" + to_hex(rng.bytes(8));
    body.credential_types = {kTypeVerifiableCredential, kTypeImmunityCard};
    body.issuer_did = issuer;
    body.issuance_date = gen_timestamp(rng);
    body.expiration_date = body.issuance_date.plus_days(1 + rng.below(720));
    body.subject_did = did_key_from_public_key(Ed25519Keypair::generate(rng).public_key).first;
    body.claims.emplace("givenName", ClaimValue::text(gen_name(rng)));
    body.claims.emplace("familyName", ClaimValue::text(gen_name(rng)));
    body.claims.emplace("birthDate", ClaimValue::date(gen_birth_date(rng)));
    body.claims.emplace("IgM", ClaimValue::flag(rng.below(2) == 1));
    body.claims.emplace("IgG", ClaimValue::flag(rng.below(2) == 1));
    if (rng.below(2) == 1) {
        body.claims.emplace("image", ClaimValue::bytes(rng.bytes(32)));
    }
    return body;
}

/// Mutates exactly one field; the result differs from the input.
inline CredentialBody mutate_one_field(RandomSource& rng, const CredentialBody& original) {
    CredentialBody body = original;
    switch (rng.below(8)) {
    case 0: body.claims.insert_or_assign("IgM", ClaimValue::flag(!original.claims.at("IgM").as_flag())); break;
    case 1: body.claims.insert_or_assign("IgG", ClaimValue::flag(!original.claims.at("IgG").as_flag())); break;
    case 2:
        body.claims.insert_or_assign("birthDate",
                                     ClaimValue::date(original.claims.at("birthDate").as_date().next_day()));
        break;
    case 3:
        body.claims.insert_or_assign("givenName",
                                     ClaimValue::text(original.claims.at("givenName").as_text() + "x"));
        break;
    case 4:
        body.claims.insert_or_assign("familyName",
                                     ClaimValue::text(original.claims.at("familyName").as_text() + "y"));
        break;
    case 5: body.expiration_date = original.expiration_date.plus_days(1); break;
    case 6: body.id = original.id + "0"; break;
    default: body.issuance_date = original.issuance_date.plus_seconds(1); break;
    }
    return body;
}

// --- scenario helpers ------------------------------------------------------

inline ScenarioScript shipped_scenario(const std::string& name) {
    return load_scenario_file(source_dir() / "scenarios" / (name + ".scenario"));
}

} // namespace credlab::testing
