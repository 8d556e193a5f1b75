#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "credlab/canonical.hpp"
#include "credlab/did.hpp"
#include "credlab/registry.hpp"
#include "credlab/timeutil.hpp"

namespace credlab {

inline constexpr const char* kTypeVerifiableCredential = "VerifiableCredential";
inline constexpr const char* kTypeImmunityCard = "ImmunoglobulinDetectionTestCard";
inline constexpr std::size_t kMaxClaimBytes = 1 << 20;

enum class ClaimKind { Text, Flag, Date, DateTime, Bytes };

/// One claim value. The card schema fixes a kind per field, which is what
/// keeps the text serialization injective: a date and a text rendering to
/// the same characters can never occupy the same field.
class ClaimValue {
  public:
    static ClaimValue text(std::string s) { return ClaimValue(std::move(s)); }
    static ClaimValue flag(bool b) { return ClaimValue(b); }
    static ClaimValue date(Date d) { return ClaimValue(d); }
    static ClaimValue datetime(Timestamp t) { return ClaimValue(t); }
    static ClaimValue bytes(Bytes b); // InvalidBody when > 1 MiB

    ClaimKind kind() const { return static_cast<ClaimKind>(v_.index()); }

    const std::string& as_text() const { return std::get<std::string>(v_); }
    bool as_flag() const { return std::get<bool>(v_); }
    const Date& as_date() const { return std::get<Date>(v_); }
    const Timestamp& as_datetime() const { return std::get<Timestamp>(v_); }
    const Bytes& as_bytes() const { return std::get<Bytes>(v_); }

    /// Text-profile rendering: flags are booleans, everything else strings
    /// (dates and datetimes in their fixed literal form, bytes as hex).
    Value to_value() const;
    static ClaimValue from_value(const Value& v, ClaimKind kind);

    friend bool operator==(const ClaimValue&, const ClaimValue&) = default;

  private:
    explicit ClaimValue(std::string s) : v_(std::move(s)) {}
    explicit ClaimValue(bool b) : v_(b) {}
    explicit ClaimValue(Date d) : v_(d) {}
    explicit ClaimValue(Timestamp t) : v_(t) {}
    explicit ClaimValue(Bytes b) : v_(std::move(b)) {}

    std::variant<std::string, bool, Date, Timestamp, Bytes> v_;
};

/// Immunity card claim schema: field name -> required kind. "image" is the
/// optional photo digest; the other five are mandatory.
const std::map<std::string, ClaimKind>& card_claim_schema();
bool is_card_claim_field(std::string_view name);

struct CredentialBody {
    std::string id; // URI
    std::vector<std::string> credential_types;
    Did issuer_did;
    Timestamp issuance_date;
    Timestamp expiration_date;
    Did subject_did;
    std::map<std::string, ClaimValue> claims;

    /// Full invariant check (types list, date ordering, card schema).
    /// Throws InvalidBody.
    void validate() const;

    Value to_value() const;
    static CredentialBody from_value(const Value& value); // MalformedDocument / InvalidBody
};

enum class ProofAttachment { Embedded, Detached };

inline constexpr const char* kProofAlgorithm = "ed25519-canonical-v1";

struct Proof {
    std::string algorithm = kProofAlgorithm;
    std::string verification_method;
    Timestamp created;
    Signature signature;
    ProofAttachment attachment = ProofAttachment::Embedded;
    std::optional<Digest32> body_digest; // present iff Detached

    Value to_value() const;
    static Proof from_value(const Value& value);
};

struct VerifiableCredential {
    CredentialBody body;
    Proof proof;

    Value to_value() const;
    static VerifiableCredential from_value(const Value& value);

    Bytes to_bytes() const { return canonical_bytes(to_value()); }
    static VerifiableCredential from_bytes(ByteView bytes) { return from_value(parse_canonical(bytes)); }
};

/// Deterministic byte form of a body: canonical text, lexicographic keys,
/// fixed literal forms. Injective over valid bodies. Errors: InvalidBody,
/// NonCanonicalValue.
Bytes canonicalize(const CredentialBody& body);

CredentialBody parse_body(ByteView bytes);

/// Signs canonicalize(body) with the issuer key. The verification method id
/// defaults to "<issuer did>#key-1".
VerifiableCredential sign_credential(const CredentialBody& body, const Ed25519Keypair& issuer_key,
                                     ProofAttachment mode, Timestamp created,
                                     std::string verification_method = {});

enum class VerifyProfile { Strict, Permissive };

enum class RejectReason {
    SignatureMismatch,
    ResolutionFailure,
    Expired,
    UnknownVerificationMethod,
    MalformedDocument,
    AnchorMismatch,
    HolderBindingFailure,
    ReplayedChallenge,
    InvalidChallenge,
    MissingCredential,
};

constexpr const char* reject_reason_name(RejectReason r) {
    switch (r) {
    case RejectReason::SignatureMismatch: return "SignatureMismatch";
    case RejectReason::ResolutionFailure: return "ResolutionFailure";
    case RejectReason::Expired: return "Expired";
    case RejectReason::UnknownVerificationMethod: return "UnknownVerificationMethod";
    case RejectReason::MalformedDocument: return "MalformedDocument";
    case RejectReason::AnchorMismatch: return "AnchorMismatch";
    case RejectReason::HolderBindingFailure: return "HolderBindingFailure";
    case RejectReason::ReplayedChallenge: return "ReplayedChallenge";
    case RejectReason::InvalidChallenge: return "InvalidChallenge";
    case RejectReason::MissingCredential: return "MissingCredential";
    }
    return "Unknown";
}

struct Verdict {
    bool accepted = false;
    std::optional<RejectReason> reason;
    std::string detail;

    static Verdict accept() { return {true, std::nullopt, {}}; }
    static Verdict reject(RejectReason r, std::string detail = {}) { return {false, r, std::move(detail)}; }
};

/// Body digests a permissive verifier has previously accepted. Deliberately
/// part of the modeled re-attachment pitfall: a detached proof naming any
/// remembered digest is taken at face value.
class SeenDigestLedger {
  public:
    bool contains(const Digest32& d) const { return seen_.count(d) > 0; }
    void record(const Digest32& d) { seen_.insert(d); }

  private:
    std::set<Digest32> seen_;
};

/// Verifies a credential document as received, byte level.
///
/// Strict: requires a proof whose signature covers the canonical bytes of
/// the received body exactly, key resolved through the issuer's document,
/// expiry enforced against `now`.
///
/// Permissive: models the sloppy-verifier pitfalls. Signature is accepted
/// over either the full body or the schema-projected subset (unknown fields
/// ride along unsigned); a detached proof naming a previously-seen digest is
/// accepted outright; a proofless credential passes when the chain holds any
/// anchor for its subject; expiry is not enforced.
Verdict verify_credential_document(ByteView document, const DidResolver& resolver, VerifyProfile profile,
                                   Timestamp now, const RegistryChain* chain = nullptr,
                                   SeenDigestLedger* seen = nullptr);

Verdict verify_credential(const VerifiableCredential& vc, const DidResolver& resolver, VerifyProfile profile,
                          Timestamp now, const RegistryChain* chain = nullptr, SeenDigestLedger* seen = nullptr);

/// Reduces a raw credential document to the fields the card schema knows,
/// dropping anything else.
Value project_to_schema(const Value& document_body);

} // namespace credlab
