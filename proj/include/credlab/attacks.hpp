#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "credlab/protocol.hpp"

namespace credlab {

/// Outcome of one adversary run. `work` counts oracle/digest invocations;
/// `elapsed` is wall clock and never serialized, so report files stay
/// byte-stable across runs.
struct AttackReport {
    std::string attack;
    Profile profile_attacked = Profile::Baseline;
    bool succeeded = false;
    std::optional<Value> recovered;
    std::uint64_t work = 1;
    std::chrono::duration<double> elapsed{};
    std::string narrative;

    Value to_value() const;
};

// Finite candidate domains for unknown claim fields.
struct FlagDomain {};

struct DateRangeDomain {
    Date first;
    Date last; // inclusive

    std::uint64_t size() const { return static_cast<std::uint64_t>(last.day_number() - first.day_number()) + 1; }
};

struct ChoiceDomain {
    std::vector<ClaimValue> values;
};

using ClaimDomain = std::variant<FlagDomain, DateRangeDomain, ChoiceDomain>;

std::uint64_t domain_size(const ClaimDomain& d);
ClaimValue domain_at(const ClaimDomain& d, std::uint64_t index);

/// What the adversary knows about the target's claims: fixed values for the
/// known fields, finite domains for the rest. Together they must cover the
/// card schema.
struct ClaimTemplate {
    std::map<std::string, ClaimValue> known;
    std::map<std::string, ClaimDomain> unknown;

    void validate() const; // InvalidEntry on overlap or schema gaps
    std::uint64_t candidate_count() const;
};

/// Everything public about the anchored credential other than its claims:
/// envelope metadata plus the issuer proof.
struct CredentialPublicContext {
    std::string id;
    std::vector<std::string> credential_types;
    Did issuer_did;
    Timestamp issuance_date;
    Timestamp expiration_date;
    Did subject_did;
    Proof proof;

    static CredentialPublicContext of(const VerifiableCredential& vc);
};

/// Enumerates the cartesian product of the unknown domains, rebuilding each
/// candidate's anchor preimage and comparing digests against the payload.
/// Succeeds only against plain hashes; salted and sealed anchors make every
/// comparison fail. Work equals the number of digests computed.
AttackReport dictionary_attack(const AnchorPayload& anchor, const ClaimTemplate& tmpl,
                               const CredentialPublicContext& context);

/// Feeds a byte-identical captured presentation to a second verifier.
AttackReport replay_attack(ByteView captured_presentation, VerifierState& second_verifier,
                           const RegistryChain& chain, Timestamp now, Profile profile);

enum class TamperMutation { StripProof, ReattachForeignProof, RawFieldInjection };

constexpr const char* tamper_mutation_name(TamperMutation m) {
    switch (m) {
    case TamperMutation::StripProof: return "strip-proof";
    case TamperMutation::ReattachForeignProof: return "reattach-foreign-proof";
    case TamperMutation::RawFieldInjection: return "raw-field-injection";
    }
    return "unknown";
}

/// Applies one mutation at document level and runs verification under the
/// given profile. Success means a semantically altered credential was
/// accepted, which only the permissive profile allows.
AttackReport signature_tamper_attack(const VerifiableCredential& vc, TamperMutation mutation,
                                     VerifyProfile profile, const DidResolver& resolver, Timestamp now,
                                     const RegistryChain* chain = nullptr, const Proof* foreign_proof = nullptr,
                                     SeenDigestLedger* seen = nullptr);

/// Builds the mutated document bytes without verifying them.
Bytes apply_tamper_mutation(const VerifiableCredential& vc, TamperMutation mutation,
                            const Proof* foreign_proof = nullptr);

struct CorrelationLink {
    Did patient;
    Did facility;
    Timestamp timestamp;
    bool ambiguous = false;

    friend bool operator==(const CorrelationLink&, const CorrelationLink&) = default;
};

/// Ground truth for scoring: which facility actually served which patient
/// and when the anchor landed on-chain. The attacker never sees this; it
/// only scores the inferences.
using CorrelationTruth = std::vector<CorrelationLink>;

/// Links each anchor submission to the nearest preceding event of a DID that
/// exposes a testing-facility endpoint. Succeeds when at least one inference
/// matches ground truth exactly.
AttackReport correlation_attack(const std::vector<PublicEvent>& events, const CorrelationTruth& truth);

} // namespace credlab
