#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "credlab/credential.hpp"
#include "credlab/hardening.hpp"
#include "credlab/registry.hpp"

namespace credlab {

/// Baseline follows the published flow as-is; Hardened adds salted or sealed
/// anchors, signed challenges and holder proofs.
enum class Profile { Baseline, Hardened };

constexpr const char* profile_name(Profile p) { return p == Profile::Baseline ? "baseline" : "hardened"; }

enum class AnchorMode { Salted, Sealed };

enum class ActorKind { Hospital, Patient, Verifier };

inline constexpr const char* kCovidTestingEndpointType = "CovidTestingFacility";

struct IdentityFields {
    std::string given_name;
    std::string family_name;
    Date birth_date;
    Digest32 photo_digest; // the identity "burned" into the credential
};

struct HospitalState {
    Did did;
    Ed25519Keypair keys;
};

/// Off-chain material the holder keeps to open its own anchor: either the
/// commitment salt or the per-anchor decryption key.
using AnchorSecret = std::variant<Salt32, X25519SecretKey>;

struct HolderState {
    Did did;
    Ed25519Keypair keys;
    std::optional<VerifiableCredential> credential;
    std::optional<AnchorSecret> anchor_secret;
};

struct Challenge {
    std::array<std::uint8_t, 16> nonce{};
    Did verifier_did;
    Timestamp expires_at;
    std::optional<Signature> verifier_signature; // Hardened only

    /// Canonical bytes of {expiresAt, nonce, verifierDid}: what the verifier
    /// signs and what the holder proof binds.
    Bytes core_bytes() const;

    Value to_value() const;
    static Challenge from_value(const Value& value);
};

struct HolderProof {
    Challenge challenge;
    Signature signature; // over canonicalize(body) || challenge core bytes
};

struct Presentation {
    VerifiableCredential credential;
    std::optional<HolderProof> holder_proof;
    std::optional<AnchorSecret> disclosed_secret;

    Value to_value() const;
    static Presentation from_value(const Value& value);

    Bytes to_bytes() const { return canonical_bytes(to_value()); }
    static Presentation from_bytes(ByteView bytes) { return from_value(parse_canonical(bytes)); }
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifierDecision {
    Verdict verdict;
    std::vector<CheckResult> checks;
};

struct VerifierState {
    Did did;
    Ed25519Keypair keys;
    std::set<std::array<std::uint8_t, 16>> seen_nonces;
    SeenDigestLedger seen_digests;
};

// Registration publishes a did:sim document through the authorities;
// hospitals additionally expose a testing-facility service endpoint.
HospitalState register_hospital(std::string_view name, RegistryChain& chain,
                                const std::vector<Authority>& authorities, Timestamp now, RandomSource& rng,
                                std::string endpoint_url = {});
HolderState register_patient(std::string_view name, RegistryChain& chain,
                             const std::vector<Authority>& authorities, Timestamp now, RandomSource& rng);
VerifierState register_verifier(std::string_view name, RegistryChain& chain,
                                const std::vector<Authority>& authorities, Timestamp now, RandomSource& rng);

/// Signs a one-year immunity card for the subject. The photo digest in the
/// identity fields stands in for the in-person identity check.
VerifiableCredential issue_test_result(const HospitalState& hospital, const Did& patient,
                                       const IdentityFields& identity, bool igm, bool igg, Timestamp now);

/// Preimage the anchor fingerprints: canonical body bytes followed by the
/// issuer signature, so the anchor names the *signed* credential.
Bytes anchor_preimage(const VerifiableCredential& vc);

/// Submits the holder's anchor through an authority quorum. Baseline writes
/// the plain digest; Hardened writes a salted commitment or sealed
/// ciphertext and leaves the opening secret with the holder.
void anchor_credential(HolderState& holder, Profile profile, AnchorMode mode, RegistryChain& chain,
                       const std::vector<Authority>& authorities, Timestamp now, RandomSource& rng);

/// Baseline challenges are bare nonces; Hardened ones are signed by the
/// verifier and expire.
Challenge make_challenge(const VerifierState& verifier, Profile profile, Timestamp now, RandomSource& rng,
                         std::int64_t ttl_seconds = 3600);

/// Builds what the holder hands over. Baseline: the bare credential plus any
/// anchor-opening secret (no key operations). Hardened: adds a holder proof
/// over the verifier's challenge. Errors: MissingCredential,
/// InvalidChallenge.
Presentation present(const HolderState& holder, const Did& verifier_did, const std::optional<Challenge>& challenge,
                     Profile profile, const RegistryChain& chain, Timestamp now);

/// Runs the verifier checks in order and records every outcome. Baseline
/// checks issuer signature, anchor and expiry; Hardened adds holder binding
/// and challenge freshness with a per-verifier single-use nonce ledger.
VerifierDecision verify_presentation(VerifierState& verifier, const Presentation& presentation,
                                     const RegistryChain& chain, Timestamp now, Profile profile,
                                     const DidResolver* resolver_override = nullptr);

} // namespace credlab
