#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "credlab/did.hpp"

namespace credlab {

/// Block producer: a named Ed25519 keypair. Chains store only the public
/// half; the secret half stays with the simulated consortium member.
struct Authority {
    std::string id;
    Ed25519Keypair keys;

    static Authority create(std::string id, RandomSource& rng) {
        return Authority{std::move(id), Ed25519Keypair::generate(rng)};
    }
};

struct AuthorityPublic {
    std::string id;
    Ed25519PublicKey public_key;
};

// On-chain credential fingerprints, weakest to strongest.
struct PlainHashAnchor {
    Digest32 digest;

    friend bool operator==(const PlainHashAnchor&, const PlainHashAnchor&) = default;
};

struct SaltedCommitmentAnchor {
    Digest32 commitment;

    friend bool operator==(const SaltedCommitmentAnchor&, const SaltedCommitmentAnchor&) = default;
};

struct SealedCiphertextAnchor {
    X25519PublicKey ephemeral_public_key;
    BoxNonce nonce{};
    Bytes ciphertext;

    friend bool operator==(const SealedCiphertextAnchor&, const SealedCiphertextAnchor&) = default;
};

using AnchorPayload = std::variant<PlainHashAnchor, SaltedCommitmentAnchor, SealedCiphertextAnchor>;

struct DidDocPublish {
    DidDocument document;
};

struct DidDocUpdate {
    DidDocument document;
};

struct CredentialAnchor {
    AnchorPayload anchor;
    Did submitted_for;
};

using RegistryEntry = std::variant<DidDocPublish, DidDocUpdate, CredentialAnchor>;

struct BlockSignature {
    std::string authority_id;
    Signature signature;
};

struct Block {
    std::uint64_t height = 0;
    Digest32 prev_hash; // all-zero for genesis
    Timestamp timestamp;
    std::vector<RegistryEntry> entries;
    std::vector<BlockSignature> signatures;

    /// Canonical bytes of {entries, height, prevHash, timestamp}; what
    /// authorities sign (via its digest) and what the next block links to.
    Bytes signing_bytes() const;
    Digest32 digest() const;

    Value to_value() const;
    static Block from_value(const Value& value);
};

struct RegistryChain {
    std::vector<AuthorityPublic> authority_set;
    std::uint32_t quorum = 1;
    std::vector<Block> blocks;

    const AuthorityPublic* find_authority(std::string_view id) const;
};

RegistryChain make_chain(std::vector<AuthorityPublic> authorities, std::uint32_t quorum);

/// Appends one quorum-signed block; the input chain is untouched.
/// Errors: InsufficientQuorum, InvalidEntry, StaleVersion.
RegistryChain append_block(const RegistryChain& chain, std::vector<RegistryEntry> entries,
                           const std::vector<Authority>& signers, Timestamp timestamp);

struct ChainVerdict {
    bool ok = true;
    std::uint64_t height = 0; // first offending block when !ok
    std::string reason;

    static ChainVerdict accept() { return {}; }
    static ChainVerdict reject(std::uint64_t height, std::string reason) {
        return {false, height, std::move(reason)};
    }
};

ChainVerdict verify_chain(const RegistryChain& chain);

struct AnchorLocation {
    std::uint64_t height = 0;
    std::size_t entry_index = 0;

    friend bool operator==(const AnchorLocation&, const AnchorLocation&) = default;
};

/// First PlainHash or SaltedCommitment anchor equal to the digest.
std::optional<AnchorLocation> find_anchor(const RegistryChain& chain, const Digest32& digest);

/// All credential anchors submitted for one subject, oldest first.
std::vector<std::pair<AnchorLocation, CredentialAnchor>> anchors_for(const RegistryChain& chain, const Did& did);

enum class EventKind { DidPublished, DidUpdated, CredentialAnchored };

constexpr const char* event_kind_name(EventKind k) {
    switch (k) {
    case EventKind::DidPublished: return "did-published";
    case EventKind::DidUpdated: return "did-updated";
    case EventKind::CredentialAnchored: return "credential-anchored";
    }
    return "unknown";
}

/// One row of what an unprivileged observer sees.
struct PublicEvent {
    Timestamp timestamp;
    Did did;
    EventKind kind = EventKind::DidPublished;
    std::vector<std::string> endpoint_types;
    std::uint64_t height = 0;
};

/// Flat chronological view of the chain; needs no key material.
std::vector<PublicEvent> public_event_log(const RegistryChain& chain);

/// Latest DID document: "key" derives locally, "sim" reads the chain.
/// Errors: MalformedDid, NotFound.
DidDocument resolve(const Did& did, const RegistryChain& chain);

class RegistryResolver : public DidResolver {
  public:
    explicit RegistryResolver(const RegistryChain& chain, const DidResolver* fallback = nullptr)
        : chain_(&chain), fallback_(fallback) {}

    std::optional<DidDocument> resolve(const Did& did) const override;

  private:
    const RegistryChain* chain_;
    const DidResolver* fallback_;
};

// Chain file form: one canonical-text header line (authorities, quorum)
// followed by one canonical-text block per line.
std::string chain_to_text(const RegistryChain& chain);
RegistryChain chain_from_text(std::string_view text); // MalformedChain

Value anchor_payload_to_value(const AnchorPayload& payload);
AnchorPayload anchor_payload_from_value(const Value& value);
Value registry_entry_to_value(const RegistryEntry& entry);
RegistryEntry registry_entry_from_value(const Value& value);

} // namespace credlab
