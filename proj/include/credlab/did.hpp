#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "credlab/canonical.hpp"
#include "credlab/crypto.hpp"
#include "credlab/timeutil.hpp"

namespace credlab {

/// Identifier of the form "did:<method>:<method_id>".
///
/// Locally minted identifiers use the "key" method (self-certifying,
/// derived from an Ed25519 public key) or the "sim" method (backed by the
/// registry). Foreign methods parse fine and stay opaque; they resolve only
/// through a stub table.
struct Did {
    std::string method;
    std::string method_id;

    std::string str() const { return "did:" + method + ":" + method_id; }

    static Did parse(std::string_view text); // MalformedDid
    static Did sim(std::string_view name) { return parse("did:sim:" + std::string(name)); }

    friend bool operator==(const Did&, const Did&) = default;
    friend std::strong_ordering operator<=>(const Did&, const Did&) = default;
};

struct VerificationMethod {
    std::string id; // DID URL, e.g. "did:sim:hospital-01#key-1"
    Ed25519PublicKey public_key;
    std::string algorithm = "ed25519";
};

struct ServiceEndpoint {
    std::string id;
    std::string type;
    std::string url;
};

struct DidDocument {
    Did id;
    std::vector<VerificationMethod> verification_methods;
    std::vector<std::string> authentication; // key ids
    std::vector<ServiceEndpoint> service_endpoints;
    std::uint64_t version = 1;
    Timestamp updated_at;

    /// Checks structural invariants: version >= 1 and every authentication
    /// entry names an existing verification method.
    void validate() const;

    const VerificationMethod* find_method(std::string_view method_id) const;
    bool has_endpoint_type(std::string_view type) const;

    Value to_value() const;
    static DidDocument from_value(const Value& value);
};

/// Builds a minimal single-key document for a freshly minted identifier.
DidDocument make_key_document(const Did& did, const Ed25519PublicKey& pk, Timestamp updated_at);

Did parse_did(std::string_view text);

/// Self-certifying identifier: method id is "z" + base58btc(0xED 0x01 || pk).
/// The document is derived entirely from the key, no registry involved.
std::pair<Did, DidDocument> did_key_from_public_key(ByteView public_key); // InvalidKey
std::pair<Did, DidDocument> did_key_from_public_key(const Ed25519PublicKey& public_key);

/// Extracts the embedded key from a "key"-method identifier.
std::optional<Ed25519PublicKey> did_key_public_key(const Did& did);

/// Key-material lookup used by credential verification.
class DidResolver {
  public:
    virtual ~DidResolver() = default;
    virtual std::optional<DidDocument> resolve(const Did& did) const = 0;
};

/// Fixed local table. Used for foreign-method issuers in fixtures.
class StubResolver : public DidResolver {
  public:
    void add(DidDocument doc) { docs_.push_back(std::move(doc)); }

    std::optional<DidDocument> resolve(const Did& did) const override;

  private:
    std::vector<DidDocument> docs_;
};

} // namespace credlab
