#pragma once

#include <array>

#include "credlab/crypto.hpp"
#include "credlab/registry.hpp"

namespace credlab {

using Salt32 = std::array<std::uint8_t, 32>;

/// Hiding commitment to a preimage: commitment = sha256(salt || preimage).
/// The salt never goes on-chain; whoever holds it can open the commitment.
struct SaltedCommitment {
    Digest32 commitment;
    Salt32 salt{};
};

/// Fresh random salt per call. Preimage must be non-empty.
SaltedCommitment commit(ByteView preimage, RandomSource& rng);

bool verify_commitment(const Digest32& commitment, const Salt32& salt, ByteView preimage);

/// Encrypts a credential digest to the recipient key under a fresh ephemeral
/// sender keypair, so the on-chain payload is opaque without the recipient
/// secret and two sealings of the same digest never repeat.
SealedCiphertextAnchor seal(const Digest32& digest, const X25519PublicKey& recipient, RandomSource& rng);

/// Errors: DecryptionFailure on wrong key or tampered ciphertext.
Digest32 open_sealed(const SealedCiphertextAnchor& anchor, const X25519SecretKey& recipient_secret);

} // namespace credlab
