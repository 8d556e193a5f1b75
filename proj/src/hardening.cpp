#include "credlab/hardening.hpp"

#include "credlab/errors.hpp"

namespace credlab {

SaltedCommitment commit(ByteView preimage, RandomSource& rng) {
    if (preimage.empty()) {
        raise(ErrorCode::InvalidEntry, "commitment preimage must be non-empty");
    }
    SaltedCommitment c;
    c.salt = rng.array<32>();
    c.commitment = sha256(concat({c.salt, preimage}));
    return c;
}

bool verify_commitment(const Digest32& commitment, const Salt32& salt, ByteView preimage) {
    return sha256(concat({salt, preimage})) == commitment;
}

SealedCiphertextAnchor seal(const Digest32& digest, const X25519PublicKey& recipient, RandomSource& rng) {
    SealedCiphertextAnchor anchor;
    X25519Keypair ephemeral = X25519Keypair::generate(rng);
    anchor.ephemeral_public_key = ephemeral.public_key;
    anchor.nonce = rng.array<kBoxNonceSize>();
    anchor.ciphertext = box_encrypt(digest.view(), anchor.nonce, recipient, ephemeral.secret_key);
    return anchor;
}

Digest32 open_sealed(const SealedCiphertextAnchor& anchor, const X25519SecretKey& recipient_secret) {
    auto plain = box_decrypt(anchor.ciphertext, anchor.nonce, anchor.ephemeral_public_key, recipient_secret);
    if (!plain || plain->size() != 32) {
        raise(ErrorCode::DecryptionFailure, "sealed anchor does not authenticate under this key");
    }
    Digest32 d;
    std::copy(plain->begin(), plain->end(), d.bytes.begin());
    return d;
}

} // namespace credlab
