#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "credlab/bytes.hpp"

namespace credlab {

struct Digest32 {
    std::array<std::uint8_t, 32> bytes{};

    std::string hex() const { return to_hex(bytes); }
    static Digest32 from_hex(std::string_view hex);

    ByteView view() const { return bytes; }

    friend bool operator==(const Digest32&, const Digest32&) = default;
    friend std::strong_ordering operator<=>(const Digest32&, const Digest32&) = default;
};

Digest32 sha256(ByteView data);

struct Ed25519PublicKey {
    std::array<std::uint8_t, 32> bytes{};

    std::string hex() const { return to_hex(bytes); }
    static Ed25519PublicKey from_hex(std::string_view hex);

    friend bool operator==(const Ed25519PublicKey&, const Ed25519PublicKey&) = default;
};

struct Ed25519SecretKey {
    std::array<std::uint8_t, 64> bytes{};
};

struct Signature {
    std::array<std::uint8_t, 64> bytes{};

    std::string hex() const { return to_hex(bytes); }
    static Signature from_hex(std::string_view hex);

    ByteView view() const { return bytes; }

    friend bool operator==(const Signature&, const Signature&) = default;
};

class RandomSource;

struct Ed25519Keypair {
    Ed25519PublicKey public_key;
    Ed25519SecretKey secret_key;

    static Ed25519Keypair from_seed(const std::array<std::uint8_t, 32>& seed);
    static Ed25519Keypair generate(RandomSource& rng);
};

Signature ed25519_sign(const Ed25519SecretKey& key, ByteView message);
bool ed25519_verify(const Ed25519PublicKey& key, ByteView message, const Signature& sig);

struct X25519PublicKey {
    std::array<std::uint8_t, 32> bytes{};

    std::string hex() const { return to_hex(bytes); }
    static X25519PublicKey from_hex(std::string_view hex);

    friend bool operator==(const X25519PublicKey&, const X25519PublicKey&) = default;
};

struct X25519SecretKey {
    std::array<std::uint8_t, 32> bytes{};

    std::string hex() const { return to_hex(bytes); }
    static X25519SecretKey from_hex(std::string_view hex);

    friend bool operator==(const X25519SecretKey&, const X25519SecretKey&) = default;
};

struct X25519Keypair {
    X25519PublicKey public_key;
    X25519SecretKey secret_key;

    static X25519Keypair from_seed(const std::array<std::uint8_t, 32>& seed);
    static X25519Keypair generate(RandomSource& rng);
};

inline constexpr std::size_t kBoxNonceSize = 24;
using BoxNonce = std::array<std::uint8_t, kBoxNonceSize>;

/// Authenticated public-key encryption (X25519 + XSalsa20-Poly1305).
Bytes box_encrypt(ByteView message, const BoxNonce& nonce, const X25519PublicKey& recipient,
                  const X25519SecretKey& sender);
std::optional<Bytes> box_decrypt(ByteView ciphertext, const BoxNonce& nonce, const X25519PublicKey& sender,
                                 const X25519SecretKey& recipient);

/// Byte stream abstraction so protocol code can run either on the OS CSPRNG
/// or on a seeded deterministic stream for reproducible scenario runs.
class RandomSource {
  public:
    virtual ~RandomSource() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;

    template <std::size_t N>
    std::array<std::uint8_t, N> array() {
        std::array<std::uint8_t, N> a{};
        fill(a);
        return a;
    }

    Bytes bytes(std::size_t n) {
        Bytes b(n);
        fill(b);
        return b;
    }

    /// Uniform value in [0, bound) via rejection sampling. bound must be > 0.
    std::uint64_t below(std::uint64_t bound);
};

class SystemRandom final : public RandomSource {
  public:
    void fill(std::span<std::uint8_t> out) override;
};

/// ChaCha20-keyed deterministic stream; identical seeds give identical byte
/// sequences across platforms and runs.
class DeterministicRandom final : public RandomSource {
  public:
    explicit DeterministicRandom(std::uint64_t seed);
    explicit DeterministicRandom(const std::array<std::uint8_t, 32>& key);

    void fill(std::span<std::uint8_t> out) override;

  private:
    std::array<std::uint8_t, 32> key_{};
    std::uint64_t counter_ = 0;
};

std::string base58btc_encode(ByteView data);
Bytes base58btc_decode(std::string_view text); // throws InvalidKey on bad alphabet

} // namespace credlab
