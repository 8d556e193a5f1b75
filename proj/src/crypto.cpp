#include "credlab/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

#include "credlab/errors.hpp"

namespace credlab {

namespace {

void ensure_sodium() {
    static const int rc = sodium_init();
    if (rc < 0) {
        throw std::runtime_error("libsodium initialization failed");
    }
}

template <std::size_t N>
std::array<std::uint8_t, N> array_from_hex(std::string_view hex, const char* what) {
    Bytes raw = from_hex(hex);
    if (raw.size() != N) {
        raise(ErrorCode::NonCanonicalValue, std::string(what) + ": expected " + std::to_string(N) + " bytes");
    }
    std::array<std::uint8_t, N> out{};
    std::memcpy(out.data(), raw.data(), N);
    return out;
}

constexpr char kBase58Alphabet[] = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

} // namespace

Digest32 Digest32::from_hex(std::string_view hex) { return {array_from_hex<32>(hex, "digest")}; }
Ed25519PublicKey Ed25519PublicKey::from_hex(std::string_view hex) { return {array_from_hex<32>(hex, "public key")}; }
Signature Signature::from_hex(std::string_view hex) { return {array_from_hex<64>(hex, "signature")}; }
X25519PublicKey X25519PublicKey::from_hex(std::string_view hex) { return {array_from_hex<32>(hex, "public key")}; }
X25519SecretKey X25519SecretKey::from_hex(std::string_view hex) { return {array_from_hex<32>(hex, "secret key")}; }

Digest32 sha256(ByteView data) {
    ensure_sodium();
    Digest32 d;
    crypto_hash_sha256(d.bytes.data(), data.data(), data.size());
    return d;
}

Ed25519Keypair Ed25519Keypair::from_seed(const std::array<std::uint8_t, 32>& seed) {
    ensure_sodium();
    Ed25519Keypair kp;
    crypto_sign_seed_keypair(kp.public_key.bytes.data(), kp.secret_key.bytes.data(), seed.data());
    return kp;
}

Ed25519Keypair Ed25519Keypair::generate(RandomSource& rng) { return from_seed(rng.array<32>()); }

Signature ed25519_sign(const Ed25519SecretKey& key, ByteView message) {
    ensure_sodium();
    Signature sig;
    crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(), key.bytes.data());
    return sig;
}

bool ed25519_verify(const Ed25519PublicKey& key, ByteView message, const Signature& sig) {
    ensure_sodium();
    return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(), key.bytes.data()) == 0;
}

X25519Keypair X25519Keypair::from_seed(const std::array<std::uint8_t, 32>& seed) {
    ensure_sodium();
    X25519Keypair kp;
    crypto_box_seed_keypair(kp.public_key.bytes.data(), kp.secret_key.bytes.data(), seed.data());
    return kp;
}

X25519Keypair X25519Keypair::generate(RandomSource& rng) { return from_seed(rng.array<32>()); }

Bytes box_encrypt(ByteView message, const BoxNonce& nonce, const X25519PublicKey& recipient,
                  const X25519SecretKey& sender) {
    ensure_sodium();
    Bytes out(message.size() + crypto_box_MACBYTES);
    if (crypto_box_easy(out.data(), message.data(), message.size(), nonce.data(), recipient.bytes.data(),
                        sender.bytes.data()) != 0) {
        throw std::runtime_error("crypto_box_easy failed");
    }
    return out;
}

std::optional<Bytes> box_decrypt(ByteView ciphertext, const BoxNonce& nonce, const X25519PublicKey& sender,
                                 const X25519SecretKey& recipient) {
    ensure_sodium();
    if (ciphertext.size() < crypto_box_MACBYTES) return std::nullopt;
    Bytes out(ciphertext.size() - crypto_box_MACBYTES);
    if (crypto_box_open_easy(out.data(), ciphertext.data(), ciphertext.size(), nonce.data(),
                             sender.bytes.data(), recipient.bytes.data()) != 0) {
        return std::nullopt;
    }
    return out;
}

std::uint64_t RandomSource::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("bound must be positive");
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        auto raw = array<8>();
        std::uint64_t v = 0;
        for (std::uint8_t b : raw) v = v << 8 | b;
        if (v < limit) return v % bound;
    }
}

void SystemRandom::fill(std::span<std::uint8_t> out) {
    ensure_sodium();
    randombytes_buf(out.data(), out.size());
}

DeterministicRandom::DeterministicRandom(std::uint64_t seed) {
    std::array<std::uint8_t, 8> raw{};
    for (int i = 0; i < 8; ++i) raw[i] = static_cast<std::uint8_t>(seed >> (8 * i));
    key_ = sha256(raw).bytes;
}

DeterministicRandom::DeterministicRandom(const std::array<std::uint8_t, 32>& key) : key_(key) {}

void DeterministicRandom::fill(std::span<std::uint8_t> out) {
    ensure_sodium();
    std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> nonce{};
    std::uint64_t c = counter_++;
    for (int i = 0; i < 8; ++i) nonce[i] = static_cast<std::uint8_t>(c >> (8 * i));
    crypto_stream_chacha20(out.data(), out.size(), nonce.data(), key_.data());
}

std::string base58btc_encode(ByteView data) {
    std::size_t zeros = 0;
    while (zeros < data.size() && data[zeros] == 0) ++zeros;

    // Big-endian base conversion over a working copy.
    Bytes digits; // base-58 digits, most significant first
    Bytes num(data.begin() + static_cast<std::ptrdiff_t>(zeros), data.end());
    std::size_t start = 0;
    while (start < num.size()) {
        unsigned rem = 0;
        for (std::size_t i = start; i < num.size(); ++i) {
            unsigned acc = rem * 256 + num[i];
            num[i] = static_cast<std::uint8_t>(acc / 58);
            rem = acc % 58;
        }
        digits.push_back(static_cast<std::uint8_t>(rem));
        while (start < num.size() && num[start] == 0) ++start;
    }

    std::string out(zeros, '1');
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) out.push_back(kBase58Alphabet[*it]);
    return out;
}

Bytes base58btc_decode(std::string_view text) {
    static const auto index_of = [] {
        std::array<int, 128> idx{};
        idx.fill(-1);
        for (int i = 0; i < 58; ++i) idx[static_cast<unsigned char>(kBase58Alphabet[i])] = i;
        return idx;
    }();

    std::size_t ones = 0;
    while (ones < text.size() && text[ones] == '1') ++ones;

    Bytes num; // big-endian base-256 accumulator
    for (std::size_t p = ones; p < text.size(); ++p) {
        unsigned char c = static_cast<unsigned char>(text[p]);
        int digit = c < 128 ? index_of[c] : -1;
        if (digit < 0) {
            raise(ErrorCode::InvalidKey, "invalid base58 character");
        }
        unsigned carry = static_cast<unsigned>(digit);
        for (auto it = num.rbegin(); it != num.rend(); ++it) {
            unsigned acc = *it * 58u + carry;
            *it = static_cast<std::uint8_t>(acc & 0xFF);
            carry = acc >> 8;
        }
        while (carry > 0) {
            num.insert(num.begin(), static_cast<std::uint8_t>(carry & 0xFF));
            carry >>= 8;
        }
    }

    Bytes out(ones, 0);
    out.insert(out.end(), num.begin(), num.end());
    return out;
}

} // namespace credlab
