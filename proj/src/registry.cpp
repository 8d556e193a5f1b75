#include "credlab/registry.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "credlab/errors.hpp"

namespace credlab {

namespace {

template <std::size_t N>
std::array<std::uint8_t, N> fixed_from_hex(const std::string& hex, const char* what) {
    Bytes raw = from_hex(hex);
    if (raw.size() != N) {
        raise(ErrorCode::MalformedDocument, std::string(what) + ": wrong length");
    }
    std::array<std::uint8_t, N> out{};
    std::copy(raw.begin(), raw.end(), out.begin());
    return out;
}

/// Rolling view of published documents used to validate new entries.
struct ChainState {
    std::map<std::string, std::uint64_t> did_versions;

    /// Throws InvalidEntry / StaleVersion when the entry cannot follow the
    /// current state.
    void apply(const RegistryEntry& entry) {
        if (const auto* pub = std::get_if<DidDocPublish>(&entry)) {
            pub->document.validate();
            const std::string did = pub->document.id.str();
            if (did_versions.count(did)) {
                raise(ErrorCode::InvalidEntry, "publish for already-registered " + did);
            }
            if (pub->document.version != 1) {
                raise(ErrorCode::InvalidEntry, "initial publish must be version 1: " + did);
            }
            did_versions[did] = 1;
        } else if (const auto* upd = std::get_if<DidDocUpdate>(&entry)) {
            upd->document.validate();
            const std::string did = upd->document.id.str();
            auto it = did_versions.find(did);
            if (it == did_versions.end()) {
                raise(ErrorCode::InvalidEntry, "update for unpublished " + did);
            }
            if (upd->document.version != it->second + 1) {
                raise(ErrorCode::StaleVersion, "update for " + did + " has version " +
                                                   std::to_string(upd->document.version) + ", expected " +
                                                   std::to_string(it->second + 1));
            }
            it->second = upd->document.version;
        }
        // Credential anchors carry no stateful constraint.
    }
};

} // namespace

Value anchor_payload_to_value(const AnchorPayload& payload) {
    Value::Object o;
    if (const auto* plain = std::get_if<PlainHashAnchor>(&payload)) {
        o.emplace("hash", plain->digest.hex());
        o.emplace("kind", "plainHash");
    } else if (const auto* salted = std::get_if<SaltedCommitmentAnchor>(&payload)) {
        o.emplace("commitment", salted->commitment.hex());
        o.emplace("kind", "saltedCommitment");
    } else {
        const auto& sealed = std::get<SealedCiphertextAnchor>(payload);
        o.emplace("ciphertext", to_hex(sealed.ciphertext));
        o.emplace("ephemeralPublicKey", sealed.ephemeral_public_key.hex());
        o.emplace("kind", "sealedCiphertext");
        o.emplace("nonce", to_hex(sealed.nonce));
    }
    return Value(std::move(o));
}

AnchorPayload anchor_payload_from_value(const Value& value) {
    const std::string& kind = value.at("kind").as_string();
    if (kind == "plainHash") {
        return PlainHashAnchor{Digest32::from_hex(value.at("hash").as_string())};
    }
    if (kind == "saltedCommitment") {
        return SaltedCommitmentAnchor{Digest32::from_hex(value.at("commitment").as_string())};
    }
    if (kind == "sealedCiphertext") {
        SealedCiphertextAnchor sealed;
        sealed.ephemeral_public_key = X25519PublicKey::from_hex(value.at("ephemeralPublicKey").as_string());
        sealed.nonce = fixed_from_hex<kBoxNonceSize>(value.at("nonce").as_string(), "nonce");
        sealed.ciphertext = from_hex(value.at("ciphertext").as_string());
        return sealed;
    }
    raise(ErrorCode::MalformedDocument, "unknown anchor kind: " + kind);
}

Value registry_entry_to_value(const RegistryEntry& entry) {
    Value::Object o;
    if (const auto* pub = std::get_if<DidDocPublish>(&entry)) {
        o.emplace("document", pub->document.to_value());
        o.emplace("kind", "didDocPublish");
    } else if (const auto* upd = std::get_if<DidDocUpdate>(&entry)) {
        o.emplace("document", upd->document.to_value());
        o.emplace("kind", "didDocUpdate");
    } else {
        const auto& anchor = std::get<CredentialAnchor>(entry);
        o.emplace("anchor", anchor_payload_to_value(anchor.anchor));
        o.emplace("kind", "credentialAnchor");
        o.emplace("submittedFor", anchor.submitted_for.str());
    }
    return Value(std::move(o));
}

RegistryEntry registry_entry_from_value(const Value& value) {
    const std::string& kind = value.at("kind").as_string();
    if (kind == "didDocPublish") {
        return DidDocPublish{DidDocument::from_value(value.at("document"))};
    }
    if (kind == "didDocUpdate") {
        return DidDocUpdate{DidDocument::from_value(value.at("document"))};
    }
    if (kind == "credentialAnchor") {
        return CredentialAnchor{anchor_payload_from_value(value.at("anchor")),
                                parse_did(value.at("submittedFor").as_string())};
    }
    raise(ErrorCode::MalformedDocument, "unknown entry kind: " + kind);
}

Bytes Block::signing_bytes() const {
    Value::Object o;
    Value::Array entry_values;
    for (const auto& e : entries) entry_values.push_back(registry_entry_to_value(e));
    o.emplace("entries", std::move(entry_values));
    o.emplace("height", static_cast<std::int64_t>(height));
    o.emplace("prevHash", prev_hash.hex());
    o.emplace("timestamp", timestamp.str());
    return canonical_bytes(Value(std::move(o)));
}

Digest32 Block::digest() const { return sha256(signing_bytes()); }

Value Block::to_value() const {
    Value::Object o;
    Value::Array entry_values;
    for (const auto& e : entries) entry_values.push_back(registry_entry_to_value(e));
    o.emplace("entries", std::move(entry_values));
    o.emplace("height", static_cast<std::int64_t>(height));
    o.emplace("prevHash", prev_hash.hex());
    Value::Array sig_values;
    for (const auto& s : signatures) {
        Value::Object sv;
        sv.emplace("authority", s.authority_id);
        sv.emplace("signature", s.signature.hex());
        sig_values.push_back(Value(std::move(sv)));
    }
    o.emplace("signatures", std::move(sig_values));
    o.emplace("timestamp", timestamp.str());
    return Value(std::move(o));
}

Block Block::from_value(const Value& value) {
    Block b;
    std::int64_t h = value.at("height").as_integer();
    b.height = static_cast<std::uint64_t>(h);
    b.prev_hash = Digest32::from_hex(value.at("prevHash").as_string());
    b.timestamp = Timestamp::parse(value.at("timestamp").as_string());
    for (const Value& e : value.at("entries").as_array()) {
        b.entries.push_back(registry_entry_from_value(e));
    }
    for (const Value& s : value.at("signatures").as_array()) {
        b.signatures.push_back(BlockSignature{s.at("authority").as_string(),
                                              Signature::from_hex(s.at("signature").as_string())});
    }
    return b;
}

const AuthorityPublic* RegistryChain::find_authority(std::string_view id) const {
    for (const auto& a : authority_set) {
        if (a.id == id) return &a;
    }
    return nullptr;
}

RegistryChain make_chain(std::vector<AuthorityPublic> authorities, std::uint32_t quorum) {
    if (authorities.empty() || quorum < 1 || quorum > authorities.size()) {
        raise(ErrorCode::InvalidEntry, "quorum must satisfy 1 <= t <= n");
    }
    std::set<std::string> ids;
    for (const auto& a : authorities) {
        if (!ids.insert(a.id).second) {
            raise(ErrorCode::InvalidEntry, "duplicate authority id: " + a.id);
        }
    }
    RegistryChain chain;
    chain.authority_set = std::move(authorities);
    chain.quorum = quorum;
    return chain;
}

RegistryChain append_block(const RegistryChain& chain, std::vector<RegistryEntry> entries,
                           const std::vector<Authority>& signers, Timestamp timestamp) {
    std::set<std::string> signer_ids;
    for (const auto& s : signers) {
        if (!chain.find_authority(s.id)) {
            raise(ErrorCode::InsufficientQuorum, "signer " + s.id + " is not in the authority set");
        }
        signer_ids.insert(s.id);
    }
    if (signer_ids.size() < chain.quorum) {
        raise(ErrorCode::InsufficientQuorum, std::to_string(signer_ids.size()) + " distinct signers, quorum is " +
                                                 std::to_string(chain.quorum));
    }

    ChainState state;
    for (const auto& block : chain.blocks) {
        for (const auto& e : block.entries) state.apply(e);
    }
    for (const auto& e : entries) state.apply(e);

    Block block;
    block.height = chain.blocks.size();
    block.prev_hash = chain.blocks.empty() ? Digest32{} : chain.blocks.back().digest();
    block.timestamp = timestamp;
    block.entries = std::move(entries);

    Digest32 digest = block.digest();
    std::set<std::string> used;
    for (const auto& s : signers) {
        if (!used.insert(s.id).second) continue;
        block.signatures.push_back(BlockSignature{s.id, ed25519_sign(s.keys.secret_key, digest.view())});
    }

    RegistryChain next = chain;
    next.blocks.push_back(std::move(block));
    return next;
}

ChainVerdict verify_chain(const RegistryChain& chain) {
    if (chain.authority_set.empty() || chain.quorum < 1 || chain.quorum > chain.authority_set.size()) {
        return ChainVerdict::reject(0, "invalid authority configuration");
    }
    ChainState state;
    Digest32 prev{};
    for (std::size_t i = 0; i < chain.blocks.size(); ++i) {
        const Block& block = chain.blocks[i];
        if (block.height != i) {
            return ChainVerdict::reject(i, "height not consecutive");
        }
        if (block.prev_hash != prev) {
            return ChainVerdict::reject(i, "previous-hash link broken");
        }
        Digest32 digest = block.digest();
        std::set<std::string> valid_signers;
        for (const auto& sig : block.signatures) {
            const AuthorityPublic* auth = chain.find_authority(sig.authority_id);
            if (!auth) continue;
            if (ed25519_verify(auth->public_key, digest.view(), sig.signature)) {
                valid_signers.insert(sig.authority_id);
            }
        }
        if (valid_signers.size() < chain.quorum) {
            return ChainVerdict::reject(i, "only " + std::to_string(valid_signers.size()) +
                                               " valid authority signatures, quorum is " +
                                               std::to_string(chain.quorum));
        }
        for (const auto& e : block.entries) {
            try {
                state.apply(e);
            } catch (const Error& err) {
                return ChainVerdict::reject(i, err.what());
            }
        }
        prev = digest;
    }
    return ChainVerdict::accept();
}

std::optional<AnchorLocation> find_anchor(const RegistryChain& chain, const Digest32& digest) {
    for (const auto& block : chain.blocks) {
        for (std::size_t i = 0; i < block.entries.size(); ++i) {
            const auto* anchor = std::get_if<CredentialAnchor>(&block.entries[i]);
            if (!anchor) continue;
            if (const auto* plain = std::get_if<PlainHashAnchor>(&anchor->anchor)) {
                if (plain->digest == digest) return AnchorLocation{block.height, i};
            } else if (const auto* salted = std::get_if<SaltedCommitmentAnchor>(&anchor->anchor)) {
                if (salted->commitment == digest) return AnchorLocation{block.height, i};
            }
        }
    }
    return std::nullopt;
}

std::vector<std::pair<AnchorLocation, CredentialAnchor>> anchors_for(const RegistryChain& chain, const Did& did) {
    std::vector<std::pair<AnchorLocation, CredentialAnchor>> out;
    for (const auto& block : chain.blocks) {
        for (std::size_t i = 0; i < block.entries.size(); ++i) {
            const auto* anchor = std::get_if<CredentialAnchor>(&block.entries[i]);
            if (anchor && anchor->submitted_for == did) {
                out.emplace_back(AnchorLocation{block.height, i}, *anchor);
            }
        }
    }
    return out;
}

std::vector<PublicEvent> public_event_log(const RegistryChain& chain) {
    std::vector<PublicEvent> events;
    for (const auto& block : chain.blocks) {
        for (const auto& entry : block.entries) {
            PublicEvent ev;
            ev.timestamp = block.timestamp;
            ev.height = block.height;
            if (const auto* pub = std::get_if<DidDocPublish>(&entry)) {
                ev.did = pub->document.id;
                ev.kind = EventKind::DidPublished;
                for (const auto& ep : pub->document.service_endpoints) ev.endpoint_types.push_back(ep.type);
            } else if (const auto* upd = std::get_if<DidDocUpdate>(&entry)) {
                ev.did = upd->document.id;
                ev.kind = EventKind::DidUpdated;
                for (const auto& ep : upd->document.service_endpoints) ev.endpoint_types.push_back(ep.type);
            } else {
                const auto& anchor = std::get<CredentialAnchor>(entry);
                ev.did = anchor.submitted_for;
                ev.kind = EventKind::CredentialAnchored;
            }
            events.push_back(std::move(ev));
        }
    }
    return events;
}

DidDocument resolve(const Did& did, const RegistryChain& chain) {
    if (did.method == "key") {
        auto pk = did_key_public_key(did);
        if (!pk) {
            raise(ErrorCode::MalformedDid, "not a decodable key-method id: " + did.str());
        }
        return did_key_from_public_key(*pk).second;
    }
    if (did.method == "sim") {
        const DidDocument* latest = nullptr;
        for (const auto& block : chain.blocks) {
            for (const auto& entry : block.entries) {
                const DidDocument* doc = nullptr;
                if (const auto* pub = std::get_if<DidDocPublish>(&entry)) doc = &pub->document;
                if (const auto* upd = std::get_if<DidDocUpdate>(&entry)) doc = &upd->document;
                if (doc && doc->id == did && (!latest || doc->version > latest->version)) {
                    latest = doc;
                }
            }
        }
        if (!latest) {
            raise(ErrorCode::NotFound, "no document published for " + did.str());
        }
        return *latest;
    }
    raise(ErrorCode::NotFound, "unresolvable method: " + did.method);
}

std::optional<DidDocument> RegistryResolver::resolve(const Did& did) const {
    try {
        return credlab::resolve(did, *chain_);
    } catch (const Error&) {
        if (fallback_) return fallback_->resolve(did);
        return std::nullopt;
    }
}

std::string chain_to_text(const RegistryChain& chain) {
    Value::Object header;
    Value::Array auth_values;
    for (const auto& a : chain.authority_set) {
        Value::Object av;
        av.emplace("id", a.id);
        av.emplace("publicKey", a.public_key.hex());
        auth_values.push_back(Value(std::move(av)));
    }
    header.emplace("authorities", std::move(auth_values));
    header.emplace("quorum", static_cast<std::int64_t>(chain.quorum));

    std::string out = canonical_text(Value(std::move(header)));
    out.push_back('\n');
    for (const auto& block : chain.blocks) {
        out += canonical_text(block.to_value());
        out.push_back('\n');
    }
    return out;
}

RegistryChain chain_from_text(std::string_view text) {
    try {
        std::vector<std::string_view> lines;
        while (!text.empty()) {
            std::size_t nl = text.find('\n');
            if (nl == std::string_view::npos) {
                raise(ErrorCode::MalformedChain, "missing final newline");
            }
            lines.push_back(text.substr(0, nl));
            text.remove_prefix(nl + 1);
        }
        if (lines.empty()) {
            raise(ErrorCode::MalformedChain, "empty chain file");
        }
        Value header = parse_canonical(lines[0]);
        RegistryChain chain;
        std::int64_t quorum = header.at("quorum").as_integer();
        if (quorum < 1) raise(ErrorCode::MalformedChain, "quorum must be >= 1");
        chain.quorum = static_cast<std::uint32_t>(quorum);
        for (const Value& a : header.at("authorities").as_array()) {
            chain.authority_set.push_back(
                AuthorityPublic{a.at("id").as_string(), Ed25519PublicKey::from_hex(a.at("publicKey").as_string())});
        }
        for (std::size_t i = 1; i < lines.size(); ++i) {
            chain.blocks.push_back(Block::from_value(parse_canonical(lines[i])));
        }
        return chain;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::MalformedChain) throw;
        raise(ErrorCode::MalformedChain, e.what());
    }
}

} // namespace credlab
