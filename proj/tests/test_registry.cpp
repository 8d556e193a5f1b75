#include <doctest.h>

#include "credlab/errors.hpp"
#include "credlab/registry.hpp"

using namespace credlab;

namespace {

struct Consortium {
    std::vector<Authority> authorities;
    RegistryChain chain;
    DeterministicRandom rng{17};
    Timestamp t = Timestamp::parse("2021-01-05T09:00:00Z");

    explicit Consortium(std::uint32_t n = 3, std::uint32_t quorum = 2) {
        DeterministicRandom seedr(99);
        std::vector<AuthorityPublic> publics;
        for (std::uint32_t i = 0; i < n; ++i) {
            authorities.push_back(Authority::create("auth-" + std::to_string(i + 1), seedr));
            publics.push_back(AuthorityPublic{authorities[i].id, authorities[i].keys.public_key});
        }
        chain = make_chain(publics, quorum);
    }

    Timestamp tick() {
        Timestamp now = t;
        t = t.plus_seconds(300);
        return now;
    }

    DidDocument doc_for(const std::string& name, std::uint64_t version = 1) {
        Ed25519Keypair kp = Ed25519Keypair::from_seed(sha256(as_bytes("actor:" + name)).bytes);
        DidDocument d = make_key_document(Did::sim(name), kp.public_key, t);
        d.version = version;
        return d;
    }
};

} // namespace

TEST_CASE("append honors the quorum") {
    Consortium c;
    RegistryChain next = append_block(c.chain, {DidDocPublish{c.doc_for("hospital-01")}},
                                      {c.authorities[0], c.authorities[2]}, c.tick());
    CHECK(next.blocks.size() == 1);
    CHECK(verify_chain(next).ok);

    CHECK_THROWS_AS(append_block(c.chain, {DidDocPublish{c.doc_for("x")}}, {c.authorities[0]}, c.tick()), Error);
    // duplicate signer does not count twice
    CHECK_THROWS_AS(
        append_block(c.chain, {DidDocPublish{c.doc_for("x")}}, {c.authorities[0], c.authorities[0]}, c.tick()),
        Error);
}

TEST_CASE("entry validation tracks document versions") {
    Consortium c;
    c.chain = append_block(c.chain, {DidDocPublish{c.doc_for("patient-1")}}, c.authorities, c.tick());

    // version must step by one
    CHECK_THROWS_AS(
        append_block(c.chain, {DidDocUpdate{c.doc_for("patient-1", 4)}}, c.authorities, c.tick()), Error);
    try {
        append_block(c.chain, {DidDocUpdate{c.doc_for("patient-1", 4)}}, c.authorities, c.tick());
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StaleVersion);
    }

    CHECK_THROWS_AS(append_block(c.chain, {DidDocPublish{c.doc_for("patient-1")}}, c.authorities, c.tick()),
                    Error);
    CHECK_THROWS_AS(append_block(c.chain, {DidDocUpdate{c.doc_for("ghost", 2)}}, c.authorities, c.tick()),
                    Error);

    RegistryChain updated =
        append_block(c.chain, {DidDocUpdate{c.doc_for("patient-1", 2)}}, c.authorities, c.tick());
    CHECK(verify_chain(updated).ok);
    CHECK(resolve(Did::sim("patient-1"), updated).version == 2);
}

TEST_CASE("append leaves existing blocks byte-identical") {
    Consortium c;
    RegistryChain one = append_block(c.chain, {DidDocPublish{c.doc_for("a")}}, c.authorities, c.tick());
    RegistryChain two = append_block(one, {DidDocPublish{c.doc_for("b")}}, c.authorities, c.tick());
    CHECK(canonical_bytes(one.blocks[0].to_value()) == canonical_bytes(two.blocks[0].to_value()));
    CHECK(two.blocks[1].prev_hash == one.blocks[0].digest());
}

TEST_CASE("verification detects tampering, quorum loss and broken links") {
    Consortium c;
    for (const char* name : {"a", "b", "c"}) {
        c.chain = append_block(c.chain, {DidDocPublish{c.doc_for(name)}}, c.authorities, c.tick());
    }
    REQUIRE(verify_chain(c.chain).ok);

    SUBCASE("entry mutated in block 1") {
        RegistryChain bad = c.chain;
        auto& entry = std::get<DidDocPublish>(bad.blocks[1].entries[0]);
        entry.document.version = 7; // one flipped field
        ChainVerdict v = verify_chain(bad);
        CHECK_FALSE(v.ok);
        CHECK(v.height == 1);
    }
    SUBCASE("signatures dropped below quorum") {
        RegistryChain bad = c.chain;
        bad.blocks[2].signatures.resize(1);
        ChainVerdict v = verify_chain(bad);
        CHECK_FALSE(v.ok);
        CHECK(v.height == 2);
    }
    SUBCASE("forged signature does not count") {
        RegistryChain bad = c.chain;
        bad.blocks[0].signatures[0].signature.bytes[5] ^= 1;
        bad.blocks[0].signatures.resize(1);
        CHECK_FALSE(verify_chain(bad).ok);
    }
    SUBCASE("link break") {
        RegistryChain bad = c.chain;
        bad.blocks[2].prev_hash.bytes[0] ^= 1;
        ChainVerdict v = verify_chain(bad);
        CHECK_FALSE(v.ok);
        CHECK(v.height == 2);
    }
}

TEST_CASE("find_anchor returns the earliest match") {
    Consortium c;
    Digest32 d = sha256(as_bytes("some credential"));
    c.chain = append_block(c.chain, {CredentialAnchor{PlainHashAnchor{d}, Did::sim("p1")}}, c.authorities, c.tick());
    c.chain = append_block(c.chain, {CredentialAnchor{PlainHashAnchor{d}, Did::sim("p2")}}, c.authorities, c.tick());

    auto loc = find_anchor(c.chain, d);
    REQUIRE(loc.has_value());
    CHECK(loc->height == 0);
    CHECK(loc->entry_index == 0);

    CHECK_FALSE(find_anchor(c.chain, sha256(as_bytes("unanchored"))).has_value());

    auto per_subject = anchors_for(c.chain, Did::sim("p2"));
    REQUIRE(per_subject.size() == 1);
    CHECK(per_subject[0].first.height == 1);
}

TEST_CASE("public event log is chronological and exposes endpoint types") {
    Consortium c;
    CHECK(public_event_log(c.chain).empty());

    DidDocument hospital = c.doc_for("hospital-01");
    hospital.service_endpoints.push_back(
        ServiceEndpoint{"did:sim:hospital-01#covid-testing", "CovidTestingFacility", "https://h.example.org"});
    c.chain = append_block(c.chain, {DidDocPublish{hospital}}, c.authorities, c.tick());
    c.chain = append_block(c.chain, {DidDocPublish{c.doc_for("patient-1")}}, c.authorities, c.tick());
    c.chain = append_block(
        c.chain, {CredentialAnchor{PlainHashAnchor{sha256(as_bytes("vc"))}, Did::sim("patient-1")}},
        c.authorities, c.tick());

    auto events = public_event_log(c.chain);
    REQUIRE(events.size() == 3);
    CHECK(events[0].kind == EventKind::DidPublished);
    CHECK(events[0].endpoint_types == std::vector<std::string>{"CovidTestingFacility"});
    CHECK(events[1].endpoint_types.empty());
    CHECK(events[2].kind == EventKind::CredentialAnchored);
    CHECK(events[2].did == Did::sim("patient-1"));
    CHECK(events[0].timestamp < events[1].timestamp);
    CHECK(events[1].timestamp < events[2].timestamp);

    // update that adds an endpoint surfaces the type
    DidDocument updated = c.doc_for("patient-1", 2);
    updated.service_endpoints.push_back(
        ServiceEndpoint{"did:sim:patient-1#t", "CovidTestingFacility", "https://x.example.org"});
    c.chain = append_block(c.chain, {DidDocUpdate{updated}}, c.authorities, c.tick());
    events = public_event_log(c.chain);
    CHECK(events[3].kind == EventKind::DidUpdated);
    CHECK(events[3].endpoint_types == std::vector<std::string>{"CovidTestingFacility"});
}

TEST_CASE("resolution by method") {
    Consortium c;
    CHECK_THROWS_AS(resolve(Did::sim("nobody"), c.chain), Error);
    try {
        resolve(Did::sim("nobody"), c.chain);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotFound);
    }
    CHECK_THROWS_AS(resolve(parse_did("did:web:vc.transmute.world"), c.chain), Error);
    CHECK_THROWS_AS(resolve(parse_did("did:key:zzz"), c.chain), Error);
}

TEST_CASE("chain files round trip and reject corruption") {
    Consortium c;
    c.chain = append_block(c.chain, {DidDocPublish{c.doc_for("a")}}, c.authorities, c.tick());
    c.chain = append_block(
        c.chain, {CredentialAnchor{PlainHashAnchor{sha256(as_bytes("vc"))}, Did::sim("a")}}, c.authorities,
        c.tick());

    std::string text = chain_to_text(c.chain);
    RegistryChain back = chain_from_text(text);
    CHECK(verify_chain(back).ok);
    CHECK(chain_to_text(back) == text);
    CHECK(back.blocks.size() == c.chain.blocks.size());

    CHECK_THROWS_AS(chain_from_text(text.substr(0, text.size() / 2)), Error);
    CHECK_THROWS_AS(chain_from_text(""), Error);
    CHECK_THROWS_AS(chain_from_text("not a chain\n"), Error);

    // flip one byte inside a block line: parse may survive but verification must not
    std::string mutated = text;
    std::size_t pos = mutated.find("did:sim:a");
    REQUIRE(pos != std::string::npos);
    mutated[pos + 8] = 'b';
    bool rejected = false;
    try {
        rejected = !verify_chain(chain_from_text(mutated)).ok;
    } catch (const Error&) {
        rejected = true;
    }
    CHECK(rejected);
}

TEST_CASE("quorum configuration is validated") {
    DeterministicRandom rng(2);
    std::vector<AuthorityPublic> one = {{"a", Ed25519Keypair::generate(rng).public_key}};
    CHECK_THROWS_AS(make_chain(one, 2), Error);
    CHECK_THROWS_AS(make_chain({}, 1), Error);
    CHECK_THROWS_AS(make_chain({one[0], one[0]}, 1), Error); // duplicate ids
}
