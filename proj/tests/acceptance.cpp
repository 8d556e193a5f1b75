// Acceptance suite: runs every shipped criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code 0 iff all pass.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "credlab/attacks.hpp"
#include "credlab/errors.hpp"
#include "credlab/scenario.hpp"

#include "support.hpp"

using namespace credlab;
using namespace credlab::testing;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& what) {
    if (!condition) throw CheckFailure(what);
}

using Seconds = std::chrono::duration<double>;

Seconds timed(const std::function<void()>& fn) {
    auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::steady_clock::now() - start;
}

constexpr int kPropertyCases = 500;

// ---------------------------------------------------------------------------

void criterion_1_dictionary_baseline() {
    ScenarioResult run = run_scenario(shipped_scenario("baseline_attacked"), 42);
    require(run.report.attacks.size() == 2, "scenario must fire two attacks");
    const AttackReport& full = run.report.attacks[0];
    require(full.attack == "dictionary", "first attack is the dictionary");
    require(full.succeeded, "dictionary over {birthDate, IgM, IgG} must succeed against the plain hash");
    require(full.recovered.has_value(), "dictionary must report recovered claims");
    require(full.recovered->at("birthDate") == Value("1958-07-17"), "recovered birthdate must be 1958-07-17");
    require(full.recovered->at("IgM") == Value(false), "recovered IgM must be false");
    require(full.recovered->at("IgG") == Value(true), "recovered IgG must be true");

    // day-count oracle by calendar enumeration
    std::uint64_t day_count = 0;
    for (Date d = Date::from_ymd(1900, 1, 1); d <= Date::from_ymd(2020, 12, 31); d = d.next_day()) ++day_count;
    require(day_count == 44195, "calendar enumeration must count 44195 days");
    require(full.work <= 4 * day_count,
            "work " + std::to_string(full.work) + " must be <= 4 x " + std::to_string(day_count));
    require(full.elapsed < Seconds(10.0), "full-domain dictionary must finish in under 10 s");

    // two-flag variant, run directly against public artifacts
    {
        DeterministicRandom rng(7);
        LogicalClock clock(Timestamp::parse("2021-01-05T09:00:00Z"));
        std::vector<Authority> authorities;
        std::vector<AuthorityPublic> publics;
        for (int i = 0; i < 3; ++i) {
            authorities.push_back(Authority::create("auth-" + std::to_string(i + 1), rng));
            publics.push_back(AuthorityPublic{authorities.back().id, authorities.back().keys.public_key});
        }
        RegistryChain chain = make_chain(publics, 2);
        HospitalState hospital = register_hospital("st-mary-hospital", chain, authorities, clock.tick(), rng);
        HolderState patient = register_patient("louis-pasteur", chain, authorities, clock.tick(), rng);
        IdentityFields identity{"Louis", "Pasteur", Date::from_ymd(1958, 7, 17),
                                sha256(as_bytes("photo:Louis:Pasteur"))};
        patient.credential = issue_test_result(hospital, patient.did, identity, false, true, clock.tick());
        anchor_credential(patient, Profile::Baseline, AnchorMode::Salted, chain, authorities, clock.tick(), rng);

        ClaimTemplate tmpl;
        for (const char* f : {"givenName", "familyName", "birthDate", "image"}) {
            tmpl.known.emplace(f, patient.credential->body.claims.at(f));
        }
        tmpl.unknown.emplace("IgM", FlagDomain{});
        tmpl.unknown.emplace("IgG", FlagDomain{});

        auto anchors = anchors_for(chain_from_text(chain_to_text(chain)), patient.did);
        require(anchors.size() == 1, "one anchor expected");
        AttackReport flags = dictionary_attack(anchors[0].second.anchor, tmpl,
                                               CredentialPublicContext::of(*patient.credential));
        require(flags.succeeded, "two-flag dictionary must succeed");
        require(flags.work <= 4, "two-flag dictionary must try at most 4 candidates");
        require(flags.elapsed < Seconds(0.010), "two-flag dictionary must finish in under 10 ms");
        require(flags.recovered->at("IgM") == Value(false) && flags.recovered->at("IgG") == Value(true),
                "two-flag dictionary must recover (false, true)");
    }
}

void criterion_2_dictionary_hardened() {
    ScenarioResult run = run_scenario(shipped_scenario("hardened_attacked"), 42);
    require(run.report.attacks.size() == 2, "scenario must fire two attacks");
    const AttackReport& r = run.report.attacks[0];
    require(r.attack == "dictionary", "first attack is the dictionary");
    require(!r.succeeded, "dictionary must fail against the salted commitment");
    require(!r.recovered.has_value(), "failed dictionary must recover nothing");

    // identical scenario otherwise: same actions, same domain
    ScenarioScript b = shipped_scenario("baseline_attacked");
    ScenarioScript h = shipped_scenario("hardened_attacked");
    require(b.actions.size() == h.actions.size(), "differential pair must have identical action counts");
    for (std::size_t i = 0; i < b.actions.size(); ++i) {
        require(b.actions[i].kind == h.actions[i].kind, "differential pair action kinds must match");
    }
}

void criterion_3_replay_differential() {
    ScenarioResult baseline = run_scenario(shipped_scenario("baseline_attacked"), 42);
    const AttackReport& b = baseline.report.attacks[1];
    require(b.attack == "replay", "second attack is the replay");
    require(b.succeeded, "baseline capture-and-replay must be accepted at the second verifier");

    ScenarioResult hardened = run_scenario(shipped_scenario("hardened_attacked"), 42);
    const AttackReport& h = hardened.report.attacks[1];
    require(!h.succeeded, "hardened replay must be rejected");
    bool reason_ok = h.narrative.find("HolderBindingFailure") != std::string::npos ||
                     h.narrative.find("ReplayedChallenge") != std::string::npos ||
                     h.narrative.find("InvalidChallenge") != std::string::npos;
    require(reason_ok, "hardened replay rejection must name a binding/replay/challenge reason");

    // deterministic under the fixed seed
    ScenarioResult again = run_scenario(shipped_scenario("hardened_attacked"), 42);
    require(again.report.text() == hardened.report.text(), "replay differential must be deterministic");
}

void criterion_4_tamper_matrix() {
    DeterministicRandom rng(11);
    LogicalClock clock(Timestamp::parse("2021-01-05T09:00:00Z"));
    std::vector<Authority> authorities;
    std::vector<AuthorityPublic> publics;
    for (int i = 0; i < 3; ++i) {
        authorities.push_back(Authority::create("auth-" + std::to_string(i + 1), rng));
        publics.push_back(AuthorityPublic{authorities.back().id, authorities.back().keys.public_key});
    }
    RegistryChain chain = make_chain(publics, 2);
    HospitalState hospital = register_hospital("st-mary-hospital", chain, authorities, clock.tick(), rng);
    HolderState patient = register_patient("louis-pasteur", chain, authorities, clock.tick(), rng);
    IdentityFields identity{"Louis", "Pasteur", Date::from_ymd(1958, 7, 17),
                            sha256(as_bytes("photo:Louis:Pasteur"))};
    patient.credential = issue_test_result(hospital, patient.did, identity, false, true, clock.tick());
    anchor_credential(patient, Profile::Baseline, AnchorMode::Salted, chain, authorities, clock.tick(), rng);

    VerifiableCredential foreign = issue_test_result(
        hospital, patient.did,
        IdentityFields{"Unrelated", "Subject", Date::from_ymd(1970, 1, 1), sha256(as_bytes("photo:U:S"))}, true,
        true, clock.tick());

    RegistryResolver resolver(chain);
    Timestamp now = clock.tick();
    struct Cell {
        TamperMutation mutation;
        VerifyProfile profile;
        bool expect_success;
    };
    const Cell cells[] = {
        {TamperMutation::StripProof, VerifyProfile::Strict, false},
        {TamperMutation::StripProof, VerifyProfile::Permissive, true},
        {TamperMutation::ReattachForeignProof, VerifyProfile::Strict, false},
        {TamperMutation::ReattachForeignProof, VerifyProfile::Permissive, false},
        {TamperMutation::RawFieldInjection, VerifyProfile::Strict, false},
        {TamperMutation::RawFieldInjection, VerifyProfile::Permissive, true},
    };
    int matched = 0;
    for (const Cell& cell : cells) {
        SeenDigestLedger fresh;
        AttackReport r = signature_tamper_attack(*patient.credential, cell.mutation, cell.profile, resolver, now,
                                                 &chain, &foreign.proof, &fresh);
        if (r.succeeded == cell.expect_success) ++matched;
    }
    require(matched == 6, "all 6 mutation x profile cells must match expectation, matched " +
                              std::to_string(matched));
}

void criterion_5_correlation() {
    ScenarioResult run = run_scenario(shipped_scenario("correlation_pair"), 42);
    require(run.report.attacks.size() == 1, "correlation scenario fires one attack");
    require(run.report.attacks[0].succeeded,
            "correlation must recover at least one ground-truth link from the chain file alone");
    require(run.report.expectations_ok, "correlation scenario expectations must hold");
}

// --- criterion 6: property suites, >= 500 randomized cases each ------------

void property_canonicalization() {
    DeterministicRandom rng(601);
    Did issuer = golden_issuer_did();
    for (int i = 0; i < kPropertyCases; ++i) {
        CredentialBody a = gen_body(rng, issuer);
        CredentialBody b = gen_body(rng, issuer);
        Bytes ca = canonicalize(a);
        // round trip
        require(canonicalize(parse_body(ca)) == ca, "canonicalize/parse round trip failed");
        // injectivity on distinct bodies
        if (!(canonicalize(b) == ca)) continue;
        require(a.claims == b.claims && a.id == b.id && a.issuance_date == b.issuance_date &&
                    a.expiration_date == b.expiration_date && a.subject_did == b.subject_did,
                "distinct bodies canonicalized to identical bytes");
    }
}

void property_tamper_evidence() {
    DeterministicRandom rng(602);
    Ed25519Keypair issuer_key = golden_issuer_keypair();
    StubResolver resolver = golden_resolver();
    for (int i = 0; i < kPropertyCases; ++i) {
        CredentialBody body = gen_body(rng, golden_issuer_did());
        VerifiableCredential vc = sign_credential(body, issuer_key, ProofAttachment::Embedded,
                                                  body.issuance_date);
        vc.body = mutate_one_field(rng, body);
        if (canonicalize(vc.body) == canonicalize(body)) continue; // mutation collided (cannot happen)
        Verdict v = verify_credential(vc, resolver, VerifyProfile::Strict, body.issuance_date.plus_days(1));
        require(!v.accepted, "strict verification accepted a mutated body");
        require(v.reason == RejectReason::SignatureMismatch, "mutation must surface as a signature mismatch");
    }
}

void property_registry() {
    DeterministicRandom rng(603);
    std::vector<Authority> authorities;
    std::vector<AuthorityPublic> publics;
    for (int i = 0; i < 4; ++i) {
        authorities.push_back(Authority::create("auth-" + std::to_string(i + 1), rng));
        publics.push_back(AuthorityPublic{authorities.back().id, authorities.back().keys.public_key});
    }
    LogicalClock clock(Timestamp::parse("2021-01-05T09:00:00Z"));

    auto random_entry = [&](int n) {
        std::string name = "actor-" + std::to_string(n);
        if (rng.below(3) == 0) {
            return RegistryEntry{CredentialAnchor{PlainHashAnchor{sha256(rng.bytes(16))}, Did::sim(name)}};
        }
        return RegistryEntry{
            DidDocPublish{make_key_document(Did::sim(name), Ed25519Keypair::generate(rng).public_key, clock.now())}};
    };

    // Append-only over a long-lived chain: each append leaves a randomly
    // probed earlier block byte-identical.
    RegistryChain grown = make_chain(publics, 3);
    int name_counter = 0;
    for (int i = 0; i < kPropertyCases; ++i) {
        RegistryChain before = grown;
        grown = append_block(grown, {random_entry(name_counter++)}, authorities, clock.tick());
        require(grown.blocks.size() == before.blocks.size() + 1, "append must add exactly one block");
        if (!before.blocks.empty()) {
            std::size_t probe = rng.below(before.blocks.size());
            require(canonical_bytes(grown.blocks[probe].to_value()) ==
                        canonical_bytes(before.blocks[probe].to_value()),
                    "append mutated an existing block");
        }
    }
    require(verify_chain(grown).ok, "grown chain must verify end to end");

    // Quorum soundness and byte-level integrity over fresh short chains.
    // Quorum equals the authority count, so a single corrupted signature is
    // never absorbed by redundancy and every byte flip must be caught.
    for (int i = 0; i < kPropertyCases; ++i) {
        RegistryChain chain = make_chain(publics, 4);
        chain = append_block(chain, {random_entry(name_counter++)}, authorities, clock.tick());
        chain = append_block(chain, {random_entry(name_counter++)}, authorities, clock.tick());
        require(verify_chain(chain).ok, "valid short chain must verify");

        RegistryChain under = chain;
        std::size_t at = rng.below(under.blocks.size());
        under.blocks[at].signatures.resize(rng.below(4));
        require(!verify_chain(under).ok, "chain with a sub-quorum block must be rejected");

        // flip one random byte of one random block's serialized form; if it
        // still parses, verification must fail
        std::string text = chain_to_text(chain);
        std::size_t header_end = text.find('\n') + 1;
        std::size_t pos = header_end + rng.below(text.size() - header_end - 1);
        if (text[pos] == '\n') ++pos;
        std::string mutated = text;
        mutated[pos] = mutated[pos] == 'a' ? 'b' : 'a';
        bool rejected;
        try {
            rejected = !verify_chain(chain_from_text(mutated)).ok;
        } catch (const Error&) {
            rejected = true;
        }
        require(rejected, "tampered chain text must fail to verify or parse");
    }
}

void property_commitment_binding() {
    DeterministicRandom rng(604);
    for (int i = 0; i < kPropertyCases; ++i) {
        Bytes p = rng.bytes(1 + rng.below(64));
        Bytes q = rng.bytes(1 + rng.below(64));
        SaltedCommitment c = commit(p, rng);
        require(verify_commitment(c.commitment, c.salt, p), "commitment must open on its preimage");
        if (q != p) {
            require(!verify_commitment(c.commitment, c.salt, q), "commitment opened on a different preimage");
        }
        Salt32 wrong = rng.array<32>();
        if (wrong != c.salt) {
            require(!verify_commitment(c.commitment, wrong, p), "commitment opened under a different salt");
        }
    }
}

void property_seal_roundtrip() {
    DeterministicRandom rng(605);
    for (int i = 0; i < kPropertyCases; ++i) {
        X25519Keypair recipient = X25519Keypair::generate(rng);
        Digest32 digest = sha256(rng.bytes(16));
        SealedCiphertextAnchor anchor = seal(digest, recipient.public_key, rng);
        require(open_sealed(anchor, recipient.secret_key) == digest, "seal/open round trip failed");

        SealedCiphertextAnchor tampered = anchor;
        std::size_t at = rng.below(tampered.ciphertext.size());
        tampered.ciphertext[at] ^= static_cast<std::uint8_t>(1 + rng.below(255));
        bool failed = false;
        try {
            (void)open_sealed(tampered, recipient.secret_key);
        } catch (const Error&) {
            failed = true;
        }
        require(failed, "tampered ciphertext must fail authentication");
    }
}

void criterion_6_property_suites() {
    property_canonicalization();
    property_tamper_evidence();
    property_registry();
    property_commitment_binding();
    property_seal_roundtrip();
}

void criterion_7_reproducibility() {
    for (const char* name : {"baseline_attacked", "hardened_attacked", "correlation_pair"}) {
        ScenarioScript script = shipped_scenario(name);
        ScenarioResult a = run_scenario(script, 42);
        ScenarioResult b = run_scenario(script, 42);
        require(a.chain_text == b.chain_text, std::string(name) + ": chain files differ across runs");
        require(a.report.text() == b.report.text(), std::string(name) + ": report files differ across runs");
    }
}

void criterion_8_honest_completeness() {
    for (const char* name : {"baseline_honest", "hardened_honest"}) {
        ScenarioResult run = run_scenario(shipped_scenario(name), 42);
        require(run.report.expectations_ok, std::string(name) + ": expectations failed");
        bool verified = false;
        for (const auto& a : run.report.actions) {
            require(a.matched, std::string(name) + ": action mismatch at " + a.source);
            if (a.outcome == "accept") verified = true;
        }
        require(verified, std::string(name) + ": no accepting verification found");
        require(verify_chain(run.chain).ok, std::string(name) + ": final chain fails verification");
    }
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<void()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "dictionary attack recovers birthdate and flags from a plain anchor within the work budget",
         criterion_1_dictionary_baseline},
        {2, "dictionary attack fails against hardened salted commitments over the identical domain",
         criterion_2_dictionary_hardened},
        {3, "replay accepted under baseline, rejected under hardened with a named reason",
         criterion_3_replay_differential},
        {4, "signature tamper differential matches all six mutation x profile cells", criterion_4_tamper_matrix},
        {5, "correlation recovers a ground-truth link from the public chain file alone", criterion_5_correlation},
        {6, "property suites (canonicalization, tamper-evidence, registry, commitment, sealing) at 500 cases",
         criterion_6_property_suites},
        {7, "scenario runs with a fixed seed produce byte-identical chain and report files",
         criterion_7_reproducibility},
        {8, "honest baseline and hardened flows complete with all checks passing", criterion_8_honest_completeness},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::string failure;
        Seconds elapsed{};
        try {
            elapsed = timed(c.run);
        } catch (const std::exception& e) {
            failure = e.what();
        }
        if (failure.empty()) {
            std::cout << "criterion " << c.id << " [" << c.title << "]: PASS (" << elapsed.count() << " s)\n";
        } else {
            ++failures;
            std::cout << "criterion " << c.id << " [" << c.title << "]: FAIL - " << failure << "\n";
        }
    }
    if (failures > 0) {
        std::cout << failures << " of " << criteria.size() << " acceptance criteria failed\n";
        return 1;
    }
    std::cout << "all " << criteria.size() << " acceptance criteria passed\n";
    return 0;
}
