#include <doctest.h>

#include "credlab/attacks.hpp"
#include "credlab/errors.hpp"

#include "support.hpp"

using namespace credlab;
using namespace credlab::testing;

namespace {

/// Baseline world with an anchored golden-valued credential, everything an
/// attacker needs reachable through public artifacts.
struct AttackWorld {
    DeterministicRandom rng{101};
    LogicalClock clock{Timestamp::parse("2021-01-05T09:00:00Z"), 300};
    std::vector<Authority> authorities;
    RegistryChain chain;
    HospitalState hospital;
    HolderState patient;
    VerifierState first_verifier;
    VerifierState second_verifier;
    Profile profile;

    explicit AttackWorld(Profile p) : profile(p) {
        std::vector<AuthorityPublic> publics;
        for (int i = 0; i < 3; ++i) {
            authorities.push_back(Authority::create("auth-" + std::to_string(i + 1), rng));
            publics.push_back(AuthorityPublic{authorities.back().id, authorities.back().keys.public_key});
        }
        chain = make_chain(publics, 2);
        hospital = register_hospital("st-mary-hospital", chain, authorities, clock.tick(), rng);
        patient = register_patient("louis-pasteur", chain, authorities, clock.tick(), rng);
        first_verifier = register_verifier("employer-hr", chain, authorities, clock.tick(), rng);
        second_verifier = register_verifier("border-control", chain, authorities, clock.tick(), rng);

        IdentityFields identity{"Louis", "Pasteur", Date::from_ymd(1958, 7, 17),
                                sha256(as_bytes("photo:Louis:Pasteur"))};
        patient.credential = issue_test_result(hospital, patient.did, identity, false, true, clock.tick());
        anchor_credential(patient, profile, AnchorMode::Salted, chain, authorities, clock.tick(), rng);
    }

    ClaimTemplate template_for(std::initializer_list<std::string> unknowns) {
        ClaimTemplate tmpl;
        const auto& claims = patient.credential->body.claims;
        std::set<std::string> u(unknowns);
        for (const char* field : {"givenName", "familyName", "image"}) {
            tmpl.known.emplace(field, claims.at(field));
        }
        if (u.count("birthDate")) {
            tmpl.unknown.emplace("birthDate",
                                 DateRangeDomain{Date::from_ymd(1900, 1, 1), Date::from_ymd(2020, 12, 31)});
        } else {
            tmpl.known.emplace("birthDate", claims.at("birthDate"));
        }
        for (const char* flag : {"IgM", "IgG"}) {
            if (u.count(flag)) tmpl.unknown.emplace(flag, FlagDomain{});
            else tmpl.known.emplace(flag, claims.at(flag));
        }
        return tmpl;
    }

    AnchorPayload public_anchor() {
        // read back from the serialized chain: public artifact only
        RegistryChain parsed = chain_from_text(chain_to_text(chain));
        auto anchors = anchors_for(parsed, patient.did);
        REQUIRE(anchors.size() == 1);
        return anchors[0].second.anchor;
    }

    Bytes captured_presentation() {
        Timestamp now = clock.tick();
        std::optional<Challenge> ch;
        if (profile == Profile::Hardened) {
            ch = make_challenge(first_verifier, Profile::Hardened, now, rng);
        }
        Presentation p = present(patient, first_verifier.did, ch, profile, chain, now);
        Bytes bytes = p.to_bytes();
        VerifierDecision d = verify_presentation(first_verifier, Presentation::from_bytes(bytes), chain, now,
                                                 profile);
        REQUIRE(d.verdict.accepted);
        return bytes;
    }
};

} // namespace

TEST_CASE("dictionary over the two flags recovers the results with four digests at most") {
    AttackWorld w(Profile::Baseline);
    AttackReport r = dictionary_attack(w.public_anchor(), w.template_for({"IgM", "IgG"}),
                                       CredentialPublicContext::of(*w.patient.credential));
    CHECK(r.succeeded);
    CHECK(r.work <= 4);
    // exact accounting: candidates are tried in odometer order over
    // (IgG, IgM), so (true, false) is the third
    CHECK(r.work == 3);
    REQUIRE(r.recovered.has_value());
    CHECK(r.recovered->at("IgM") == Value(false));
    CHECK(r.recovered->at("IgG") == Value(true));
    CHECK(r.profile_attacked == Profile::Baseline);
}

TEST_CASE("dictionary including the birthdate recovers the fixture triple") {
    AttackWorld w(Profile::Baseline);
    AttackReport r = dictionary_attack(w.public_anchor(), w.template_for({"birthDate", "IgM", "IgG"}),
                                       CredentialPublicContext::of(*w.patient.credential));
    CHECK(r.succeeded);
    REQUIRE(r.recovered.has_value());
    CHECK(r.recovered->at("birthDate") == Value("1958-07-17"));
    CHECK(r.recovered->at("IgM") == Value(false));
    CHECK(r.recovered->at("IgG") == Value(true));

    // calendar-enumeration oracle for the domain bound
    std::uint64_t day_count = 0;
    for (Date d = Date::from_ymd(1900, 1, 1); d <= Date::from_ymd(2020, 12, 31); d = d.next_day()) ++day_count;
    CHECK(day_count == 44195);
    CHECK(r.work <= 4 * day_count);
}

TEST_CASE("the same dictionary fails against a salted commitment") {
    AttackWorld w(Profile::Hardened);
    AttackReport r = dictionary_attack(w.public_anchor(), w.template_for({"IgM", "IgG"}),
                                       CredentialPublicContext::of(*w.patient.credential));
    CHECK_FALSE(r.succeeded);
    CHECK(r.work == 4);
    CHECK_FALSE(r.recovered.has_value());
}

TEST_CASE("templates must cover the schema consistently") {
    AttackWorld w(Profile::Baseline);
    ClaimTemplate tmpl = w.template_for({"IgM", "IgG"});
    tmpl.unknown.emplace("birthDate", DateRangeDomain{Date::from_ymd(1900, 1, 1), Date::from_ymd(1900, 1, 2)});
    tmpl.known.emplace("birthDate", ClaimValue::date(Date::from_ymd(1958, 7, 17)));
    CHECK_THROWS_AS(tmpl.validate(), Error);

    ClaimTemplate gap = w.template_for({"IgM", "IgG"});
    gap.known.erase("givenName");
    CHECK_THROWS_AS(gap.validate(), Error);
}

TEST_CASE("baseline replay is accepted verbatim at a second verifier") {
    AttackWorld w(Profile::Baseline);
    Bytes captured = w.captured_presentation();
    AttackReport r = replay_attack(captured, w.second_verifier, w.chain, w.clock.tick(), Profile::Baseline);
    CHECK(r.succeeded);
    CHECK(r.work == 1);
    CHECK(r.recovered.has_value());
}

TEST_CASE("hardened replay fails: the nonce is bound to the first verifier") {
    AttackWorld w(Profile::Hardened);
    Bytes captured = w.captured_presentation();
    AttackReport r = replay_attack(captured, w.second_verifier, w.chain, w.clock.tick(), Profile::Hardened);
    CHECK_FALSE(r.succeeded);
    CHECK(r.narrative.find("InvalidChallenge") != std::string::npos);
}

TEST_CASE("hardened replay to the same verifier burns on the nonce ledger") {
    AttackWorld w(Profile::Hardened);
    Bytes captured = w.captured_presentation();
    AttackReport r = replay_attack(captured, w.first_verifier, w.chain, w.clock.tick(), Profile::Hardened);
    CHECK_FALSE(r.succeeded);
    CHECK(r.narrative.find("ReplayedChallenge") != std::string::npos);
}

TEST_CASE("tamper differential matches the six-cell expectation table") {
    AttackWorld w(Profile::Baseline);
    const VerifiableCredential& vc = *w.patient.credential;
    RegistryResolver resolver(w.chain);
    Timestamp now = w.clock.tick();

    VerifiableCredential foreign_vc = issue_test_result(
        w.hospital, w.patient.did,
        IdentityFields{"Unrelated", "Subject", Date::from_ymd(1970, 1, 1), sha256(as_bytes("photo:U:S"))}, true,
        true, now);

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
    for (const Cell& cell : cells) {
        SeenDigestLedger fresh;
        AttackReport r = signature_tamper_attack(vc, cell.mutation, cell.profile, resolver, now, &w.chain,
                                                 &foreign_vc.proof, &fresh);
        INFO(tamper_mutation_name(cell.mutation)
             << " under " << (cell.profile == VerifyProfile::Strict ? "strict" : "permissive"));
        CHECK(r.succeeded == cell.expect_success);
    }
}

TEST_CASE("correlation links patients to facilities from the public log alone") {
    AttackWorld w(Profile::Baseline);

    // ground truth: single patient anchored right after issuance
    auto anchors = anchors_for(w.chain, w.patient.did);
    REQUIRE(anchors.size() == 1);
    Timestamp anchor_time = w.chain.blocks[anchors[0].first.height].timestamp;
    CorrelationTruth truth = {{w.patient.did, w.hospital.did, anchor_time}};

    RegistryChain public_chain = chain_from_text(chain_to_text(w.chain));
    AttackReport r = correlation_attack(public_event_log(public_chain), truth);
    CHECK(r.succeeded);
    REQUIRE(r.recovered.has_value());
    CHECK(r.recovered->as_array().size() >= 1);
}

TEST_CASE("correlation on an empty log fails") {
    AttackReport r = correlation_attack({}, {});
    CHECK_FALSE(r.succeeded);
    CHECK(r.work >= 1);
}

TEST_CASE("correlation reports adjacency ties as ambiguous") {
    DeterministicRandom rng(55);
    Timestamp t0 = Timestamp::parse("2021-01-05T09:00:00Z");
    auto facility_event = [&](const char* name, Timestamp t) {
        PublicEvent ev;
        ev.timestamp = t;
        ev.did = Did::sim(name);
        ev.kind = EventKind::DidPublished;
        ev.endpoint_types = {kCovidTestingEndpointType};
        return ev;
    };
    PublicEvent anchor;
    anchor.timestamp = t0.plus_seconds(600);
    anchor.did = Did::sim("patient-x");
    anchor.kind = EventKind::CredentialAnchored;

    std::vector<PublicEvent> events = {facility_event("clinic-a", t0), facility_event("clinic-b", t0), anchor};
    CorrelationTruth truth = {{Did::sim("patient-x"), Did::sim("clinic-b"), anchor.timestamp}};
    AttackReport r = correlation_attack(events, truth);
    CHECK(r.succeeded); // one of the tied candidates is right
    REQUIRE(r.recovered.has_value());
    REQUIRE(r.recovered->as_array().size() == 2);
    for (const Value& row : r.recovered->as_array()) {
        CHECK(row.at("ambiguous") == Value(true));
    }
}
