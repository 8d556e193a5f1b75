#include "credlab/scenario.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include "credlab/errors.hpp"

namespace credlab {

namespace {

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> tokens;
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

bool parse_bool_token(const std::string& tok, std::size_t line_no) {
    if (tok == "true") return true;
    if (tok == "false") return false;
    raise(ErrorCode::ScriptParseError, "line " + std::to_string(line_no) + ": expected true/false, got " + tok);
}

/// Splits "key=value" pairs out of the token tail; returns leftover plain
/// tokens in order.
std::vector<std::string> split_pairs(const std::vector<std::string>& tokens, std::size_t start,
                                     std::map<std::string, std::string>& pairs) {
    std::vector<std::string> plain;
    for (std::size_t i = start; i < tokens.size(); ++i) {
        std::size_t eq = tokens[i].find('=');
        if (eq == std::string::npos) {
            plain.push_back(tokens[i]);
        } else {
            pairs[tokens[i].substr(0, eq)] = tokens[i].substr(eq + 1);
        }
    }
    return plain;
}

std::optional<std::string> take_expect(std::vector<std::string>& plain, std::size_t line_no) {
    for (std::size_t i = 0; i + 1 < plain.size(); ++i) {
        if (plain[i] == "expect") {
            std::string value = plain[i + 1];
            if (i + 2 != plain.size()) {
                raise(ErrorCode::ScriptParseError,
                      "line " + std::to_string(line_no) + ": expect clause must end the line");
            }
            plain.resize(i);
            return value;
        }
    }
    if (!plain.empty() && plain.back() == "expect") {
        raise(ErrorCode::ScriptParseError, "line " + std::to_string(line_no) + ": expect needs a value");
    }
    return std::nullopt;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& why) {
    raise(ErrorCode::ScriptParseError, "line " + std::to_string(line_no) + ": " + why);
}

} // namespace

ScenarioScript parse_scenario(std::string_view text, std::string name) {
    ScenarioScript script;
    script.name = std::move(name);
    bool have_profile = false;

    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        std::string effective = hash == std::string::npos ? line : line.substr(0, hash);
        std::vector<std::string> tokens = tokenize(effective);
        if (tokens.empty()) continue;
        const std::string& head = tokens[0];

        if (head == "profile") {
            if (tokens.size() != 2) parse_fail(line_no, "profile takes one argument");
            if (tokens[1] == "baseline") script.profile = Profile::Baseline;
            else if (tokens[1] == "hardened") script.profile = Profile::Hardened;
            else parse_fail(line_no, "unknown profile: " + tokens[1]);
            if (have_profile) parse_fail(line_no, "profile already set");
            have_profile = true;
            continue;
        }
        if (head == "authorities") {
            if (tokens.size() != 4 || tokens[2] != "quorum") parse_fail(line_no, "use: authorities <n> quorum <t>");
            script.authority_count = static_cast<std::uint32_t>(std::stoul(tokens[1]));
            script.quorum = static_cast<std::uint32_t>(std::stoul(tokens[3]));
            continue;
        }
        if (head == "anchor-mode") {
            if (tokens.size() != 2) parse_fail(line_no, "anchor-mode takes one argument");
            if (tokens[1] == "salted") script.anchor_mode = AnchorMode::Salted;
            else if (tokens[1] == "sealed") script.anchor_mode = AnchorMode::Sealed;
            else parse_fail(line_no, "unknown anchor mode: " + tokens[1]);
            continue;
        }
        if (head == "clock-start") {
            if (tokens.size() != 2) parse_fail(line_no, "clock-start takes one timestamp");
            script.clock_start = Timestamp::parse(tokens[1]);
            continue;
        }
        if (head == "clock-step") {
            if (tokens.size() != 2) parse_fail(line_no, "clock-step takes seconds");
            script.clock_step_seconds = std::stoll(tokens[1]);
            continue;
        }

        ScenarioAction action;
        action.source = effective;
        // Normalize the echoed source line for stable reports.
        {
            std::string normalized;
            for (const auto& t : tokens) {
                if (!normalized.empty()) normalized.push_back(' ');
                normalized += t;
            }
            action.source = normalized;
        }

        std::map<std::string, std::string> pairs;
        std::vector<std::string> plain = split_pairs(tokens, 1, pairs);
        action.expect = take_expect(plain, line_no);

        if (head == "register") {
            if (plain.size() != 2) parse_fail(line_no, "use: register <kind> <name>");
            action.kind = ScenarioAction::Kind::Register;
            if (plain[0] == "hospital") action.actor_kind = ActorKind::Hospital;
            else if (plain[0] == "patient") action.actor_kind = ActorKind::Patient;
            else if (plain[0] == "verifier") action.actor_kind = ActorKind::Verifier;
            else parse_fail(line_no, "unknown actor kind: " + plain[0]);
            action.name = plain[1];
        } else if (head == "issue") {
            if (plain.size() != 2) parse_fail(line_no, "use: issue <hospital> <patient> key=value...");
            action.kind = ScenarioAction::Kind::Issue;
            action.hospital = plain[0];
            action.patient = plain[1];
            for (const char* required : {"given", "family", "birthdate", "igm", "igg"}) {
                if (!pairs.count(required)) parse_fail(line_no, std::string("issue needs ") + required + "=");
            }
            action.given_name = pairs["given"];
            action.family_name = pairs["family"];
            action.birth_date = Date::parse(pairs["birthdate"]);
            action.igm = parse_bool_token(pairs["igm"], line_no);
            action.igg = parse_bool_token(pairs["igg"], line_no);
        } else if (head == "anchor") {
            if (plain.size() != 1) parse_fail(line_no, "use: anchor <patient>");
            action.kind = ScenarioAction::Kind::Anchor;
            action.patient = plain[0];
        } else if (head == "challenge") {
            if (plain.size() != 2) parse_fail(line_no, "use: challenge <verifier> <patient>");
            action.kind = ScenarioAction::Kind::Challenge;
            action.verifier = plain[0];
            action.patient = plain[1];
        } else if (head == "present") {
            if (plain.size() != 2) parse_fail(line_no, "use: present <patient> <verifier>");
            action.kind = ScenarioAction::Kind::Present;
            action.patient = plain[0];
            action.verifier = plain[1];
        } else if (head == "verify") {
            if (plain.size() != 1) parse_fail(line_no, "use: verify <verifier>");
            action.kind = ScenarioAction::Kind::Verify;
            action.verifier = plain[0];
        } else if (head == "attack") {
            if (plain.empty()) parse_fail(line_no, "attack needs a name");
            action.kind = ScenarioAction::Kind::Attack;
            action.attack_name = plain[0];
            if (action.attack_name == "dictionary") {
                if (plain.size() != 2) parse_fail(line_no, "use: attack dictionary <patient> [unknowns=...]");
                action.patient = plain[1];
                std::string unknowns = pairs.count("unknowns") ? pairs["unknowns"] : "igm,igg";
                std::istringstream us(unknowns);
                std::string field;
                while (std::getline(us, field, ',')) action.unknown_fields.push_back(field);
            } else if (action.attack_name == "replay") {
                if (plain.size() != 3) parse_fail(line_no, "use: attack replay <from-verifier> <to-verifier>");
                action.verifier = plain[1];
                action.replay_to = plain[2];
            } else if (action.attack_name == "tamper") {
                if (plain.size() != 4) parse_fail(line_no, "use: attack tamper <patient> <mutation> <profile>");
                action.patient = plain[1];
                if (plain[2] == "strip") action.mutation = TamperMutation::StripProof;
                else if (plain[2] == "reattach") action.mutation = TamperMutation::ReattachForeignProof;
                else if (plain[2] == "inject") action.mutation = TamperMutation::RawFieldInjection;
                else parse_fail(line_no, "unknown mutation: " + plain[2]);
                if (plain[3] == "strict") action.tamper_profile = VerifyProfile::Strict;
                else if (plain[3] == "permissive") action.tamper_profile = VerifyProfile::Permissive;
                else parse_fail(line_no, "unknown verify profile: " + plain[3]);
            } else if (action.attack_name == "correlate") {
                if (plain.size() != 1) parse_fail(line_no, "use: attack correlate");
            } else {
                parse_fail(line_no, "unknown attack: " + action.attack_name);
            }
        } else {
            parse_fail(line_no, "unknown directive: " + head);
        }
        script.actions.push_back(std::move(action));
    }

    if (!have_profile) {
        raise(ErrorCode::ScriptParseError, "script never sets a profile");
    }
    return script;
}

ScenarioScript load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.stem().string());
}

Value RunReport::to_value() const {
    Value::Object o;
    Value::Array action_values;
    for (const auto& a : actions) {
        Value::Object av;
        av.emplace("action", a.source);
        if (a.expected) {
            av.emplace("expected", *a.expected);
            av.emplace("matched", a.matched);
        }
        av.emplace("index", static_cast<std::int64_t>(a.index));
        av.emplace("outcome", a.outcome);
        action_values.push_back(Value(std::move(av)));
    }
    o.emplace("actions", std::move(action_values));
    Value::Array attack_values;
    for (const auto& r : attacks) attack_values.push_back(r.to_value());
    o.emplace("attacks", std::move(attack_values));
    o.emplace("chainDigest", chain_digest);
    o.emplace("expectationsOk", expectations_ok);
    o.emplace("profile", profile_name(profile));
    o.emplace("scenario", scenario_name);
    o.emplace("seed", static_cast<std::int64_t>(seed));
    return Value(std::move(o));
}

namespace {

struct IssuedInfo {
    IdentityFields identity;
    bool igm = false;
    bool igg = false;
    Did hospital_did;
};

struct Runner {
    const ScenarioScript& script;
    DeterministicRandom rng;
    LogicalClock clock;
    std::vector<Authority> authorities;
    RegistryChain chain;

    std::map<std::string, HospitalState> hospitals;
    std::map<std::string, HolderState> patients;
    std::map<std::string, VerifierState> verifiers;
    std::map<std::string, Challenge> challenges; // key: verifier "/" patient
    std::map<std::string, Bytes> retained_presentations; // per verifier, worst-case retention
    std::map<std::string, VerifierDecision> decisions;
    std::map<std::string, IssuedInfo> issued;
    CorrelationTruth ground_truth;

    RunReport report;

    Runner(const ScenarioScript& s, std::uint64_t seed)
        : script(s), rng(seed), clock(s.clock_start, s.clock_step_seconds) {
        std::vector<AuthorityPublic> publics;
        for (std::uint32_t i = 0; i < s.authority_count; ++i) {
            authorities.push_back(Authority::create("authority-" + std::to_string(i + 1), rng));
            publics.push_back(AuthorityPublic{authorities.back().id, authorities.back().keys.public_key});
        }
        chain = make_chain(std::move(publics), s.quorum);
        report.scenario_name = s.name;
        report.profile = s.profile;
        report.seed = seed;
    }

    HospitalState& hospital(const std::string& name, std::size_t index) {
        auto it = hospitals.find(name);
        if (it == hospitals.end()) action_fail(index, "unknown hospital: " + name);
        return it->second;
    }
    HolderState& patient(const std::string& name, std::size_t index) {
        auto it = patients.find(name);
        if (it == patients.end()) action_fail(index, "unknown patient: " + name);
        return it->second;
    }
    VerifierState& verifier(const std::string& name, std::size_t index) {
        auto it = verifiers.find(name);
        if (it == verifiers.end()) action_fail(index, "unknown verifier: " + name);
        return it->second;
    }

    [[noreturn]] void action_fail(std::size_t index, const std::string& why) {
        raise(ErrorCode::ActionFailure, "action " + std::to_string(index) + ": " + why);
    }

    static Digest32 photo_digest_for(const std::string& given, const std::string& family) {
        return sha256(as_bytes("photo:" + given + ":" + family));
    }

    std::string run_action(const ScenarioAction& a, std::size_t index) {
        Timestamp now = clock.tick();
        switch (a.kind) {
        case ScenarioAction::Kind::Register: {
            if (hospitals.count(a.name) || patients.count(a.name) || verifiers.count(a.name)) {
                action_fail(index, "actor name already used: " + a.name);
            }
            if (a.actor_kind == ActorKind::Hospital) {
                hospitals.emplace(a.name, register_hospital(a.name, chain, authorities, now, rng));
                return "ok did=" + hospitals.at(a.name).did.str();
            }
            if (a.actor_kind == ActorKind::Patient) {
                patients.emplace(a.name, register_patient(a.name, chain, authorities, now, rng));
                return "ok did=" + patients.at(a.name).did.str();
            }
            verifiers.emplace(a.name, register_verifier(a.name, chain, authorities, now, rng));
            return "ok did=" + verifiers.at(a.name).did.str();
        }
        case ScenarioAction::Kind::Issue: {
            HospitalState& h = hospital(a.hospital, index);
            HolderState& p = patient(a.patient, index);
            IdentityFields identity{a.given_name, a.family_name, a.birth_date,
                                    photo_digest_for(a.given_name, a.family_name)};
            p.credential = issue_test_result(h, p.did, identity, a.igm, a.igg, now);
            issued[a.patient] = IssuedInfo{identity, a.igm, a.igg, h.did};
            return "ok";
        }
        case ScenarioAction::Kind::Anchor: {
            HolderState& p = patient(a.patient, index);
            anchor_credential(p, script.profile, script.anchor_mode, chain, authorities, now, rng);
            auto truth_it = issued.find(a.patient);
            if (truth_it != issued.end()) {
                ground_truth.push_back(CorrelationLink{p.did, truth_it->second.hospital_did, now});
            }
            return "ok height=" + std::to_string(chain.blocks.size() - 1);
        }
        case ScenarioAction::Kind::Challenge: {
            VerifierState& v = verifier(a.verifier, index);
            patient(a.patient, index); // existence check
            challenges[a.verifier + "/" + a.patient] = make_challenge(v, script.profile, now, rng);
            return "ok";
        }
        case ScenarioAction::Kind::Present: {
            HolderState& p = patient(a.patient, index);
            VerifierState& v = verifier(a.verifier, index);
            std::optional<Challenge> challenge;
            auto ch = challenges.find(a.verifier + "/" + a.patient);
            if (ch != challenges.end()) challenge = ch->second;
            try {
                Presentation pres = present(p, v.did, challenge, script.profile, chain, now);
                retained_presentations[a.verifier] = pres.to_bytes();
                return "ok";
            } catch (const Error& e) {
                if (e.code() == ErrorCode::InvalidChallenge) return "invalid-challenge";
                throw;
            }
        }
        case ScenarioAction::Kind::Verify: {
            VerifierState& v = verifier(a.verifier, index);
            auto pres = retained_presentations.find(a.verifier);
            if (pres == retained_presentations.end()) {
                action_fail(index, "nothing presented to " + a.verifier);
            }
            VerifierDecision d = verify_presentation(v, Presentation::from_bytes(pres->second), chain, now,
                                                     script.profile);
            decisions[a.verifier] = d;
            if (d.verdict.accepted) return "accept";
            return std::string("reject:") +
                   reject_reason_name(d.verdict.reason.value_or(RejectReason::SignatureMismatch));
        }
        case ScenarioAction::Kind::Attack: return run_attack(a, index, now);
        }
        action_fail(index, "unhandled action kind");
    }

    std::string run_attack(const ScenarioAction& a, std::size_t index, Timestamp now) {
        AttackReport r;
        if (a.attack_name == "dictionary") {
            r = run_dictionary(a, index);
        } else if (a.attack_name == "replay") {
            auto pres = retained_presentations.find(a.verifier);
            if (pres == retained_presentations.end()) {
                action_fail(index, "no captured presentation at " + a.verifier);
            }
            auto d = decisions.find(a.verifier);
            if (d == decisions.end() || !d->second.verdict.accepted) {
                action_fail(index, "captured presentation was never accepted at " + a.verifier);
            }
            VerifierState& second = verifier(a.replay_to, index);
            r = replay_attack(pres->second, second, chain, now, script.profile);
        } else if (a.attack_name == "tamper") {
            r = run_tamper(a, index, now);
        } else if (a.attack_name == "correlate") {
            // Rebuild the observer's view from the serialized chain text so
            // the attack provably uses public artifacts only.
            RegistryChain public_chain = chain_from_text(chain_to_text(chain));
            r = correlation_attack(public_event_log(public_chain), ground_truth);
        } else {
            action_fail(index, "unknown attack: " + a.attack_name);
        }
        std::string outcome = std::string(r.succeeded ? "succeeded" : "failed") + " work=" + std::to_string(r.work);
        report.attacks.push_back(std::move(r));
        return outcome;
    }

    AttackReport run_dictionary(const ScenarioAction& a, std::size_t index) {
        HolderState& p = patient(a.patient, index);
        auto info = issued.find(a.patient);
        if (info == issued.end() || !p.credential) {
            action_fail(index, "patient has no issued credential: " + a.patient);
        }
        auto anchors = anchors_for(chain, p.did);
        if (anchors.empty()) {
            action_fail(index, "no anchor on chain for " + a.patient);
        }

        ClaimTemplate tmpl;
        tmpl.known.emplace("givenName", ClaimValue::text(info->second.identity.given_name));
        tmpl.known.emplace("familyName", ClaimValue::text(info->second.identity.family_name));
        tmpl.known.emplace("image",
                           ClaimValue::bytes(Bytes(info->second.identity.photo_digest.bytes.begin(),
                                                   info->second.identity.photo_digest.bytes.end())));
        bool birthdate_unknown = false;
        std::set<std::string> unknown_set(a.unknown_fields.begin(), a.unknown_fields.end());
        for (const std::string& field : unknown_set) {
            if (field == "birthdate") {
                tmpl.unknown.emplace("birthDate",
                                     DateRangeDomain{Date::from_ymd(1900, 1, 1), Date::from_ymd(2020, 12, 31)});
                birthdate_unknown = true;
            } else if (field == "igm") {
                tmpl.unknown.emplace("IgM", FlagDomain{});
            } else if (field == "igg") {
                tmpl.unknown.emplace("IgG", FlagDomain{});
            } else {
                action_fail(index, "unsupported unknown field: " + field);
            }
        }
        if (!birthdate_unknown) {
            tmpl.known.emplace("birthDate", ClaimValue::date(info->second.identity.birth_date));
        }
        if (!unknown_set.count("igm")) tmpl.known.emplace("IgM", ClaimValue::flag(info->second.igm));
        if (!unknown_set.count("igg")) tmpl.known.emplace("IgG", ClaimValue::flag(info->second.igg));

        return dictionary_attack(anchors.front().second.anchor, tmpl,
                                 CredentialPublicContext::of(*p.credential));
    }

    AttackReport run_tamper(const ScenarioAction& a, std::size_t index, Timestamp now) {
        HolderState& p = patient(a.patient, index);
        if (!p.credential) {
            action_fail(index, "patient has no credential: " + a.patient);
        }
        std::optional<Proof> foreign;
        if (a.mutation == TamperMutation::ReattachForeignProof) {
            // A second, unrelated credential signed by the same hospital
            // supplies the foreign proof.
            auto info = issued.find(a.patient);
            if (info == issued.end()) action_fail(index, "no issuance recorded for " + a.patient);
            auto h = std::find_if(hospitals.begin(), hospitals.end(), [&](const auto& kv) {
                return kv.second.did == info->second.hospital_did;
            });
            if (h == hospitals.end()) action_fail(index, "issuing hospital not found");
            IdentityFields other{"Unrelated", "Subject", Date::from_ymd(1970, 1, 1),
                                 photo_digest_for("Unrelated", "Subject")};
            foreign = issue_test_result(h->second, p.did, other, true, true, now).proof;
        }
        RegistryResolver resolver(chain);
        SeenDigestLedger fresh;
        return signature_tamper_attack(*p.credential, a.mutation, a.tamper_profile, resolver, now, &chain,
                                       foreign ? &*foreign : nullptr, &fresh);
    }

    bool expectation_matches(const ScenarioAction& a, const std::string& outcome) {
        if (!a.expect) return true;
        const std::string& e = *a.expect;
        if (e == "success") return outcome.rfind("succeeded", 0) == 0;
        if (e == "failure") return outcome.rfind("failed", 0) == 0;
        if (e == "accept" || e == "ok" || e == "invalid-challenge") return outcome.rfind(e, 0) == 0;
        if (e == "reject") return outcome.rfind("reject:", 0) == 0;
        if (e.rfind("reject:", 0) == 0) return outcome == e;
        raise(ErrorCode::ScriptParseError, "unknown expectation: " + e);
    }

    ScenarioResult run() {
        auto wall_start = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < script.actions.size(); ++i) {
            const ScenarioAction& a = script.actions[i];
            std::string outcome = run_action(a, i);
            ActionOutcome record{i, a.source, outcome, a.expect, expectation_matches(a, outcome)};
            if (!record.matched) report.expectations_ok = false;
            report.actions.push_back(std::move(record));
        }
        ScenarioResult result;
        result.chain = chain;
        result.chain_text = chain_to_text(chain);
        report.chain_digest = sha256(as_bytes(result.chain_text)).hex();
        report.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
        result.report = report;
        return result;
    }
};

} // namespace

ScenarioResult run_scenario(const ScenarioScript& script, std::uint64_t seed) {
    Runner runner(script, seed);
    return runner.run();
}

} // namespace credlab
