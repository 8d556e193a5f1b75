#include "credlab/attacks.hpp"

#include <algorithm>

#include "credlab/errors.hpp"

namespace credlab {

namespace {

using Clock = std::chrono::steady_clock;

struct Stopwatch {
    Clock::time_point start = Clock::now();

    std::chrono::duration<double> elapsed() const { return Clock::now() - start; }
};

} // namespace

Value AttackReport::to_value() const {
    Value::Object o;
    o.emplace("attack", attack);
    o.emplace("narrative", narrative);
    o.emplace("profileAttacked", profile_name(profile_attacked));
    if (recovered) {
        o.emplace("recovered", *recovered);
    }
    o.emplace("succeeded", succeeded);
    o.emplace("work", static_cast<std::int64_t>(work));
    return Value(std::move(o));
}

std::uint64_t domain_size(const ClaimDomain& d) {
    if (std::holds_alternative<FlagDomain>(d)) return 2;
    if (const auto* range = std::get_if<DateRangeDomain>(&d)) return range->size();
    return std::get<ChoiceDomain>(d).values.size();
}

ClaimValue domain_at(const ClaimDomain& d, std::uint64_t index) {
    if (std::holds_alternative<FlagDomain>(d)) {
        return ClaimValue::flag(index != 0);
    }
    if (const auto* range = std::get_if<DateRangeDomain>(&d)) {
        return ClaimValue::date(Date::from_day_number(range->first.day_number() + static_cast<std::int64_t>(index)));
    }
    return std::get<ChoiceDomain>(d).values.at(index);
}

void ClaimTemplate::validate() const {
    for (const auto& [name, kind] : card_claim_schema()) {
        bool in_known = known.count(name) > 0;
        bool in_unknown = unknown.count(name) > 0;
        if (in_known && in_unknown) {
            raise(ErrorCode::InvalidEntry, "claim " + name + " is both known and unknown");
        }
        if (!in_known && !in_unknown && name != "image") {
            raise(ErrorCode::InvalidEntry, "claim " + name + " is covered by neither side of the template");
        }
        (void)kind;
    }
    for (const auto& [name, _] : known) {
        if (!is_card_claim_field(name)) {
            raise(ErrorCode::InvalidEntry, "unknown template field: " + name);
        }
    }
    for (const auto& [name, domain] : unknown) {
        if (!is_card_claim_field(name)) {
            raise(ErrorCode::InvalidEntry, "unknown template field: " + name);
        }
        if (domain_size(domain) == 0) {
            raise(ErrorCode::InvalidEntry, "empty candidate domain for " + name);
        }
    }
}

std::uint64_t ClaimTemplate::candidate_count() const {
    std::uint64_t total = 1;
    for (const auto& [_, domain] : unknown) total *= domain_size(domain);
    return total;
}

CredentialPublicContext CredentialPublicContext::of(const VerifiableCredential& vc) {
    return CredentialPublicContext{vc.body.id,       vc.body.credential_types, vc.body.issuer_did,
                                   vc.body.issuance_date, vc.body.expiration_date, vc.body.subject_did,
                                   vc.proof};
}

AttackReport dictionary_attack(const AnchorPayload& anchor, const ClaimTemplate& tmpl,
                               const CredentialPublicContext& context) {
    tmpl.validate();
    Stopwatch watch;

    AttackReport report;
    report.attack = "dictionary";
    report.profile_attacked =
        std::holds_alternative<PlainHashAnchor>(anchor) ? Profile::Baseline : Profile::Hardened;

    const Digest32* target = nullptr;
    if (const auto* plain = std::get_if<PlainHashAnchor>(&anchor)) {
        target = &plain->digest;
    } else if (const auto* salted = std::get_if<SaltedCommitmentAnchor>(&anchor)) {
        // The adversary has no salt; comparing against the commitment is the
        // best it can do and never matches.
        target = &salted->commitment;
    }

    CredentialBody body;
    body.id = context.id;
    body.credential_types = context.credential_types;
    body.issuer_did = context.issuer_did;
    body.issuance_date = context.issuance_date;
    body.expiration_date = context.expiration_date;
    body.subject_did = context.subject_did;
    for (const auto& [name, value] : tmpl.known) body.claims.emplace(name, value);

    // Deterministic odometer over the unknown domains, last field fastest.
    std::vector<std::pair<std::string, const ClaimDomain*>> fields;
    for (const auto& [name, domain] : tmpl.unknown) fields.emplace_back(name, &domain);
    std::vector<std::uint64_t> sizes;
    for (const auto& [_, domain] : fields) sizes.push_back(domain_size(*domain));

    const std::uint64_t total = tmpl.candidate_count();
    report.work = 0;
    for (std::uint64_t index = 0; index < total; ++index) {
        std::uint64_t rem = index;
        for (std::size_t f = fields.size(); f-- > 0;) {
            std::uint64_t digit = rem % sizes[f];
            rem /= sizes[f];
            body.claims.insert_or_assign(fields[f].first, domain_at(*fields[f].second, digit));
        }
        Digest32 candidate = sha256(concat({ByteView(canonicalize(body)), context.proof.signature.view()}));
        ++report.work;
        if (target && candidate == *target) {
            Value::Object found;
            for (const auto& [name, _] : tmpl.unknown) {
                found.emplace(name, body.claims.at(name).to_value());
            }
            report.succeeded = true;
            report.recovered = Value(std::move(found));
            report.narrative = "recovered the unknown claims after " + std::to_string(report.work) + " of " +
                               std::to_string(total) + " candidate digests";
            report.elapsed = watch.elapsed();
            return report;
        }
    }

    report.succeeded = false;
    report.work = std::max<std::uint64_t>(report.work, 1);
    report.narrative = "exhausted " + std::to_string(total) + " candidates without matching the anchor";
    report.elapsed = watch.elapsed();
    return report;
}

AttackReport replay_attack(ByteView captured_presentation, VerifierState& second_verifier,
                           const RegistryChain& chain, Timestamp now, Profile profile) {
    Stopwatch watch;
    AttackReport report;
    report.attack = "replay";
    report.profile_attacked = profile;
    report.work = 1;

    Presentation replayed = Presentation::from_bytes(captured_presentation);
    VerifierDecision decision = verify_presentation(second_verifier, replayed, chain, now, profile);
    report.succeeded = decision.verdict.accepted;
    if (report.succeeded) {
        report.recovered = replayed.to_value();
        report.narrative = "second verifier accepted the byte-identical captured presentation";
    } else {
        report.narrative = "second verifier rejected the replay: " +
                           std::string(reject_reason_name(decision.verdict.reason.value_or(
                               RejectReason::SignatureMismatch))) +
                           " (" + decision.verdict.detail + ")";
    }
    report.elapsed = watch.elapsed();
    return report;
}

Bytes apply_tamper_mutation(const VerifiableCredential& vc, TamperMutation mutation, const Proof* foreign_proof) {
    Value doc = vc.to_value();
    switch (mutation) {
    case TamperMutation::StripProof:
        doc.erase("proof");
        break;
    case TamperMutation::ReattachForeignProof:
        if (!foreign_proof) {
            raise(ErrorCode::InvalidEntry, "reattachment needs a foreign proof");
        }
        doc.set("proof", foreign_proof->to_value());
        break;
    case TamperMutation::RawFieldInjection: {
        // Display-only override riding along unsigned.
        Value subject = doc.at("credentialSubject");
        subject.set("IgG_display", Value("negative"));
        doc.set("credentialSubject", subject);
        break;
    }
    }
    return canonical_bytes(doc);
}

AttackReport signature_tamper_attack(const VerifiableCredential& vc, TamperMutation mutation,
                                     VerifyProfile profile, const DidResolver& resolver, Timestamp now,
                                     const RegistryChain* chain, const Proof* foreign_proof,
                                     SeenDigestLedger* seen) {
    Stopwatch watch;
    AttackReport report;
    report.attack = std::string("tamper:") + tamper_mutation_name(mutation);
    report.profile_attacked = Profile::Baseline;
    report.work = 1;

    Bytes mutated = apply_tamper_mutation(vc, mutation, foreign_proof);
    Verdict verdict = verify_credential_document(mutated, resolver, profile, now, chain, seen);

    const char* profile_label = profile == VerifyProfile::Strict ? "strict" : "permissive";
    if (verdict.accepted && profile == VerifyProfile::Permissive) {
        report.succeeded = true;
        report.recovered = parse_canonical(mutated);
        report.narrative = std::string("permissive verifier accepted the ") + tamper_mutation_name(mutation) +
                           " document";
    } else {
        report.succeeded = false;
        report.narrative = std::string(profile_label) + " verifier " +
                           (verdict.accepted ? "accepted (not a semantic alteration)"
                                             : "rejected: " + std::string(reject_reason_name(verdict.reason.value_or(
                                                                  RejectReason::SignatureMismatch))));
    }
    report.elapsed = watch.elapsed();
    return report;
}

AttackReport correlation_attack(const std::vector<PublicEvent>& events, const CorrelationTruth& truth) {
    Stopwatch watch;
    AttackReport report;
    report.attack = "correlate";
    report.profile_attacked = Profile::Baseline;
    report.work = 1;

    // DIDs that have ever exposed a testing-facility endpoint, discovered
    // purely from the public log.
    std::vector<CorrelationLink> inferences;
    std::uint64_t scanned = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const PublicEvent& ev = events[i];
        if (ev.kind != EventKind::CredentialAnchored) continue;

        // Nearest preceding event whose DID advertises a facility endpoint.
        std::optional<Timestamp> best_time;
        std::vector<Did> best_facilities;
        for (std::size_t j = i; j-- > 0;) {
            ++scanned;
            const PublicEvent& prior = events[j];
            bool facility = std::find(prior.endpoint_types.begin(), prior.endpoint_types.end(),
                                      kCovidTestingEndpointType) != prior.endpoint_types.end();
            if (!facility) continue;
            if (!best_time) {
                best_time = prior.timestamp;
                best_facilities.push_back(prior.did);
            } else if (prior.timestamp == *best_time) {
                // Adjacency tie: report every candidate, flagged ambiguous.
                if (std::find(best_facilities.begin(), best_facilities.end(), prior.did) ==
                    best_facilities.end()) {
                    best_facilities.push_back(prior.did);
                }
            } else {
                break;
            }
        }
        for (const Did& facility : best_facilities) {
            inferences.push_back(CorrelationLink{ev.did, facility, ev.timestamp, best_facilities.size() > 1});
        }
    }
    report.work = std::max<std::uint64_t>(scanned, 1);

    std::size_t correct = 0;
    for (const auto& link : inferences) {
        for (const auto& t : truth) {
            if (t.patient == link.patient && t.facility == link.facility && t.timestamp == link.timestamp) {
                ++correct;
                break;
            }
        }
    }

    Value::Array rows;
    for (const auto& link : inferences) {
        Value::Object row;
        if (link.ambiguous) row.emplace("ambiguous", true);
        row.emplace("facility", link.facility.str());
        row.emplace("patient", link.patient.str());
        row.emplace("timestamp", link.timestamp.str());
        rows.push_back(Value(std::move(row)));
    }
    report.succeeded = correct > 0;
    if (!inferences.empty()) {
        report.recovered = Value(std::move(rows));
    }
    report.narrative = std::to_string(inferences.size()) + " patient-facility links inferred from the public log, " +
                       std::to_string(correct) + " confirmed against ground truth";
    report.elapsed = watch.elapsed();
    return report;
}

} // namespace credlab
