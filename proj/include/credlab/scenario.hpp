#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "credlab/attacks.hpp"

namespace credlab {

/// One line of a .scenario script.
struct ScenarioAction {
    enum class Kind { Register, Issue, Anchor, Challenge, Present, Verify, Attack };

    Kind kind = Kind::Register;
    std::string source; // original line, echoed into the report

    // register
    ActorKind actor_kind = ActorKind::Hospital;
    std::string name;

    // issue
    std::string hospital;
    std::string patient;
    std::string given_name;
    std::string family_name;
    Date birth_date;
    bool igm = false;
    bool igg = false;

    // challenge / present / verify / replay source
    std::string verifier;

    // attack
    std::string attack_name;
    std::vector<std::string> unknown_fields; // dictionary
    std::string replay_to;                   // replay
    TamperMutation mutation = TamperMutation::StripProof;
    VerifyProfile tamper_profile = VerifyProfile::Strict;

    std::optional<std::string> expect;
};

struct ScenarioScript {
    std::string name;
    Profile profile = Profile::Baseline;
    std::uint32_t authority_count = 3;
    std::uint32_t quorum = 2;
    AnchorMode anchor_mode = AnchorMode::Salted;
    Timestamp clock_start = Timestamp::parse("2021-01-05T09:00:00Z");
    std::int64_t clock_step_seconds = 300;
    std::vector<ScenarioAction> actions;
};

/// Errors: ScriptParseError with the offending line number.
ScenarioScript parse_scenario(std::string_view text, std::string name);
ScenarioScript load_scenario_file(const std::filesystem::path& path); // IoError

struct ActionOutcome {
    std::size_t index = 0;
    std::string source;
    std::string outcome;
    std::optional<std::string> expected;
    bool matched = true;
};

struct RunReport {
    std::string scenario_name;
    Profile profile = Profile::Baseline;
    std::uint64_t seed = 0;
    std::vector<ActionOutcome> actions;
    std::vector<AttackReport> attacks;
    std::string chain_digest; // sha256 of the chain file text, hex
    bool expectations_ok = true;
    double wall_seconds = 0; // console display only, never serialized

    Value to_value() const;
    std::string text() const { return canonical_text(to_value()) + "\n"; }
};

struct ScenarioResult {
    RunReport report;
    RegistryChain chain;
    std::string chain_text;
};

/// Executes the script against a fresh registry with a seeded deterministic
/// random source and a scripted logical clock; same script and seed give
/// byte-identical chain and report text. Errors: ActionFailure carrying the
/// action index.
ScenarioResult run_scenario(const ScenarioScript& script, std::uint64_t seed);

} // namespace credlab
