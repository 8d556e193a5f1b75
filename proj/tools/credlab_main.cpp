// credlab command line: run scripted protocol scenarios, inspect registry
// chain files, fire canned attacks, generate keys.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "credlab/errors.hpp"
#include "credlab/scenario.hpp"

namespace {

using namespace credlab;

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << content;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::IoError, "cannot read " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void print_attack_summary(const AttackReport& r) {
    std::cerr << "  attack " << r.attack << " against " << profile_name(r.profile_attacked) << ": "
              << (r.succeeded ? "SUCCEEDED" : "failed") << " (work=" << r.work << ", "
              << r.elapsed.count() * 1000.0 << " ms)\n    " << r.narrative << "\n";
}

int cmd_scenario_run(const std::string& script_path, std::uint64_t seed, const std::string& out_dir) {
    ScenarioScript script = load_scenario_file(script_path);
    ScenarioResult result = run_scenario(script, seed);

    std::filesystem::path dir = out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(out_dir);
    std::filesystem::create_directories(dir);
    std::filesystem::path chain_path = dir / (script.name + ".chain");
    std::filesystem::path report_path = dir / (script.name + ".report");
    write_file(chain_path, result.chain_text);
    write_file(report_path, result.report.text());

    std::cerr << "scenario " << script.name << " (profile " << profile_name(script.profile) << ", seed " << seed
              << ")\n";
    for (const auto& a : result.report.actions) {
        std::cerr << "  [" << a.index << "] " << a.source << " -> " << a.outcome;
        if (a.expected) {
            std::cerr << (a.matched ? "  [as expected]" : "  [EXPECTED " + *a.expected + "]");
        }
        std::cerr << "\n";
    }
    for (const auto& r : result.report.attacks) print_attack_summary(r);
    std::cerr << "chain: " << chain_path.string() << "\nreport: " << report_path.string() << "\nwall time: "
              << result.report.wall_seconds << " s\n";

    if (!result.report.expectations_ok) {
        std::cerr << "one or more expectations did not hold\n";
        return kExitMismatch;
    }
    return kExitOk;
}

int cmd_registry_inspect(const std::string& chain_path) {
    RegistryChain chain = chain_from_text(read_file(chain_path));
    ChainVerdict verdict = verify_chain(chain);

    std::cout << "authorities: " << chain.authority_set.size() << " (quorum " << chain.quorum << ")\n";
    std::cout << "blocks: " << chain.blocks.size() << "\n";
    std::cout << "events:\n";
    for (const auto& ev : public_event_log(chain)) {
        std::cout << "  " << ev.timestamp.str() << "  h=" << ev.height << "  " << event_kind_name(ev.kind) << "  "
                  << ev.did.str();
        if (!ev.endpoint_types.empty()) {
            std::cout << "  endpoints=";
            for (std::size_t i = 0; i < ev.endpoint_types.size(); ++i) {
                if (i) std::cout << ',';
                std::cout << ev.endpoint_types[i];
            }
        }
        std::cout << "\n";
    }
    if (verdict.ok) {
        std::cout << "verification: Accept\n";
        return kExitOk;
    }
    std::cout << "verification: Reject at height " << verdict.height << " (" << verdict.reason << ")\n";
    return kExitMismatch;
}

std::string canned_attacked_scenario(const std::string& profile, bool expect_success) {
    const char* verdict = expect_success ? "success" : "failure";
    std::ostringstream s;
    s << "profile " << profile << "\n"
      << "authorities 3 quorum 2\n"
      << "register hospital st-mary-hospital\n"
      << "register patient louis-pasteur\n"
      << "register verifier employer-hr\n"
      << "register verifier border-control\n"
      << "issue st-mary-hospital louis-pasteur given=Louis family=Pasteur birthdate=1958-07-17 igm=false igg=true\n"
      << "anchor louis-pasteur\n"
      << "challenge employer-hr louis-pasteur\n"
      << "present louis-pasteur employer-hr\n"
      << "verify employer-hr expect accept\n"
      << "attack dictionary louis-pasteur unknowns=birthdate,igm,igg expect " << verdict << "\n"
      << "attack replay employer-hr border-control expect " << verdict << "\n";
    return s.str();
}

std::string canned_tamper_scenario(const std::string& mutation, const std::string& verify_profile,
                                   bool expect_success) {
    std::ostringstream s;
    s << "profile baseline\n"
      << "authorities 3 quorum 2\n"
      << "register hospital st-mary-hospital\n"
      << "register patient louis-pasteur\n"
      << "issue st-mary-hospital louis-pasteur given=Louis family=Pasteur birthdate=1958-07-17 igm=false igg=true\n"
      << "anchor louis-pasteur\n"
      << "attack tamper louis-pasteur " << mutation << " " << verify_profile << " expect "
      << (expect_success ? "success" : "failure") << "\n";
    return s.str();
}

std::string canned_correlation_scenario() {
    return "profile baseline\n"
           "authorities 3 quorum 2\n"
           "register hospital north-clinic\n"
           "register patient patient-a\n"
           "issue north-clinic patient-a given=Ada family=Ampere birthdate=1971-03-02 igm=false igg=true\n"
           "anchor patient-a\n"
           "register hospital south-clinic\n"
           "register patient patient-b\n"
           "issue south-clinic patient-b given=Ben family=Becquerel birthdate=1984-11-23 igm=true igg=false\n"
           "anchor patient-b\n"
           "attack correlate expect success\n";
}

int cmd_attack(const std::string& name, const std::string& profile, std::uint64_t seed,
               const std::string& mutation, const std::string& verify_profile, const std::string& out_path) {
    std::string script_text;
    if (name == "dictionary" || name == "replay") {
        script_text = canned_attacked_scenario(profile, profile == "baseline");
    } else if (name == "tamper") {
        bool expect_success =
            verify_profile == "permissive" && (mutation == "inject" || mutation == "strip");
        script_text = canned_tamper_scenario(mutation, verify_profile, expect_success);
    } else if (name == "correlate") {
        script_text = canned_correlation_scenario();
    } else {
        std::cerr << "unknown attack: " << name << "\n";
        return kExitUsage;
    }

    ScenarioScript script = parse_scenario(script_text, "attack-" + name);
    ScenarioResult result = run_scenario(script, seed);

    const AttackReport* report = nullptr;
    for (const auto& r : result.report.attacks) {
        if (r.attack.rfind(name == "tamper" ? "tamper" : name, 0) == 0) report = &r;
        if (name == "dictionary" && r.attack == "dictionary") {
            report = &r;
            break;
        }
    }
    if (!report) {
        std::cerr << "attack did not run\n";
        return kExitMismatch;
    }

    std::string doc = canonical_text(report->to_value()) + "\n";
    std::cout << doc;
    if (!out_path.empty()) write_file(out_path, doc);
    print_attack_summary(*report);

    return result.report.expectations_ok ? kExitOk : kExitMismatch;
}

int cmd_keygen(bool seeded, std::uint64_t seed) {
    Ed25519Keypair kp;
    if (seeded) {
        DeterministicRandom rng(seed);
        kp = Ed25519Keypair::generate(rng);
    } else {
        SystemRandom rng;
        kp = Ed25519Keypair::generate(rng);
    }
    auto [did, doc] = did_key_from_public_key(kp.public_key);
    std::cout << "did:        " << did.str() << "\n";
    std::cout << "publicKey:  " << kp.public_key.hex() << "\n";
    std::cout << "secretKey:  " << to_hex(kp.secret_key.bytes) << "\n";
    std::cout << "document:   " << canonical_text(doc.to_value()) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"credential protocol lab: scenarios, registry inspection, attack harness"};
    app.require_subcommand(1);

    auto* scenario = app.add_subcommand("scenario", "run scripted scenarios");
    scenario->require_subcommand(1);
    auto* scenario_run = scenario->add_subcommand("run", "execute a .scenario script");
    std::string script_path;
    std::uint64_t seed = 42;
    std::string out_dir;
    scenario_run->add_option("script", script_path, "path to the .scenario file")->required();
    scenario_run->add_option("--seed", seed, "random seed (default 42)");
    scenario_run->add_option("--out", out_dir, "directory for .chain and .report output (default .)");

    auto* registry = app.add_subcommand("registry", "registry chain tools");
    registry->require_subcommand(1);
    auto* inspect = registry->add_subcommand("inspect", "verify a .chain file and print its public events");
    std::string chain_path;
    inspect->add_option("chain", chain_path, "path to the .chain file")->required();

    auto* attack = app.add_subcommand("attack", "run one canned attack and emit its report");
    std::string attack_name;
    std::string attack_profile = "baseline";
    std::string mutation = "inject";
    std::string verify_profile = "permissive";
    std::string attack_out;
    std::uint64_t attack_seed = 42;
    attack->add_option("name", attack_name, "dictionary | replay | tamper | correlate")->required();
    attack->add_option("--profile", attack_profile, "baseline | hardened (default baseline)")
        ->check(CLI::IsMember({"baseline", "hardened"}));
    attack->add_option("--mutation", mutation, "tamper mutation: strip | reattach | inject")
        ->check(CLI::IsMember({"strip", "reattach", "inject"}));
    attack->add_option("--verify-profile", verify_profile, "tamper verification profile: strict | permissive")
        ->check(CLI::IsMember({"strict", "permissive"}));
    attack->add_option("--seed", attack_seed, "random seed (default 42)");
    attack->add_option("--out", attack_out, "also write the report document to this path");

    auto* keygen = app.add_subcommand("keygen", "generate an Ed25519 keypair and its key-method identifier");
    std::uint64_t keygen_seed = 0;
    auto* seed_opt = keygen->add_option("--seed", keygen_seed, "derive the key deterministically from this seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (scenario_run->parsed()) return cmd_scenario_run(script_path, seed, out_dir);
        if (inspect->parsed()) return cmd_registry_inspect(chain_path);
        if (attack->parsed())
            return cmd_attack(attack_name, attack_profile, attack_seed, mutation, verify_profile, attack_out);
        if (keygen->parsed()) return cmd_keygen(!seed_opt->empty(), keygen_seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
        case ErrorCode::ScriptParseError:
        case ErrorCode::IoError:
        case ErrorCode::MalformedChain:
        case ErrorCode::MalformedDocument:
            return kExitUsage;
        default:
            return kExitMismatch;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMismatch;
    }
    return kExitUsage;
}
