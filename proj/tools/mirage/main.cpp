#include <iostream>

#include <CLI11.hpp>

#include "mirage/cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mirage - evasive-behavior triage, probing, and deception toolkit"};
    app.require_subcommand(1);

    mirage::cli::ScanOptions scan_opts;
    auto* scan = app.add_subcommand("scan", "match files against a rule set");
    scan->add_option("paths", scan_opts.paths, "files or directories to scan")->required();
    scan->add_option("--rules", scan_opts.rules_file, "rule file")->required();
    scan->add_option("--format", scan_opts.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));

    mirage::cli::TriageOptions triage_opts;
    auto* triage = app.add_subcommand("triage", "select and group samples");
    triage->add_option("dir", triage_opts.dir, "sample directory")->required();
    triage->add_option("--rules", triage_opts.rules_file, "rule file")->required();
    triage->add_option("--verdicts", triage_opts.verdicts_file, "CSV of md5,verdict")->required();
    triage->add_option("--format", triage_opts.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));

    mirage::cli::ProbeOptions probe_opts;
    auto* probe = app.add_subcommand("probe", "run evasion probes against a host snapshot");
    probe->add_option("--env", probe_opts.env_file, "environment snapshot (JSON)")->required();
    probe->add_option("--categories", probe_opts.categories,
                      "comma list of debugger,av,vm (or 'none')");
    probe->add_option("--watchlists", probe_opts.watchlist_dir, "watchlist directory");
    probe->add_option("--fingerprints", probe_opts.fingerprints_file, "AV fingerprint file");
    probe->add_option("--format", probe_opts.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));

    mirage::cli::DeceiveOptions deceive_opts;
    auto* deceive = app.add_subcommand("deceive", "diff probe suite with the countermeasure");
    deceive->add_option("--env", deceive_opts.env_file, "environment snapshot (JSON)")->required();
    deceive->add_option("--policy", deceive_opts.policy_file, "deception policy (JSON)");
    deceive->add_option("--watchlists", deceive_opts.watchlist_dir, "watchlist directory");
    deceive->add_option("--format", deceive_opts.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));

    mirage::cli::BenchOptions bench_opts;
    auto* bench = app.add_subcommand("bench", "measure countermeasure overhead");
    bench->add_option("--iterations", bench_opts.iterations, "timed iterations (default 100)");
    bench->add_option("--workload", bench_opts.workload, "probe-heavy|api-light");
    bench->add_option("--env", bench_opts.env_file, "environment snapshot (JSON)");
    bench->add_option("--policy", bench_opts.policy_file, "deception policy (JSON)");
    bench->add_option("--watchlists", bench_opts.watchlist_dir, "watchlist directory");
    bench->add_option("--format", bench_opts.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));

    CLI11_PARSE(app, argc, argv);

    if (scan->parsed()) return mirage::cli::cmd_scan(scan_opts, std::cout, std::cerr);
    if (triage->parsed()) return mirage::cli::cmd_triage(triage_opts, std::cout, std::cerr);
    if (probe->parsed()) return mirage::cli::cmd_probe(probe_opts, std::cout, std::cerr);
    if (deceive->parsed()) return mirage::cli::cmd_deceive(deceive_opts, std::cout, std::cerr);
    if (bench->parsed()) return mirage::cli::cmd_bench(bench_opts, std::cout, std::cerr);
    return mirage::cli::kExitError;
}
