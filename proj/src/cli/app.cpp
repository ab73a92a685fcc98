#include "seclab/cli/app.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "seclab/analysis.hpp"
#include "seclab/cli/output.hpp"
#include "seclab/cli/stream_io.hpp"
#include "seclab/harness.hpp"
#include "seclab/policies.hpp"

namespace seclab::cli {

namespace {

int parse_int(std::string_view text) {
    int value = 0;
    auto const *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw usage_error("not an integer: '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

std::vector<PolicyKind> parse_policies(std::string_view text) {
    std::vector<PolicyKind> policies;
    for (auto const &name : split(text, ',')) {
        auto kind = parse_policy(name);
        if (!kind) {
            throw usage_error("unknown policy '" + name +
                              "' (expected naive, opt, virtual, optimistic, single-ref or virtual+)");
        }
        policies.push_back(*kind);
    }
    return policies;
}

bool parse_switch(std::string const &text) {
    if (text == "on") return true;
    if (text == "off") return false;
    throw usage_error("expected 'on' or 'off', got '" + text + "'");
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
    if (flag) {
        return *flag;
    }
    if (char const *env = std::getenv("SECLAB_SEED"); env != nullptr && *env != '\0') {
        std::string_view text(env);
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw usage_error("SECLAB_SEED is not an unsigned integer: '" + std::string(text) + "'");
        }
        return value;
    }
    return 0;
}

std::string optional_cell(std::optional<int> value) { return value ? std::to_string(*value) : std::string(); }

std::string optional_cell(std::optional<double> value) { return value ? format_number(*value) : std::string(); }

nlohmann::ordered_json optional_json(std::optional<int> value) {
    return value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json(nullptr);
}

// Prints the table and, when an output directory is given, writes it with
// its manifest and any extra files.
void emit(std::ostream &out, std::string const &out_dir, CsvTable const &table, RunManifest const &manifest,
          std::vector<std::pair<std::string, std::string>> const &extra = {}) {
    table.write(out);
    if (out_dir.empty()) {
        return;
    }
    std::filesystem::path dir(out_dir);
    write_file(dir, manifest.command + ".csv", table.str());
    write_file(dir, manifest.command + ".manifest.json", manifest.dump());
    for (auto const &[name, content] : extra) {
        write_file(dir, name, content);
    }
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::string ks;
    std::string out;
};

void cmd_analyze(AnalyzeArgs const &args, std::ostream &out) {
    auto ks = parse_int_list(args.ks);
    CsvTable table({"k", "alpha_k", "c_k"});
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int k : ks) {
        if (k < 2 || k > 1000) {
            throw usage_error("analyze needs 2 <= k <= 1000, got k=" + std::to_string(k));
        }
        auto bound = analysis::optimal_threshold(k);
        table.add_row({std::to_string(k), format_number(bound.alpha_star), format_number(bound.c_k)});
        rows.push_back({{"k", k}, {"alpha_k", bound.alpha_star}, {"c_k", bound.c_k}});
    }
    RunManifest manifest{"analyze", {"analyze", "--k", args.ks}};
    manifest.fields["k"] = ks;
    emit(out, args.out, table, manifest, {{"analyze.json", rows.dump(2) + "\n"}});
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string policies = "virtual+";
    std::size_t n = 100;
    std::string ks = "1";
    double sigma2 = 0.0;
    std::int64_t trials = 10000;
    std::optional<std::uint64_t> seed;
    std::optional<int> t;
    std::optional<int> r;
    std::string exhaust = "off";
    int jobs = 1;
    bool plot_data = false;
    std::string out;
};

void cmd_simulate(SimulateArgs const &args, std::ostream &out) {
    auto policies = parse_policies(args.policies);
    auto ks = parse_int_list(args.ks);
    auto seed = resolve_seed(args.seed);
    harness::SweepOptions options;
    options.t = args.t;
    options.r = args.r;
    options.exhaust_budget = parse_switch(args.exhaust);
    options.jobs = args.jobs;
    if (args.trials < 1) {
        throw usage_error("--trials must be at least 1");
    }

    auto rows = harness::sweep(policies, ks, args.n, args.sigma2, args.trials, seed, options);

    CsvTable table({"policy", "n", "k", "t", "r", "sigma2", "trials", "seed", "value_ratio", "value_std_error",
                    "intersection_ratio", "intersection_std_error", "knapsack_ratio", "value_ratio_of_means"});
    CsvTable plot({"policy", "x", "y", "err"});
    for (auto const &row : rows) {
        auto const &rep = row.report;
        table.add_row({std::string(to_string(row.policy)), std::to_string(args.n), std::to_string(row.config.k),
                       optional_cell(row.config.t), optional_cell(row.config.r), format_number(args.sigma2),
                       std::to_string(rep.trials), std::to_string(seed), format_number(rep.value_ratio),
                       format_number(rep.std_error), format_number(rep.intersection_ratio),
                       format_number(rep.intersection_std_error), format_number(rep.knapsack_ratio),
                       format_number(rep.value_ratio_of_means)});
        plot.add_row({std::string(to_string(row.policy)), std::to_string(row.config.k), format_number(rep.value_ratio),
                      format_number(rep.std_error)});
    }

    RunManifest manifest{"simulate",
                         {"simulate", "--policy", args.policies, "--n", std::to_string(args.n), "--k", args.ks,
                          "--sigma2", format_number(args.sigma2), "--trials", std::to_string(args.trials), "--seed",
                          std::to_string(seed), "--exhaust", args.exhaust, "--jobs", std::to_string(args.jobs)}};
    if (args.t) manifest.args.insert(manifest.args.end(), {"--t", std::to_string(*args.t)});
    if (args.r) manifest.args.insert(manifest.args.end(), {"--r", std::to_string(*args.r)});
    if (args.plot_data) manifest.args.push_back("--plot-data");
    manifest.fields["policy"] = split(args.policies, ',');
    manifest.fields["n"] = args.n;
    manifest.fields["k"] = ks;
    manifest.fields["t"] = optional_json(args.t);
    manifest.fields["r"] = optional_json(args.r);
    manifest.fields["exhaust"] = options.exhaust_budget;
    manifest.fields["sigma2"] = args.sigma2;
    manifest.fields["seed"] = seed;
    manifest.fields["trials"] = args.trials;
    manifest.fields["input"] = nullptr;

    std::vector<std::pair<std::string, std::string>> extra;
    if (args.plot_data) {
        extra.emplace_back("plot_data.csv", plot.str());
    }
    emit(out, args.out, table, manifest, extra);
}

// ---------------------------------------------------------------- attack

struct AttackArgs {
    std::string input;
    std::string policies = "virtual+";
    int k = 1;
    std::optional<int> t;
    std::optional<int> r;
    std::optional<std::uint64_t> seed;
    std::int64_t permutations = 100;
    std::string exhaust = "on";
    std::string out;
};

void cmd_attack(AttackArgs const &args, std::ostream &out) {
    auto policies = parse_policies(args.policies);
    auto seed = resolve_seed(args.seed);
    bool exhaust = parse_switch(args.exhaust);
    auto stream = to_stream(read_records_file(args.input));
    if (!stream.has_fooled_flags()) {
        throw input_error("every record needs a 'fooled' field for the attack runner");
    }

    CsvTable table({"policy", "k", "t", "r", "exhaust", "permutations", "seed", "fool_rate_mean", "fool_rate_std",
                    "fool_rate_std_error", "value_ratio_mean", "intersection_ratio_mean"});
    for (auto policy : policies) {
        PolicyConfig config;
        config.k = args.k;
        config.exhaust_budget = exhaust;
        if (policy != PolicyKind::naive && policy != PolicyKind::opt) config.t = args.t;
        if (policy == PolicyKind::single_ref) config.r = args.r;
        auto summary = harness::run_attack_permutations(stream, policy, config, seed, args.permutations);
        table.add_row({std::string(to_string(policy)), std::to_string(summary.config.k),
                       optional_cell(summary.config.t), optional_cell(summary.config.r), exhaust ? "on" : "off",
                       std::to_string(summary.permutations), std::to_string(seed),
                       format_number(summary.fool_rate_mean), format_number(summary.fool_rate_std),
                       format_number(summary.fool_rate_std_error), optional_cell(summary.value_ratio_mean),
                       optional_cell(summary.intersection_ratio_mean)});
    }

    RunManifest manifest{"attack",
                         {"attack", "--input", args.input, "--policy", args.policies, "--k", std::to_string(args.k),
                          "--seed", std::to_string(seed), "--permutations", std::to_string(args.permutations),
                          "--exhaust", args.exhaust}};
    if (args.t) manifest.args.insert(manifest.args.end(), {"--t", std::to_string(*args.t)});
    if (args.r) manifest.args.insert(manifest.args.end(), {"--r", std::to_string(*args.r)});
    manifest.fields["policy"] = split(args.policies, ',');
    manifest.fields["k"] = args.k;
    manifest.fields["t"] = optional_json(args.t);
    manifest.fields["r"] = optional_json(args.r);
    manifest.fields["exhaust"] = exhaust;
    manifest.fields["seed"] = seed;
    manifest.fields["trials"] = args.permutations;
    manifest.fields["input"] = args.input;
    emit(out, args.out, table, manifest);
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
    std::string policy;
    int n = 0;
    int k = 1;
    std::optional<int> t;
    std::optional<int> r;
    bool check_formula = false;
    std::string out;
};

std::string rational_cell(analysis::Rational const &q) {
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

void cmd_oracle(OracleArgs const &args, std::ostream &out) {
    auto policies = parse_policies(args.policy);
    if (policies.size() != 1) {
        throw usage_error("oracle takes exactly one policy");
    }
    PolicyConfig config;
    config.k = args.k;
    config.t = args.t;
    config.r = args.r;
    auto report = analysis::enumerate_exact(policies.front(), args.n, config);

    CsvTable table({"quantity", "exact", "decimal"});
    table.add_row({"t", std::to_string(report.t), std::to_string(report.t)});
    table.add_row({"permutations", std::to_string(report.permutations), std::to_string(report.permutations)});
    auto ranks = report.per_rank_probability();
    for (std::size_t a = 0; a < ranks.size(); ++a) {
        table.add_row({"p_" + std::to_string(a + 1), rational_cell(ranks[a]),
                       format_number(boost::rational_cast<double>(ranks[a]))});
    }
    table.add_row({"competitive_ratio", rational_cell(report.competitive_ratio),
                   format_number(report.competitive_ratio_value())});

    if (args.check_formula) {
        if (report.k != 2 || report.policy != PolicyKind::virtual_plus) {
            throw usage_error("--check-formula applies to virtual+ with k=2 only");
        }
        double exact = report.competitive_ratio_value();
        double reconciled = analysis::finite_ratio_k2(report.n, report.t);
        double printed = analysis::finite_ratio_k2_as_printed(report.n, report.t);
        table.add_row({"formula_reconciled", "", format_number(reconciled)});
        table.add_row({"formula_reconciled_delta", "", format_number(reconciled - exact)});
        table.add_row({"formula_as_printed", "", format_number(printed)});
        table.add_row({"formula_as_printed_delta", "", format_number(printed - exact)});
    }

    RunManifest manifest{"oracle",
                         {"oracle", "--policy", args.policy, "--n", std::to_string(args.n), "--k",
                          std::to_string(args.k)}};
    if (args.t) manifest.args.insert(manifest.args.end(), {"--t", std::to_string(*args.t)});
    if (args.r) manifest.args.insert(manifest.args.end(), {"--r", std::to_string(*args.r)});
    if (args.check_formula) manifest.args.push_back("--check-formula");
    manifest.fields["policy"] = args.policy;
    manifest.fields["n"] = args.n;
    manifest.fields["k"] = args.k;
    manifest.fields["t"] = report.t;
    manifest.fields["r"] = optional_json(args.r);
    manifest.fields["exhaust"] = false;
    manifest.fields["seed"] = nullptr;
    manifest.fields["trials"] = report.permutations;
    manifest.fields["input"] = nullptr;
    emit(out, args.out, table, manifest);
}

// ---------------------------------------------------------------- bound

struct BoundArgs {
    double delta = 0.0;
    double sigma = 0.0;
    int k = 2;
    std::string out;
};

void cmd_bound(BoundArgs const &args, std::ostream &out) {
    if (args.delta == 0.0) {
        throw usage_error("stochastic bound inapplicable: duplicate values (delta = 0)");
    }
    if (!(args.delta > 0.0) || !(args.sigma > 0.0)) {
        throw usage_error("--delta and --sigma must both be > 0");
    }
    if (args.k < 2 || args.k > 1000) {
        throw usage_error("bound needs 2 <= k <= 1000");
    }
    double factor = analysis::stochastic_factor(args.delta, args.sigma);
    auto bound = analysis::optimal_threshold(args.k);

    CsvTable table({"delta", "sigma", "k", "stochastic_factor", "c_k", "stochastic_lower_bound"});
    table.add_row({format_number(args.delta), format_number(args.sigma), std::to_string(args.k), format_number(factor),
                   format_number(bound.c_k), format_number(factor * bound.c_k)});

    RunManifest manifest{"bound",
                         {"bound", "--delta", format_number(args.delta), "--sigma", format_number(args.sigma), "--k",
                          std::to_string(args.k)}};
    manifest.fields["delta"] = args.delta;
    manifest.fields["sigma"] = args.sigma;
    manifest.fields["k"] = args.k;
    emit(out, args.out, table, manifest);
}

}  // namespace

std::vector<int> parse_int_list(std::string_view text) {
    std::vector<int> values;
    for (auto const &part : split(text, ',')) {
        if (part.empty()) {
            throw usage_error("empty entry in list '" + std::string(text) + "'");
        }
        if (auto dots = part.find(".."); dots != std::string::npos) {
            int lo = parse_int(std::string_view(part).substr(0, dots));
            int hi = parse_int(std::string_view(part).substr(dots + 2));
            if (lo > hi) {
                throw usage_error("empty range '" + part + "'");
            }
            for (int v = lo; v <= hi; ++v) {
                values.push_back(v);
            }
        } else {
            values.push_back(parse_int(part));
        }
    }
    return values;
}

int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Single-threshold k-secretary selection: analysis, simulation and online attack selection",
                 "seclab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version));

    AnalyzeArgs analyze;
    auto *analyze_cmd = app.add_subcommand("analyze", "Optimal Virtual+ threshold alpha_k and bound C_k");
    analyze_cmd->add_option("--k", analyze.ks, "Budgets, e.g. 2,3,4 or 2..5")->required();
    analyze_cmd->add_option("--out", analyze.out, "Output directory");

    SimulateArgs simulate;
    auto *simulate_cmd = app.add_subcommand("simulate", "Monte Carlo competitive ratios on the synthetic family");
    simulate_cmd->add_option("--policy", simulate.policies, "Comma-separated policies")->capture_default_str();
    simulate_cmd->add_option("--n", simulate.n, "Stream length")->capture_default_str();
    simulate_cmd->add_option("--k", simulate.ks, "Budgets, e.g. 1..10")->capture_default_str();
    simulate_cmd->add_option("--sigma2", simulate.sigma2, "Observation noise variance")->capture_default_str();
    simulate_cmd->add_option("--trials", simulate.trials, "Trials per cell")->capture_default_str();
    simulate_cmd->add_option("--seed", simulate.seed, "Seed (falls back to SECLAB_SEED, then 0)");
    simulate_cmd->add_option("--t", simulate.t, "Sampling threshold override");
    simulate_cmd->add_option("--r", simulate.r, "Reference rank for single-ref");
    simulate_cmd->add_option("--exhaust", simulate.exhaust, "on|off")->capture_default_str();
    simulate_cmd->add_option("--jobs", simulate.jobs, "Worker threads")->capture_default_str();
    simulate_cmd->add_flag("--plot-data", simulate.plot_data, "Also write (x, y, err) plot data");
    simulate_cmd->add_option("--out", simulate.out, "Output directory");

    AttackArgs attack;
    auto *attack_cmd = app.add_subcommand("attack", "Online attack selection over a JSONL value stream");
    attack_cmd->add_option("--input", attack.input, "JSONL stream file")->required();
    attack_cmd->add_option("--policy", attack.policies, "Comma-separated policies")->capture_default_str();
    attack_cmd->add_option("--k", attack.k, "Attack budget")->required();
    attack_cmd->add_option("--t", attack.t, "Sampling threshold override");
    attack_cmd->add_option("--r", attack.r, "Reference rank for single-ref");
    attack_cmd->add_option("--seed", attack.seed, "Seed (falls back to SECLAB_SEED, then 0)");
    attack_cmd->add_option("--permutations", attack.permutations, "Seeded shuffles")->capture_default_str();
    attack_cmd->add_option("--exhaust", attack.exhaust, "on|off")->capture_default_str();
    attack_cmd->add_option("--out", attack.out, "Output directory");

    OracleArgs oracle;
    auto *oracle_cmd = app.add_subcommand("oracle", "Exact selection probabilities by enumerating all n! orders");
    oracle_cmd->add_option("--policy", oracle.policy, "Deterministic online policy")->required();
    oracle_cmd->add_option("--n", oracle.n, "Stream length (<= 8)")->required();
    oracle_cmd->add_option("--k", oracle.k, "Budget")->capture_default_str();
    oracle_cmd->add_option("--t", oracle.t, "Sampling threshold");
    oracle_cmd->add_option("--r", oracle.r, "Reference rank for single-ref");
    oracle_cmd->add_flag("--check-formula", oracle.check_formula, "Compare with the k=2 finite-n formula");
    oracle_cmd->add_option("--out", oracle.out, "Output directory");

    BoundArgs bound;
    auto *bound_cmd = app.add_subcommand("bound", "Stochastic degradation factor and lower bound");
    bound_cmd->add_option("--delta", bound.delta, "Half the minimum gap between true values")->required();
    bound_cmd->add_option("--sigma", bound.sigma, "Noise scale")->required();
    bound_cmd->add_option("--k", bound.k, "Budget for C_k")->capture_default_str();
    bound_cmd->add_option("--out", bound.out, "Output directory");

    std::string manifest_path;
    std::string replay_out;
    auto *replay_cmd = app.add_subcommand("replay", "Re-run a command from its manifest");
    replay_cmd->add_option("manifest", manifest_path, "Path to a *.manifest.json")->required();
    replay_cmd->add_option("--out", replay_out, "Output directory");

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("seclab");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char const *> argv;
    for (auto const &arg : argv_storage) {
        argv.push_back(arg.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (CLI::CallForHelp const &) {
        out << app.help();
        return exit_ok;
    } catch (CLI::CallForVersion const &) {
        out << tool_version << "\n";
        return exit_ok;
    } catch (CLI::ParseError const &e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        if (*analyze_cmd) {
            cmd_analyze(analyze, out);
        } else if (*simulate_cmd) {
            cmd_simulate(simulate, out);
        } else if (*attack_cmd) {
            cmd_attack(attack, out);
        } else if (*oracle_cmd) {
            cmd_oracle(oracle, out);
        } else if (*bound_cmd) {
            cmd_bound(bound, out);
        } else if (*replay_cmd) {
            auto manifest = RunManifest::load(manifest_path);
            auto replay_args = manifest.args;
            if (!replay_out.empty()) {
                replay_args.insert(replay_args.end(), {"--out", replay_out});
            }
            return run(replay_args, out, err);
        }
    } catch (input_error const &e) {
        err << "input error: " << e.what() << "\n";
        return exit_data;
    } catch (usage_error const &e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (invalid_config const &e) {
        err << "invalid configuration: " << e.what() << "\n";
        return exit_usage;
    } catch (precondition_error const &e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (std::exception const &e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_ok;
}

}  // namespace seclab::cli
