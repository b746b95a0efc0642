/*
 * Copyright 2026 The grndiag Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "grndiag/cli.hpp"

#ifndef GRNDIAG_VERSION
#define GRNDIAG_VERSION "0.0.0"
#endif

namespace grndiag::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Bad flag values; reported as usage errors (exit 2).
struct UsageError : Error {
    using Error::Error;
};

struct SweepOptions {
    std::string pathology = "all";
    std::optional<std::vector<double>> levels;
    std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
    std::vector<std::uint64_t> seeds = default_seeds(10);
    ScmKind scm = ScmKind::linear;
    bool allow_extrapolation = false;
};

struct InteractionOptions {
    InteractionGrid grid;
    std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
    std::vector<std::uint64_t> seeds = default_seeds(5);
    ScmKind scm = ScmKind::linear;
};

struct Session {
    fs::path out = "results";
    int jobs = 1;
    bool quiet = false;
};

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<Method> parse_methods(const std::string& text) {
    if (text == "all") return {kAllMethods.begin(), kAllMethods.end()};
    std::vector<Method> out;
    for (const auto& name : split_list(text)) {
        try {
            const Method m = parse_method(name);
            if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
    if (out.empty()) throw UsageError("--methods: no method given");
    return out;
}

std::vector<double> parse_levels(const std::string& text) {
    try {
        return parse_number_list(text);
    } catch (const Error& e) {
        throw UsageError(std::string("--levels: ") + e.what());
    }
}

std::vector<int> parse_int_levels(const std::string& flag_name, const std::string& text) {
    std::vector<int> out;
    try {
        for (double v : parse_number_list(text)) {
            if (v != std::round(v) || v < 0) throw Error("'" + format_number(v) + "' is not a nonnegative integer");
            out.push_back(static_cast<int>(v));
        }
    } catch (const Error& e) {
        throw UsageError(flag_name + ": " + e.what());
    }
    return out;
}

Pathology checked_pathology(const std::string& name) {
    try {
        return parse_pathology(name);
    } catch (const Error& e) {
        throw UsageError(std::string(e.what()) + " or 'all'");
    }
}

ScmKind checked_scm(const std::string& name) {
    try {
        return parse_scm_kind(name);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

json methods_json(const std::vector<Method>& methods) {
    json out = json::array();
    for (Method m : methods) out.push_back(std::string(to_string(m)));
    return out;
}

std::vector<Method> methods_from_json(const json& j) {
    std::vector<Method> out;
    for (const auto& name : j) out.push_back(parse_method(name.get<std::string>()));
    return out;
}

json to_json(const SweepOptions& o) {
    json j;
    j["pathology"] = o.pathology;
    j["levels"] = o.levels ? json(*o.levels) : json(nullptr);
    j["methods"] = methods_json(o.methods);
    j["seeds"] = o.seeds;
    j["scm"] = std::string(to_string(o.scm));
    j["allow_extrapolation"] = o.allow_extrapolation;
    return j;
}

SweepOptions sweep_from_json(const json& j) {
    SweepOptions o;
    o.pathology = j.at("pathology").get<std::string>();
    if (!j.at("levels").is_null()) o.levels = j.at("levels").get<std::vector<double>>();
    o.methods = methods_from_json(j.at("methods"));
    o.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    o.scm = parse_scm_kind(j.at("scm").get<std::string>());
    o.allow_extrapolation = j.at("allow_extrapolation").get<bool>();
    return o;
}

json to_json(const InteractionOptions& o) {
    json j;
    j["dropout"] = o.grid.dropout;
    j["confounders"] = o.grid.confounders;
    j["density"] = o.grid.density;
    j["methods"] = methods_json(o.methods);
    j["seeds"] = o.seeds;
    j["scm"] = std::string(to_string(o.scm));
    return j;
}

InteractionOptions interaction_from_json(const json& j) {
    InteractionOptions o;
    o.grid.dropout = j.at("dropout").get<std::vector<double>>();
    o.grid.confounders = j.at("confounders").get<std::vector<int>>();
    o.grid.density = j.at("density").get<std::vector<double>>();
    o.methods = methods_from_json(j.at("methods"));
    o.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    o.scm = parse_scm_kind(j.at("scm").get<std::string>());
    return o;
}

json base_scenario_json() {
    const ScenarioConfig b;
    return {{"p", b.p},
            {"n", b.n},
            {"sigma", b.sigma},
            {"rho", b.rho},
            {"dropout", b.dropout},
            {"confounders", b.confounders},
            {"mixing", b.mixing},
            {"feedback", b.feedback},
            {"pseudotime", b.pseudotime},
            {"confounder_load_prob", b.confounder_load_prob},
            {"pseudotime_chunks", b.pseudotime_chunks}};
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open '" + path.string() + "' for writing");
    writer(os);
    os.flush();
    if (!os) throw Error("write to '" + path.string() + "' failed");
}

RunOptions run_options(const Session& s, const std::string& label) {
    RunOptions opts;
    opts.jobs = s.jobs;
    if (!s.quiet) {
        opts.progress = [label](std::size_t done, std::size_t total) {
            std::cerr << '\r' << label << ": " << done << '/' << total << " datasets" << std::flush;
            if (done == total) std::cerr << '\n';
        };
    }
    return opts;
}

void write_manifest(const fs::path& path, const std::string& command, const json& config, const Session& s,
                    const std::vector<std::string>& outputs, const std::string& started) {
    json m;
    m["artifact"] = "grndiag";
    m["version"] = GRNDIAG_VERSION;
    m["command"] = command;
    m["config"] = config;
    m["base_scenario"] = base_scenario_json();
    m["jobs"] = s.jobs;
    m["out"] = s.out.string();
    m["outputs"] = outputs;
    m["started_utc"] = started;
    m["finished_utc"] = utc_now();
    write_file(path, [&](std::ostream& os) { os << m.dump(2) << '\n'; });
}

int do_sweep(const SweepOptions& o, const Session& s) {
    const std::string started = utc_now();
    std::vector<Pathology> dials;
    if (o.pathology == "all") {
        if (o.levels) throw UsageError("--levels needs a single --pathology, not 'all'");
        dials.assign(kAllPathologies.begin(), kAllPathologies.end());
    } else {
        dials.push_back(checked_pathology(o.pathology));
    }
    // Validate every level before any simulation starts.
    for (Pathology d : dials) {
        for (double level : o.levels.value_or(standard_levels(d))) {
            if (!o.allow_extrapolation && !within_standard_range(d, level)) {
                const auto& grid = standard_levels(d);
                throw UsageError("level " + format_number(level) + " is outside the standard range [" +
                                 format_number(grid.front()) + ", " + format_number(grid.back()) + "] of dial '" +
                                 std::string(to_string(d)) + "'; pass --allow-extrapolation to run it anyway");
            }
            try {
                apply_level(ScenarioConfig{}, d, level);
            } catch (const Error& e) {
                throw UsageError(e.what());
            }
        }
    }

    std::vector<ExperimentResult> rows;
    for (Pathology d : dials) {
        const auto& levels = o.levels.value_or(standard_levels(d));
        auto table = run_single_dial_sweep(d, levels, o.methods, o.seeds, o.scm,
                                           run_options(s, std::string(to_string(d))), o.allow_extrapolation);
        rows.insert(rows.end(), std::make_move_iterator(table.rows.begin()),
                    std::make_move_iterator(table.rows.end()));
    }

    const auto agg = aggregate(rows);
    std::vector<DeltaRow> und, dir;
    try {
        und = compute_delta_table(agg, Metric::undirected);
        dir = compute_delta_table(agg, Metric::directed);
    } catch (const Error& e) {
        std::cerr << "warning: delta table left empty: " << e.what() << '\n';
        und.clear();
        dir.clear();
    }

    fs::create_directories(s.out);
    write_file(s.out / kSweepRaw, [&](std::ostream& os) { write_sweep_raw(os, rows, true); });
    write_file(s.out / kSweepRawStable, [&](std::ostream& os) { write_sweep_raw(os, rows, false); });
    write_file(s.out / kSweepAggregate, [&](std::ostream& os) { write_sweep_aggregate(os, agg); });
    write_file(s.out / kSweepDeltas, [&](std::ostream& os) { write_deltas(os, o.scm, und, dir); });
    write_file(s.out / kSweepErrors, [&](std::ostream& os) { write_error_decomposition(os, agg); });
    write_manifest(s.out / kSweepManifest, "sweep", to_json(o), s,
                   {kSweepRaw, kSweepRawStable, kSweepAggregate, kSweepDeltas, kSweepErrors}, started);
    if (!s.quiet) std::cerr << rows.size() << " runs written to " << s.out.string() << '\n';
    return 0;
}

int do_interaction(const InteractionOptions& o, const Session& s) {
    const std::string started = utc_now();
    for (double d : o.grid.dropout) {
        if (d < 0.0 || d >= 1.0) throw UsageError("dropout level " + format_number(d) + " must lie in [0, 1)");
    }
    for (double r : o.grid.density) {
        if (r <= 0.0 || r > 1.0) throw UsageError("density level " + format_number(r) + " must lie in (0, 1]");
    }
    const auto table = run_interaction_sweep(o.grid, o.methods, o.seeds, o.scm, run_options(s, "interaction"));
    const auto agg = aggregate(table.rows);
    const auto winners = winner_map(agg);
    const auto summary = compute_interaction_summary(agg, o.grid);

    fs::create_directories(s.out);
    write_file(s.out / kInteractionRaw, [&](std::ostream& os) { write_interaction_raw(os, table.rows, true); });
    write_file(s.out / kInteractionRawStable,
               [&](std::ostream& os) { write_interaction_raw(os, table.rows, false); });
    write_file(s.out / kInteractionAggregate, [&](std::ostream& os) { write_interaction_aggregate(os, agg); });
    write_file(s.out / kWinnerMap, [&](std::ostream& os) { write_winner_map(os, winners); });
    write_file(s.out / kInteractionSummary, [&](std::ostream& os) { write_interaction_summary(os, summary); });
    write_manifest(s.out / kInteractionManifest, "interaction", to_json(o), s,
                   {kInteractionRaw, kInteractionRawStable, kInteractionAggregate, kWinnerMap, kInteractionSummary},
                   started);
    if (!s.quiet) std::cerr << table.rows.size() << " runs written to " << s.out.string() << '\n';
    return 0;
}

int do_report(const std::vector<std::string>& inputs, const Session& s) {
    std::vector<ExperimentResult> rows;
    for (const auto& dir : inputs) {
        const fs::path path = fs::path(dir) / kSweepRaw;
        std::ifstream is(path);
        if (!is) throw Error("missing input: expected sweep results at '" + path.string() + "'");
        auto part = read_sweep_raw(is);
        rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    if (rows.empty()) throw Error("report: the inputs hold no result rows");
    const auto agg = aggregate(rows);

    fs::create_directories(s.out);
    write_file(s.out / kReportDegradation, [&](std::ostream& os) { write_degradation(os, agg); });
    write_file(s.out / kReportErrorFractions, [&](std::ostream& os) { write_error_fractions(os, agg); });
    write_file(s.out / kReportOverlay, [&](std::ostream& os) { write_overlay(os, agg); });
    write_file(s.out / kReportPareto, [&](std::ostream& os) { write_pareto(os, rows); });
    if (!s.quiet) std::cerr << "report tables written to " << s.out.string() << '\n';
    return 0;
}

int do_rerun(const fs::path& manifest_path, Session s, bool out_given, bool jobs_given) {
    std::ifstream is(manifest_path);
    if (!is) throw Error("missing input: expected a manifest at '" + manifest_path.string() + "'");
    json m;
    try {
        m = json::parse(is);
    } catch (const json::exception& e) {
        throw Error("manifest '" + manifest_path.string() + "' is not valid JSON: " + e.what());
    }
    if (m.contains("base_scenario") && m.at("base_scenario") != base_scenario_json()) {
        throw Error("manifest '" + manifest_path.string() +
                    "' was written with different scenario defaults; this build cannot reproduce it");
    }
    if (!out_given) s.out = manifest_path.parent_path().empty() ? fs::path(".") : manifest_path.parent_path();
    if (!jobs_given && m.contains("jobs")) s.jobs = m.at("jobs").get<int>();
    try {
        const std::string command = m.at("command").get<std::string>();
        if (command == "sweep") return do_sweep(sweep_from_json(m.at("config")), s);
        if (command == "interaction") return do_interaction(interaction_from_json(m.at("config")), s);
        throw Error("manifest command '" + command + "' is not one of: sweep, interaction");
    } catch (const json::exception& e) {
        throw Error("manifest '" + manifest_path.string() + "' is malformed: " + e.what());
    }
}

void add_session_flags(CLI::App* cmd, Session& s) {
    cmd->add_option("--out", s.out, "Output directory")->capture_default_str();
    cmd->add_option("--jobs", s.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_flag("--quiet", s.quiet, "Suppress progress output");
}

std::vector<std::uint64_t> seeds_from_count(int count) {
    if (count < 1) throw UsageError("--seeds must be a positive count");
    return default_seeds(count);
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Benchmark harness for gene regulatory network inference under data pathologies"};
    app.set_version_flag("--version", GRNDIAG_VERSION);
    app.require_subcommand(1);

    Session session;
    std::string pathology = "all";
    std::string levels_text;
    std::string methods_text = "all";
    int seed_count = 10;
    std::string scm_text = "linear";
    bool allow_extrapolation = false;

    auto* sweep = app.add_subcommand("sweep", "Single-dial sweeps over the standard levels");
    sweep->add_option("--pathology", pathology,
                      "dropout, confounders, mixing, feedback, density, sample_size, pseudotime or all")
        ->capture_default_str();
    sweep->add_option("--levels", levels_text, "Comma-separated levels overriding the standard grid");
    sweep->add_option("--methods", methods_text, "Comma-separated methods or all")->capture_default_str();
    sweep->add_option("--seeds", seed_count, "Replicates, seeded 0..N-1")->capture_default_str();
    sweep->add_option("--scm", scm_text, "linear or tanh")->capture_default_str();
    sweep->add_flag("--allow-extrapolation", allow_extrapolation, "Accept levels outside the standard range");
    add_session_flags(sweep, session);

    int interaction_seeds = 5;
    bool grid_small = false;
    std::string dropout_text, confounder_text, density_text;
    auto* interaction = app.add_subcommand("interaction", "Dropout x confounders x density factorial grid");
    interaction->add_option("--methods", methods_text, "Comma-separated methods or all")->capture_default_str();
    interaction->add_option("--seeds", interaction_seeds, "Replicates, seeded 0..N-1")->capture_default_str();
    interaction->add_option("--scm", scm_text, "linear or tanh")->capture_default_str();
    interaction->add_flag("--grid-small", grid_small, "Only the 2 x 2 x 2 corner cells");
    interaction->add_option("--dropout-levels", dropout_text, "Dropout axis, cleanest first");
    interaction->add_option("--confounder-levels", confounder_text, "Confounder axis, cleanest first");
    interaction->add_option("--density-levels", density_text, "Density axis, cleanest first");
    add_session_flags(interaction, session);

    std::vector<std::string> inputs;
    auto* report = app.add_subcommand("report", "Plot-ready tables from stored sweep results");
    report->add_option("--input", inputs, "Sweep output directory (repeatable)")->required();
    report->add_option("--out", session.out, "Output directory")->capture_default_str();
    report->add_flag("--quiet", session.quiet, "Suppress progress output");

    std::string manifest;
    auto* rerun = app.add_subcommand("rerun", "Re-execute the run recorded in a manifest");
    rerun->add_option("manifest", manifest, "sweep_manifest.json or interaction_manifest.json")->required();
    auto* rerun_out = rerun->add_option("--out", session.out, "Output directory (default: the manifest's directory)");
    auto* rerun_jobs = rerun->add_option("--jobs", session.jobs, "Worker threads")->check(CLI::PositiveNumber);
    rerun->add_flag("--quiet", session.quiet, "Suppress progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*sweep) {
            SweepOptions o;
            o.pathology = pathology;
            if (!levels_text.empty()) o.levels = parse_levels(levels_text);
            o.methods = parse_methods(methods_text);
            o.seeds = seeds_from_count(seed_count);
            o.scm = checked_scm(scm_text);
            o.allow_extrapolation = allow_extrapolation;
            return do_sweep(o, session);
        }
        if (*interaction) {
            InteractionOptions o;
            if (grid_small) o.grid = InteractionGrid::small();
            try {
                if (!dropout_text.empty()) o.grid.dropout = parse_number_list(dropout_text);
                if (!density_text.empty()) o.grid.density = parse_number_list(density_text);
            } catch (const Error& e) {
                throw UsageError(std::string("axis levels: ") + e.what());
            }
            if (!confounder_text.empty()) o.grid.confounders = parse_int_levels("--confounder-levels", confounder_text);
            o.methods = parse_methods(methods_text);
            o.seeds = seeds_from_count(interaction_seeds);
            o.scm = checked_scm(scm_text);
            return do_interaction(o, session);
        }
        if (*report) return do_report(inputs, session);
        if (*rerun) return do_rerun(manifest, session, rerun_out->count() > 0, rerun_jobs->count() > 0);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace grndiag::cli
