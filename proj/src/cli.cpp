// Copyright 2026 The driftforest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "driftforest/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "driftforest/dataset.hpp"
#include "driftforest/error.hpp"
#include "driftforest/eval.hpp"
#include "driftforest/experiment.hpp"
#include "driftforest/stream.hpp"
#include "driftforest/synth.hpp"
#include "driftforest/text.hpp"

namespace driftforest {

namespace fs = std::filesystem;

namespace {

using Settings = std::map<std::string, std::string>;

constexpr const char* kSeedEnv = "DRIFTFOREST_SEED";

struct KeyInfo {
    const char* key;
    const char* help;
};

// Every persisted setting. Flags are spelled with dashes, manifests with
// underscores.
const std::vector<KeyInfo>& all_keys() {
    static const std::vector<KeyInfo> keys = {
        {"input", "input file"},
        {"out", "output directory"},
        {"seed", "master seed (falls back to $DRIFTFOREST_SEED, then 0)"},
        {"m_max", "maximum processes per snapshot"},
        {"n", "metrics per process (synth only)"},
        {"runs", "timestamp_id,hash file written by preprocess"},
        {"metadata", "hash,year file"},
        {"fallback", "what to do with unknown years: drop or keep"},
        {"instances", "number of synthetic snapshots"},
        {"shifts", "concept shifts: at[:concept],... (concept defaults to the next id)"},
        {"year_boundaries", "instance indices where years 2, 3, ... begin"},
        {"years_every", "start a new year every N instances"},
        {"noise", "label-flip probability"},
        {"infected_fraction", "share of infected snapshots per concept segment"},
        {"paper_shape", "use the 227 x 32 layout"},
        {"ratio", "training share of the random split"},
        {"pivot_year", "last year used for pretraining"},
        {"fractions", "comma-separated label fractions"},
        {"jobs", "parallel fraction runs"},
        {"window", "accuracy window size"},
        {"trees", "ensemble size"},
        {"lambda", "online bagging rate"},
        {"warning_delta", "warning detector confidence"},
        {"drift_delta", "drift detector confidence"},
        {"grace_period", "instances between split attempts"},
        {"split_confidence", "Hoeffding split confidence"},
        {"tie_threshold", "Hoeffding tie threshold"},
        {"first", "first report directory"},
        {"second", "second report directory"},
    };
    return keys;
}

const std::vector<std::string> kModelKeys = {"trees",         "lambda",         "warning_delta",
                                             "drift_delta",   "grace_period",   "split_confidence",
                                             "tie_threshold", "window"};

std::string flag_of(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return "--" + key;
}

const char* help_of(const std::string& key) {
    for (const auto& k : all_keys()) {
        if (key == k.key) return k.help;
    }
    return "";
}

Error usage(const std::string& message) { return Error(ErrorCode::Usage, message); }

/// Typed view over the merged settings of one invocation.
class Options {
public:
    explicit Options(Settings settings) : s_(std::move(settings)) {}

    const Settings& settings() const { return s_; }
    bool has(const std::string& key) const { return s_.count(key) != 0; }

    std::string str(const std::string& key) const {
        const auto it = s_.find(key);
        if (it == s_.end() || it->second.empty()) throw usage("missing " + flag_of(key));
        return it->second;
    }

    double real(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const auto v = text::parse_number(s_.at(key));
        if (!v) throw usage(flag_of(key) + " expects a number, got '" + s_.at(key) + "'");
        return *v;
    }

    std::size_t count(const std::string& key, std::size_t fallback) const {
        if (!has(key)) return fallback;
        return static_cast<std::size_t>(unsigned_value(key, s_.at(key)));
    }

    int integer(const std::string& key, int fallback) const {
        if (!has(key)) return fallback;
        const auto v = text::parse_number(s_.at(key));
        if (!v || *v != static_cast<double>(static_cast<int>(*v))) {
            throw usage(flag_of(key) + " expects an integer, got '" + s_.at(key) + "'");
        }
        return static_cast<int>(*v);
    }

    bool flag(const std::string& key) const {
        if (!has(key)) return false;
        const auto& v = s_.at(key);
        if (v == "1" || v == "true") return true;
        if (v == "0" || v == "false") return false;
        throw usage(flag_of(key) + " expects true or false");
    }

    std::vector<std::string> list(const std::string& key) const {
        std::vector<std::string> items;
        if (!has(key)) return items;
        for (auto& field : text::split_fields(s_.at(key), ',')) {
            if (!field.empty()) items.push_back(field);
        }
        return items;
    }

    std::vector<double> reals(const std::string& key) const {
        std::vector<double> values;
        for (const auto& item : list(key)) {
            const auto v = text::parse_number(item);
            if (!v) throw usage(flag_of(key) + " has a non-numeric entry '" + item + "'");
            values.push_back(*v);
        }
        return values;
    }

    std::vector<std::size_t> counts(const std::string& key) const {
        std::vector<std::size_t> values;
        for (const auto& item : list(key)) {
            values.push_back(static_cast<std::size_t>(unsigned_value(key, item)));
        }
        return values;
    }

    std::uint64_t seed() const { return unsigned_value("seed", s_.at("seed")); }

private:
    static std::uint64_t unsigned_value(const std::string& key, const std::string& text) {
        std::uint64_t value = 0;
        const auto* first = text.data();
        const auto* last = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last) {
            throw usage(flag_of(key) + " expects a non-negative integer, got '" + text + "'");
        }
        return value;
    }

    Settings s_;
};

Settings read_settings_file(const fs::path& path) {
    Settings settings;
    const std::string contents = text::read_file(path);
    for (const auto raw : text::lines(contents)) {
        const auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw usage(path.string() + ": expected key=value, got '" + std::string(line) + "'");
        }
        settings[std::string(text::trim(line.substr(0, eq)))] =
            std::string(text::trim(line.substr(eq + 1)));
    }
    return settings;
}

std::string format_settings(const std::string& command, const Settings& settings) {
    std::string out = "command=" + command + "\n";
    for (const auto& [key, value] : settings) out += key + "=" + value + "\n";
    return out;
}

void prepare_output(const fs::path& dir, bool force) {
    if (fs::exists(dir) && !(fs::is_directory(dir) && fs::is_empty(dir)) && !force) {
        throw Error(ErrorCode::OutputExists,
                    dir.string() + " already exists; pass --force to overwrite");
    }
    if (fs::exists(dir) && !fs::is_directory(dir)) {
        throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
    }
    fs::create_directories(dir);
}

struct Context {
    Options options;
    fs::path out_dir;
    std::ostream& out;
};

ExperimentConfig experiment_config(const Options& o) {
    ExperimentConfig config;
    config.seed = o.seed();
    config.forest.n_trees = o.count("trees", config.forest.n_trees);
    config.forest.lambda = o.real("lambda", config.forest.lambda);
    config.forest.warning_delta = o.real("warning_delta", config.forest.warning_delta);
    config.forest.drift_delta = o.real("drift_delta", config.forest.drift_delta);
    config.forest.tree.grace_period = o.count("grace_period", config.forest.tree.grace_period);
    config.forest.tree.split_confidence =
        o.real("split_confidence", config.forest.tree.split_confidence);
    config.forest.tree.tie_threshold = o.real("tie_threshold", config.forest.tree.tie_threshold);
    config.window = o.count("window", config.window);
    if (config.window == 0) throw usage("--window must be positive");
    config.ratio = o.real("ratio", config.ratio);
    config.pivot_year = o.integer("pivot_year", config.pivot_year);
    if (o.has("fractions")) config.fractions = o.reals("fractions");
    if (config.fractions.empty()) throw usage("--fractions needs at least one value");
    config.jobs = std::max<std::size_t>(1, o.count("jobs", 1));
    return config;
}

std::string metric_row(const std::string& model, const Metrics& m) {
    std::string out;
    out += model + ",accuracy," + text::format_number(m.accuracy) + "\n";
    out += model + ",precision," + text::format_number(m.precision) + "\n";
    out += model + ",recall," + text::format_number(m.recall) + "\n";
    out += model + ",f_measure," + text::format_number(m.f_measure) + "\n";
    return out;
}

const char* verdict_name(Dominance d) {
    switch (d) {
        case Dominance::FirstDominates: return "first_dominates";
        case Dominance::SecondDominates: return "second_dominates";
        case Dominance::None: break;
    }
    return "none";
}

void print_metrics(std::ostream& out, const std::string& label, const Metrics& m) {
    char line[160];
    std::snprintf(line, sizeof line, "%-10s accuracy %.4f  precision %.4f  recall %.4f  f %.4f\n",
                  label.c_str(), m.accuracy, m.precision, m.recall, m.f_measure);
    out << line;
}

void cmd_preprocess(Context& c) {
    DatasetSchema schema;
    schema.m_max = c.options.count("m_max", schema.m_max);
    const std::string raw = text::read_file(c.options.str("input"));
    const auto records = parse_process_records(raw, schema);
    const auto samples = flatten_snapshots(records, schema);
    write_flattened(c.out_dir / "flattened.csv", samples, schema.width());
    const auto hashes = run_hashes(records);
    if (!hashes.empty()) text::write_file(c.out_dir / "runs.csv", format_runs(hashes));
    const auto infected = std::count_if(samples.begin(), samples.end(), [](const auto& s) {
        return s.label == Label::Infected;
    });
    c.out << samples.size() << " snapshots (" << infected << " infected), width "
          << schema.width() << "\n";
}

void cmd_enrich(Context& c) {
    const auto samples = read_flattened(c.options.str("input"));
    const auto hashes = parse_runs(text::read_file(c.options.str("runs")));
    const auto metadata = load_metadata(c.options.str("metadata"));
    const std::string fallback = c.options.has("fallback") ? c.options.str("fallback") : "drop";
    if (fallback != "drop" && fallback != "keep") throw usage("--fallback must be drop or keep");
    const auto result = enrich_with_year(
        samples, hashes, metadata, fallback == "drop" ? YearFallback::Drop : YearFallback::KeepUnknown);
    const std::size_t width = samples.empty() ? 0 : samples.front().features().size();
    write_flattened(c.out_dir / "flattened.csv", result.samples, width);
    c.out << result.samples.size() << " snapshots kept, " << result.dropped << " dropped, "
          << result.unknown << " with unknown year\n";
}

std::vector<ConceptShift> parse_shifts(const Options& o) {
    std::vector<ConceptShift> shifts;
    int next_concept = 1;
    for (const auto& item : o.list("shifts")) {
        ConceptShift shift;
        const auto colon = item.find(':');
        const auto at = text::parse_number(item.substr(0, colon));
        if (!at || *at < 0) throw usage("bad --shifts entry '" + item + "'");
        shift.at = static_cast<std::size_t>(*at);
        if (colon == std::string::npos) {
            shift.concept_id = next_concept;
        } else {
            const auto id = text::parse_number(item.substr(colon + 1));
            if (!id || *id < 0) throw usage("bad --shifts entry '" + item + "'");
            shift.concept_id = static_cast<int>(*id);
        }
        next_concept = shift.concept_id + 1;
        shifts.push_back(shift);
    }
    return shifts;
}

void cmd_synth(Context& c) {
    const Options& o = c.options;
    SynthConfig config = o.flag("paper_shape") ? SynthConfig::paper_shape() : SynthConfig{};
    config.m_max = o.count("m_max", config.m_max);
    config.n = o.count("n", config.n);
    config.n_instances = o.count("instances", config.n_instances);
    config.noise = o.real("noise", config.noise);
    config.infected_fraction = o.real("infected_fraction", config.infected_fraction);
    config.seed = o.seed();
    config.concept_shifts = parse_shifts(o);
    if (o.has("year_boundaries") && o.has("years_every")) {
        throw usage("--year-boundaries and --years-every are mutually exclusive");
    }
    config.year_boundaries = o.counts("year_boundaries");
    if (o.has("years_every")) {
        const std::size_t every = o.count("years_every", 0);
        if (every == 0) throw usage("--years-every must be positive");
        for (std::size_t b = every; b < config.n_instances; b += every) {
            config.year_boundaries.push_back(b);
        }
    }
    const auto stream = generate_stream(config);
    write_flattened(c.out_dir / "flattened.csv", stream, config.m_max * config.n);
    c.out << stream.size() << " synthetic snapshots, width " << config.m_max * config.n << ", "
          << year_at(config, config.n_instances - 1) << " years\n";
}

void write_two_model(Context& c, const TwoModelResult& r) {
    write_report(c.out_dir / "batch", r.batch);
    write_report(c.out_dir / "online", r.online);
    text::write_file(c.out_dir / "plan.txt", format_manifest(r.plan));
    std::string summary = "model,metric,value\n";
    summary += metric_row("batch", r.batch.metrics);
    summary += metric_row("online", r.online.metrics);
    summary += "online,replacements," + std::to_string(r.replacements) + "\n";
    text::write_file(c.out_dir / "summary.csv", summary);
    print_metrics(c.out, "batch", r.batch.metrics);
    print_metrics(c.out, "online", r.online.metrics);
    c.out << "online vs batch: " << verdict_name(r.comparison.verdict) << ", "
          << r.replacements << " tree replacements\n";
}

void cmd_run_batch(Context& c) {
    const auto samples = read_flattened(c.options.str("input"));
    write_two_model(c, run_batch_experiment(samples, experiment_config(c.options)));
}

void cmd_run_online(Context& c) {
    const auto samples = read_flattened(c.options.str("input"));
    write_two_model(c, run_online_experiment(samples, experiment_config(c.options)));
}

void cmd_scarcity(Context& c) {
    const auto samples = read_flattened(c.options.str("input"));
    const auto points = run_scarcity_sweep(samples, experiment_config(c.options));
    std::string curve = "fraction,accuracy,precision,recall,f_measure,trained,replacements\n";
    for (const auto& p : points) {
        const std::string name = text::format_number(p.fraction);
        write_report(c.out_dir / ("fraction_" + name), p.report);
        const auto& m = p.report.metrics;
        curve += name + "," + text::format_number(m.accuracy) + "," +
                 text::format_number(m.precision) + "," + text::format_number(m.recall) + "," +
                 text::format_number(m.f_measure) + "," + std::to_string(p.report.trained) + "," +
                 std::to_string(p.replacements) + "\n";
        print_metrics(c.out, name, m);
    }
    text::write_file(c.out_dir / "scarcity.csv", curve);
}

void cmd_report(Context& c) {
    const auto first = read_report(c.options.str("first"));
    const auto second = read_report(c.options.str("second"));
    const auto cmp = compare_reports(first, second);
    std::string table = "metric,first,second,delta\n";
    const auto row = [&](const char* name, double a, double b, double d) {
        table += std::string(name) + "," + text::format_number(a) + "," + text::format_number(b) +
                 "," + text::format_number(d) + "\n";
    };
    row("accuracy", cmp.first.accuracy, cmp.second.accuracy, cmp.delta.accuracy);
    row("precision", cmp.first.precision, cmp.second.precision, cmp.delta.precision);
    row("recall", cmp.first.recall, cmp.second.recall, cmp.delta.recall);
    row("f_measure", cmp.first.f_measure, cmp.second.f_measure, cmp.delta.f_measure);
    table += std::string("verdict,") + verdict_name(cmp.verdict) + ",,\n";
    c.out << table;
    if (!c.out_dir.empty()) text::write_file(c.out_dir / "comparison.csv", table);
}

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<std::string> keys;
    std::function<void(Context&)> action;
    bool needs_out = true;
};

std::vector<std::string> with(std::vector<std::string> base, const std::vector<std::string>& extra) {
    base.insert(base.end(), extra.begin(), extra.end());
    return base;
}

const std::vector<CommandSpec>& commands() {
    static const std::vector<CommandSpec> specs = {
        {"preprocess", "Flatten a raw per-process table into snapshot vectors",
         {"input", "out", "seed", "m_max"}, cmd_preprocess},
        {"enrich", "Attach release years to flattened snapshots",
         {"input", "out", "seed", "runs", "metadata", "fallback"}, cmd_enrich},
        {"synth", "Generate a synthetic snapshot stream",
         {"out", "seed", "m_max", "n", "instances", "shifts", "year_boundaries", "years_every",
          "noise", "infected_fraction", "paper_shape"},
         cmd_synth},
        {"run-batch", "Random-split comparison of the batch and adaptive forests",
         with({"input", "out", "seed", "ratio"}, kModelKeys), cmd_run_batch},
        {"run-online", "Temporal test-then-train comparison",
         with({"input", "out", "seed", "pivot_year"}, kModelKeys), cmd_run_online},
        {"scarcity", "Sweep the share of revealed infected labels",
         with({"input", "out", "seed", "pivot_year", "fractions", "jobs"}, kModelKeys),
         cmd_scarcity},
        {"report", "Compare two report directories", {"first", "second", "out", "seed"},
         cmd_report, false},
    };
    return specs;
}

const CommandSpec& find_command(const std::string& name) {
    for (const auto& spec : commands()) {
        if (spec.name == name) return spec;
    }
    throw usage("unknown command '" + name + "'");
}

void execute(const CommandSpec& spec, Settings settings, bool force, std::ostream& out) {
    for (const auto& [key, value] : settings) {
        if (std::find(spec.keys.begin(), spec.keys.end(), key) == spec.keys.end()) {
            throw usage("'" + key + "' is not a setting of " + spec.name);
        }
    }
    if (!settings.count("seed")) {
        const char* env = std::getenv(kSeedEnv);
        settings["seed"] = env != nullptr && *env != '\0' ? env : "0";
    }
    // Paths are stored absolute so the manifest replays from anywhere.
    for (const char* key : {"input", "runs", "metadata", "first", "second", "out"}) {
        const auto it = settings.find(key);
        if (it != settings.end() && !it->second.empty()) {
            it->second = fs::absolute(it->second).lexically_normal().string();
        }
    }

    Options options(settings);
    options.seed();
    fs::path out_dir;
    if (spec.needs_out || options.has("out")) {
        out_dir = options.str("out");
        prepare_output(out_dir, force);
    }
    Context context{options, out_dir, out};
    spec.action(context);
    if (!out_dir.empty()) {
        text::write_file(out_dir / "manifest.txt", format_settings(spec.name, options.settings()));
    }
}

Settings load_config(const std::string& path, const std::string& command) {
    Settings settings = read_settings_file(path);
    const auto it = settings.find("command");
    if (it != settings.end()) {
        if (it->second != command) {
            throw usage(path + " is a '" + it->second + "' manifest, not '" + command + "'");
        }
        settings.erase(it);
    }
    return settings;
}

int fail(std::ostream& err, std::string_view code, std::string_view message) {
    err << "ERROR:" << code << ": " << message << "\n";
    return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adaptive random forest malware detection on system-state snapshots",
                 "driftforest"};
    app.require_subcommand(1);

    struct Bound {
        CLI::App* sub;
        const CommandSpec* spec;
        std::map<std::string, std::string> values;
        std::map<std::string, CLI::Option*> options;
        std::string config;
        bool paper_shape = false;
        bool force = false;
    };
    std::vector<std::unique_ptr<Bound>> bound;
    for (const auto& spec : commands()) {
        auto b = std::make_unique<Bound>();
        b->spec = &spec;
        b->sub = app.add_subcommand(spec.name, spec.help);
        for (const auto& key : spec.keys) {
            if (key == "paper_shape") {
                b->options[key] = b->sub->add_flag(flag_of(key), b->paper_shape, help_of(key));
            } else if (key == "first" || key == "second") {
                b->options[key] = b->sub->add_option(key, b->values[key], help_of(key))->required();
            } else {
                b->options[key] = b->sub->add_option(flag_of(key), b->values[key], help_of(key));
            }
        }
        b->sub->add_option("--config", b->config, "key=value settings file; flags take precedence");
        b->sub->add_flag("--force", b->force, "overwrite an existing output directory");
        bound.push_back(std::move(b));
    }

    std::string replay_manifest;
    std::string replay_out;
    bool replay_force = false;
    auto* replay = app.add_subcommand("replay", "Re-run an experiment from its manifest.txt");
    replay->add_option("manifest", replay_manifest, "manifest file")->required();
    auto* replay_out_opt = replay->add_option("--out", replay_out, "write to a different directory");
    replay->add_flag("--force", replay_force, "overwrite an existing output directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "ERROR:Usage: " << e.what() << "\n";
        return 2;
    }

    try {
        if (replay->parsed()) {
            Settings settings = read_settings_file(replay_manifest);
            const auto it = settings.find("command");
            if (it == settings.end()) throw usage(replay_manifest + " has no command line");
            const CommandSpec& spec = find_command(it->second);
            settings.erase(it);
            if (replay_out_opt->count() > 0) settings["out"] = replay_out;
            execute(spec, std::move(settings), replay_force, out);
            return 0;
        }
        for (const auto& b : bound) {
            if (!b->sub->parsed()) continue;
            Settings settings = b->config.empty() ? Settings{} : load_config(b->config, b->spec->name);
            for (const auto& [key, option] : b->options) {
                if (option->count() == 0) continue;
                settings[key] = key == "paper_shape" ? "true" : b->values[key];
            }
            execute(*b->spec, std::move(settings), b->force, out);
            return 0;
        }
        throw usage("no command given");
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Usage) {
            err << "ERROR:Usage: " << e.what() << "\n";
            return 2;
        }
        return fail(err, code_name(e.code()), e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(err, code_name(ErrorCode::IoError), e.what());
    } catch (const std::exception& e) {
        return fail(err, "Internal", e.what());
    }
}

}  // namespace driftforest
