#include "stacksr/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stacksr/engine.hpp"
#include "stacksr/error.hpp"
#include "stacksr/io.hpp"

namespace stacksr {

namespace fs = std::filesystem;

namespace {

struct RunOptions {
    std::string data;
    std::string functions;
    std::string constants;
    std::string params;
    std::string out = "run";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> generations;
    std::optional<std::size_t> population;
    int threads = 1;
    std::size_t top = 5;
};

struct ResumeOptions {
    std::string snapshot;
    std::string out = "run";
    std::size_t generations = 0;
    int threads = 1;
    std::size_t top = 5;
};

struct PredictOptions {
    std::string snapshot;
    std::string test;
    std::string mode = "one-step";
    std::size_t horizon = 0;
    std::size_t solution = 0;
    std::string out = ".";
};

struct ReportOptions {
    std::string stats;
    std::string out = "report";
};

struct ShowOptions {
    std::string snapshot;
    std::size_t top = 5;
};

std::string fmt_g(double v)
{
    if (!std::isfinite(v)) {
        return format_real(v);
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_g(*v) : "undefined"; }

std::string metrics_line(const Metrics& m)
{
    return "MAE=" + fmt_g(m.mae) + " NMSE=" + fmt_opt(m.nmse) + " r=" + fmt_opt(m.r);
}

void print_solutions(const RunState& state, std::size_t top, std::ostream& out, std::ostream& err)
{
    if (top > state.archive.size()) {
        err << "note: archive holds " << state.archive.size() << " solution(s); showing all\n";
    }
    const std::size_t n = std::min(top, state.archive.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& g = state.archive[i];
        const auto report = fitness_report(g, state.data, state.pset);
        out << "#" << i + 1 << " size=" << g.valid_length << " adj=" << fmt_g(g.adjusted()) << " "
            << metrics_line(report.metrics) << "\n";
        out << "    " << render_infix(g, state.pset) << "\n";
    }
}

// Paths inside a params file are relative to the file itself.
std::string resolve_from_params(const std::string& value, const fs::path& params_path)
{
    fs::path p(value);
    if (p.is_absolute() || params_path.empty()) {
        return p.string();
    }
    return (params_path.parent_path() / p).string();
}

void require_file(const std::string& path, const std::string& what)
{
    if (path.empty()) {
        throw ParameterError(what + ": no file given");
    }
    if (!fs::is_regular_file(path)) {
        throw Error(path + ": " + what + " file not found");
    }
}

void write_outputs(const RunState& state, const fs::path& dir, const std::string& log)
{
    write_stats_csv(state.records, dir / "stats.csv");
    write_file_atomic(dir / "run.log", log);
    save_state(state, dir / "final.snapshot");
}

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err)
{
    std::string data_path = opt.data;
    std::string functions_path = opt.functions;
    std::string constants_path = opt.constants;
    GpParams params;
    if (!opt.params.empty()) {
        require_file(opt.params, "params");
        const auto text = read_file(opt.params);
        params = parse_params(text, GpParams{}, opt.params);
        const auto j = nlohmann::json::parse(text);
        const auto from_file = [&](const char* key, std::string& target) {
            if (target.empty() && j.contains(key)) {
                target = resolve_from_params(j.at(key).get<std::string>(), opt.params);
            }
        };
        from_file("data", data_path);
        from_file("functions", functions_path);
        from_file("constants", constants_path);
    }
    if (opt.seed) {
        params.seed = *opt.seed;
    }
    if (opt.generations) {
        const bool cascade_tracks = params.generations_per_cascade == params.generations;
        params.generations = *opt.generations;
        if (cascade_tracks || params.generations_per_cascade > params.generations) {
            params.generations_per_cascade = std::max<std::size_t>(1, params.generations);
        }
    }
    if (opt.population) {
        const bool archive_tracks = params.selection.archive_size == default_archive_size(params.population_size);
        params.population_size = *opt.population;
        if (archive_tracks) {
            params.selection.archive_size = default_archive_size(params.population_size);
        }
    }

    require_file(data_path, "data");
    require_file(functions_path, "functions");
    const Dataset data = load_dataset(data_path);
    const FunctionSet functions = load_functions(functions_path);
    std::vector<double> constants;
    if (!constants_path.empty()) {
        require_file(constants_path, "constants");
        constants = load_constants(constants_path);
    }
    const PrimitiveSet pset(data.variable_names, constants, functions.binary, functions.unary);

    set_eval_threads(opt.threads);
    fs::create_directories(opt.out);
    std::ostringstream log;
    const auto state = run(params, data, pset, [&](const RunState& s) { append_population_log(s, log); });
    write_outputs(state, opt.out, log.str());

    out << "completed " << state.generation << " generation(s); outputs in " << opt.out << "\n";
    print_solutions(state, opt.top, out, err);
    return 0;
}

int cmd_resume(const ResumeOptions& opt, std::ostream& out, std::ostream& err)
{
    RunState state = load_state(opt.snapshot);
    state.params.generations += opt.generations;
    if (state.generation >= state.params.generations) {
        throw ParameterError("resume: snapshot already reached its " + std::to_string(state.params.generations) +
                             " generation(s); pass --generations to extend");
    }
    set_eval_threads(opt.threads);
    fs::create_directories(opt.out);
    std::ostringstream log;
    continue_run(state, [&](const RunState& s) { append_population_log(s, log); });
    write_outputs(state, opt.out, log.str());

    out << "resumed to generation " << state.generation << "; outputs in " << opt.out << "\n";
    print_solutions(state, opt.top, out, err);
    return 0;
}

int cmd_predict(const PredictOptions& opt, std::ostream& out, std::ostream& err)
{
    const RunState state = load_state(opt.snapshot);
    if (opt.solution >= state.archive.size()) {
        throw ParameterError("--solution " + std::to_string(opt.solution) + " outside archive of size " +
                             std::to_string(state.archive.size()));
    }
    const Genome& model = state.archive[opt.solution];
    const std::size_t vars = state.pset.variable_count();
    const TestTable table = load_test_table(opt.test, vars);
    fs::create_directories(opt.out);
    const fs::path dest = fs::path(opt.out) / "predictions.csv";

    std::vector<double> predictions;
    std::optional<std::vector<double>> targets;
    std::string csv;
    if (opt.mode == "one-step") {
        predictions = predict_one_step(model, table.inputs, state.pset);
        targets = table.targets;
        for (std::size_t j = 0; j < vars; ++j) {
            csv += table.columns[j] + ",";
        }
        csv += targets ? table.columns.back() + ",prediction\n" : "prediction\n";
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            for (double v : table.inputs[i]) {
                csv += format_real(v) + ",";
            }
            if (targets) {
                csv += format_real((*targets)[i]) + ",";
            }
            csv += format_real(predictions[i]) + "\n";
        }
    } else if (opt.mode == "multi-step") {
        if (table.inputs.empty()) {
            throw DataError(opt.test + ": multi-step prediction needs a seed row");
        }
        const std::size_t horizon = opt.horizon > 0 ? opt.horizon : table.inputs.size();
        const auto result = predict_multi_step(model, table.inputs.front(), horizon, state.pset);
        predictions = result.values;
        if (result.truncated) {
            err << "note: prediction became non-finite after " << predictions.size() << " step(s); truncated\n";
        }
        if (table.targets) {
            const std::size_t n = std::min(predictions.size(), table.targets->size());
            targets.emplace(table.targets->begin(), table.targets->begin() + static_cast<std::ptrdiff_t>(n));
        }
        csv = targets ? "step,target,prediction\n" : "step,prediction\n";
        for (std::size_t t = 0; t < predictions.size(); ++t) {
            csv += std::to_string(t + 1) + ",";
            if (targets && t < targets->size()) {
                csv += format_real((*targets)[t]) + ",";
            } else if (targets) {
                csv += ",";
            }
            csv += format_real(predictions[t]) + "\n";
        }
    } else {
        throw ParameterError("--mode must be one-step or multi-step");
    }
    write_file_atomic(dest, csv);
    out << "wrote " << predictions.size() << " prediction(s) to " << dest.string() << "\n";
    if (targets && targets->size() >= 2) {
        const std::span<const double> p(predictions.data(), targets->size());
        out << metrics_line(metrics(p, *targets)) << "\n";
    }
    return 0;
}

int cmd_report(const ReportOptions& opt, std::ostream& out, std::ostream&)
{
    require_file(opt.stats, "stats");
    const auto records = parse_stats_csv(read_file(opt.stats), opt.stats);
    if (records.empty()) {
        throw DataError(opt.stats + ": no generation rows");
    }
    fs::create_directories(opt.out);
    const auto series = [&](const std::string& name, const std::string& column, auto value) {
        std::string text = "# generation " + column + "\n";
        for (const auto& r : records) {
            text += std::to_string(r.generation) + " " + format_real(value(r)) + "\n";
        }
        write_file_atomic(fs::path(opt.out) / name, text);
    };
    series("best_adjusted.dat", "best_adj", [](const GenerationRecord& r) { return r.best_adjusted; });
    series("archive_mean_adjusted.dat", "archive_mean_adj",
           [](const GenerationRecord& r) { return r.archive_mean_adjusted; });
    series("archive_mean_nodes.dat", "archive_mean_nodes",
           [](const GenerationRecord& r) { return r.archive_mean_nodes; });
    std::string combined = "# generation best_adj archive_mean_adj archive_mean_nodes\n";
    for (const auto& r : records) {
        combined += std::to_string(r.generation) + " " + format_real(r.best_adjusted) + " " +
                    format_real(r.archive_mean_adjusted) + " " + format_real(r.archive_mean_nodes) + "\n";
    }
    write_file_atomic(fs::path(opt.out) / "combined.dat", combined);
    out << "wrote 4 plot files for " << records.size() << " generation(s) to " << opt.out << "\n";
    return 0;
}

int cmd_show(const ShowOptions& opt, std::ostream& out, std::ostream& err)
{
    const RunState state = load_state(opt.snapshot);
    print_solutions(state, opt.top, out, err);
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"stacksr - symbolic regression with linear postfix genetic programming"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run_cmd = app.add_subcommand("run", "Evolve expressions for a training dataset");
    run_cmd->add_option("--data", run_opt.data, "Training CSV (header row, last column is the target)");
    run_cmd->add_option("--functions", run_opt.functions, "Function file, one 'symbol,arity' per line");
    run_cmd->add_option("--constants", run_opt.constants, "Constants file, one comma-separated line");
    run_cmd->add_option("--params", run_opt.params, "JSON parameter file");
    run_cmd->add_option("--out", run_opt.out, "Output directory")->capture_default_str();
    run_cmd->add_option("--seed", run_opt.seed, "Random seed (overrides the params file)");
    run_cmd->add_option("--generations", run_opt.generations, "Number of generations");
    run_cmd->add_option("--population", run_opt.population, "Population size");
    run_cmd->add_option("--threads", run_opt.threads, "Fitness evaluation threads")->capture_default_str();
    run_cmd->add_option("--top", run_opt.top, "Solutions to print")->capture_default_str();

    ResumeOptions resume_opt;
    auto* resume_cmd = app.add_subcommand("resume", "Continue a run from a snapshot");
    resume_cmd->add_option("--snapshot", resume_opt.snapshot, "Snapshot file")->required();
    resume_cmd->add_option("--generations", resume_opt.generations, "Additional generations");
    resume_cmd->add_option("--out", resume_opt.out, "Output directory")->capture_default_str();
    resume_cmd->add_option("--threads", resume_opt.threads, "Fitness evaluation threads")->capture_default_str();
    resume_cmd->add_option("--top", resume_opt.top, "Solutions to print")->capture_default_str();

    PredictOptions predict_opt;
    auto* predict_cmd = app.add_subcommand("predict", "Predict out-of-sample points with an evolved solution");
    predict_cmd->add_option("--snapshot", predict_opt.snapshot, "Snapshot file")->required();
    predict_cmd->add_option("--test", predict_opt.test, "Test CSV (inputs, optional target)")->required();
    predict_cmd->add_option("--mode", predict_opt.mode, "one-step or multi-step")
        ->check(CLI::IsMember({"one-step", "multi-step"}))
        ->capture_default_str();
    predict_cmd->add_option("--horizon", predict_opt.horizon, "Multi-step horizon (default: test row count)")
        ->check(CLI::PositiveNumber);
    predict_cmd->add_option("--solution", predict_opt.solution, "Archive index of the model")->capture_default_str();
    predict_cmd->add_option("--out", predict_opt.out, "Output directory for predictions.csv")->capture_default_str();

    ReportOptions report_opt;
    auto* report_cmd = app.add_subcommand("report", "Write plot data from a statistics file");
    report_cmd->add_option("--stats", report_opt.stats, "stats.csv from a run")->required();
    report_cmd->add_option("--out", report_opt.out, "Output directory")->capture_default_str();

    ShowOptions show_opt;
    auto* show_cmd = app.add_subcommand("show", "Print the best solutions in a snapshot");
    show_cmd->add_option("--snapshot", show_opt.snapshot, "Snapshot file")->required();
    show_cmd->add_option("--top", show_opt.top, "Number of solutions")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return e.get_exit_code();
    }

    try {
        if (*run_cmd) {
            return cmd_run(run_opt, out, err);
        }
        if (*resume_cmd) {
            return cmd_resume(resume_opt, out, err);
        }
        if (*predict_cmd) {
            return cmd_predict(predict_opt, out, err);
        }
        if (*report_cmd) {
            return cmd_report(report_opt, out, err);
        }
        if (*show_cmd) {
            return cmd_show(show_opt, out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace stacksr
