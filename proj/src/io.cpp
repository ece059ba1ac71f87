#include "stacksr/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "stacksr/error.hpp"

namespace stacksr {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto next = text.find('\n', pos);
        if (next == std::string_view::npos) {
            next = text.size();
        }
        auto line = text.substr(pos, next - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        pos = next + 1;
    }
    return lines;
}

// Splits one CSV record; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv(std::string_view line)
{
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::optional<double> parse_real(std::string_view text)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    if (text.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

double parse_cell(std::string_view cell, std::string_view source, std::size_t row, std::size_t column)
{
    const auto value = parse_real(cell);
    if (!value) {
        throw ParseError(std::string(source) + ": row " + std::to_string(row) + ", column " + std::to_string(column) +
                             ": non-numeric cell '" + std::string(trim(cell)) + "'",
                         row, column);
    }
    if (!std::isfinite(*value)) {
        throw DataError(std::string(source) + ": row " + std::to_string(row) + ", column " + std::to_string(column) +
                        ": non-finite value");
    }
    return *value;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Table parse_table(std::string_view text, std::string_view source)
{
    Table table;
    const auto lines = split_lines(text);
    std::size_t line_no = 0;
    bool have_header = false;
    for (auto raw : lines) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) {
            continue;
        }
        auto fields = split_csv(line);
        if (!have_header) {
            for (auto& f : fields) {
                table.header.emplace_back(trim(f));
            }
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw DataError(std::string(source) + ": row " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " columns, header has " +
                            std::to_string(table.header.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            row.push_back(parse_cell(fields[c], source, line_no, c + 1));
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) {
        throw DataError(std::string(source) + ": missing header row");
    }
    return table;
}

json encode_real(double v)
{
    if (std::isfinite(v)) {
        return v;
    }
    return format_real(v);
}

double decode_real(const json& j, const std::string& field)
{
    if (j.is_number()) {
        return j.get<double>();
    }
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
        if (s == "nan") {
            return std::numeric_limits<double>::quiet_NaN();
        }
    }
    throw CorruptFileError(field + ": expected a real number");
}

json encode_optional(const std::optional<double>& v)
{
    return v ? encode_real(*v) : json(nullptr);
}

std::optional<double> decode_optional(const json& j, const std::string& field)
{
    if (j.is_null()) {
        return std::nullopt;
    }
    return decode_real(j, field);
}

json params_json(const GpParams& p)
{
    json j;
    j["generations"] = p.generations;
    j["generations_per_cascade"] = p.generations_per_cascade;
    j["population_size"] = p.population_size;
    j["min_length"] = p.min_length;
    j["max_length"] = p.max_length;
    j["mutation_rate"] = p.mutation_rate;
    j["crossover_rate"] = p.crossover_rate;
    j["crossover_type"] = std::string(to_string(p.crossover_type));
    j["mutation_type"] = std::string(to_string(p.mutation_type));
    j["selection"] = {
        {"scheme", std::string(to_string(p.selection.scheme))},
        {"tournament_size", p.selection.tournament_size},
        {"parsimony_epsilon", p.selection.parsimony_epsilon},
        {"archive_parent_rate", p.selection.archive_parent_rate},
        {"archive_size", p.selection.archive_size},
    };
    j["interval_arithmetic"] = p.interval_arithmetic;
    j["semantic_sensitivity"] = encode_real(p.semantic_sensitivity);
    j["initial_population"] = std::string(to_string(p.initial_population));
    j["max_crossover_trials"] = p.max_crossover_trials;
    j["max_mutation_trials"] = p.max_mutation_trials;
    j["operator_mutate_frequency"] = p.operator_mutate_frequency;
    j["seed"] = p.seed;
    return j;
}

// Keys a params file may carry for the command-line front end.
const std::set<std::string> kPathKeys{"data", "functions", "constants"};

GpParams params_from_json(const json& j, GpParams p, std::string_view source)
{
    static const std::set<std::string> known{
        "generations",        "generations_per_cascade", "population_size",      "min_length",
        "max_length",         "mutation_rate",           "crossover_rate",       "crossover_type",
        "mutation_type",      "selection",               "interval_arithmetic",  "semantic_sensitivity",
        "initial_population", "max_crossover_trials",    "max_mutation_trials",  "operator_mutate_frequency",
        "seed"};
    if (!j.is_object()) {
        throw ParameterError(std::string(source) + ": parameters must be a JSON object");
    }
    std::string key;
    try {
        for (const auto& [k, v] : j.items()) {
            if (!known.contains(k) && !kPathKeys.contains(k)) {
                throw ParameterError(std::string(source) + ": unknown parameter '" + k + "'");
            }
        }
        const auto take = [&](const char* name, auto& field) {
            key = name;
            if (j.contains(name)) {
                j.at(name).get_to(field);
            }
        };
        take("generations", p.generations);
        take("population_size", p.population_size);
        p.generations_per_cascade = p.generations;
        take("generations_per_cascade", p.generations_per_cascade);
        take("min_length", p.min_length);
        take("max_length", p.max_length);
        take("mutation_rate", p.mutation_rate);
        take("crossover_rate", p.crossover_rate);
        take("interval_arithmetic", p.interval_arithmetic);
        take("max_crossover_trials", p.max_crossover_trials);
        take("max_mutation_trials", p.max_mutation_trials);
        take("operator_mutate_frequency", p.operator_mutate_frequency);
        take("seed", p.seed);
        key = "semantic_sensitivity";
        if (j.contains(key)) {
            p.semantic_sensitivity = decode_real(j.at(key), key);
        }
        key = "crossover_type";
        if (j.contains(key)) {
            p.crossover_type = parse_crossover_type(j.at(key).get<std::string>());
        }
        key = "mutation_type";
        if (j.contains(key)) {
            p.mutation_type = parse_mutation_type(j.at(key).get<std::string>());
        }
        key = "initial_population";
        if (j.contains(key)) {
            p.initial_population = parse_initial_population(j.at(key).get<std::string>());
        }
        p.selection.archive_size = default_archive_size(p.population_size);
        if (j.contains("selection")) {
            const auto& s = j.at("selection");
            key = "selection.scheme";
            if (s.contains("scheme")) {
                p.selection.scheme = parse_selection_scheme(s.at("scheme").get<std::string>());
            }
            key = "selection.tournament_size";
            if (s.contains("tournament_size")) {
                s.at("tournament_size").get_to(p.selection.tournament_size);
            }
            key = "selection.parsimony_epsilon";
            if (s.contains("parsimony_epsilon")) {
                s.at("parsimony_epsilon").get_to(p.selection.parsimony_epsilon);
            }
            key = "selection.archive_parent_rate";
            if (s.contains("archive_parent_rate")) {
                s.at("archive_parent_rate").get_to(p.selection.archive_parent_rate);
            }
            key = "selection.archive_size";
            if (s.contains("archive_size")) {
                s.at("archive_size").get_to(p.selection.archive_size);
            }
        }
    } catch (const json::exception& e) {
        throw ParameterError(std::string(source) + ": " + key + ": " + e.what());
    }
    return p;
}

json genome_json(const Genome& g)
{
    json j;
    j["tokens"] = g.tokens;
    j["valid_length"] = g.valid_length;
    if (g.fitness) {
        j["raw"] = encode_real(g.fitness->raw);
        j["adjusted"] = encode_real(g.fitness->adjusted);
    }
    return j;
}

Genome genome_from_json(const json& j, const std::string& field, const GpParams& params, const PrimitiveSet& pset)
{
    Genome g;
    j.at("tokens").get_to(g.tokens);
    j.at("valid_length").get_to(g.valid_length);
    if (!j.contains("raw") || !j.contains("adjusted")) {
        throw CorruptFileError(field + ": missing fitness");
    }
    g.fitness = Fitness{decode_real(j.at("raw"), field + ".raw"), decode_real(j.at("adjusted"), field + ".adjusted")};
    if (g.capacity() != params.max_length) {
        throw CorruptFileError(field + ": capacity " + std::to_string(g.capacity()) + " differs from max_length " +
                               std::to_string(params.max_length));
    }
    if (g.valid_length < params.min_length || g.valid_length > params.max_length) {
        throw CorruptFileError(field + ": valid_length " + std::to_string(g.valid_length) + " outside [min_length, max_length]");
    }
    try {
        check_genome(g, pset);
    } catch (const Error& e) {
        throw CorruptFileError(field + ": " + e.what());
    }
    const double adj = g.fitness->adjusted;
    if (!(adj >= 0.0 && adj <= 1.0)) {
        throw CorruptFileError(field + ": adjusted fitness outside [0, 1]");
    }
    return g;
}

json record_json(const GenerationRecord& r)
{
    return json{
        {"generation", r.generation},
        {"best_adjusted", encode_real(r.best_adjusted)},
        {"best_size", r.best_size},
        {"archive_mean_adjusted", encode_real(r.archive_mean_adjusted)},
        {"archive_mean_nodes", encode_real(r.archive_mean_nodes)},
        {"best_so_far_expr", r.best_so_far_expr},
        {"best_so_far_size", r.best_so_far_size},
        {"best_so_far_adjusted", encode_real(r.best_so_far_adjusted)},
        {"mae", encode_real(r.mae)},
        {"nmse", encode_optional(r.nmse)},
        {"r", encode_optional(r.r)},
    };
}

GenerationRecord record_from_json(const json& j, const std::string& field)
{
    GenerationRecord r;
    j.at("generation").get_to(r.generation);
    r.best_adjusted = decode_real(j.at("best_adjusted"), field + ".best_adjusted");
    j.at("best_size").get_to(r.best_size);
    r.archive_mean_adjusted = decode_real(j.at("archive_mean_adjusted"), field + ".archive_mean_adjusted");
    r.archive_mean_nodes = decode_real(j.at("archive_mean_nodes"), field + ".archive_mean_nodes");
    j.at("best_so_far_expr").get_to(r.best_so_far_expr);
    j.at("best_so_far_size").get_to(r.best_so_far_size);
    r.best_so_far_adjusted = decode_real(j.at("best_so_far_adjusted"), field + ".best_so_far_adjusted");
    r.mae = decode_real(j.at("mae"), field + ".mae");
    r.nmse = decode_optional(j.at("nmse"), field + ".nmse");
    r.r = decode_optional(j.at("r"), field + ".r");
    return r;
}

std::vector<Operator> operators_from_json(const json& j, int arity, const std::string& field)
{
    std::vector<Operator> ops;
    for (const auto& item : j) {
        const auto symbol = item.get<std::string>();
        auto op = lookup_operator(symbol, arity);
        if (!op) {
            throw CorruptFileError(field + ": unknown operator '" + symbol + "'");
        }
        ops.push_back(*op);
    }
    return ops;
}

std::string quote_csv(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_real(*v) : "nan"; }

} // namespace

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(path.string() + ": cannot open file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(tmp.string() + ": cannot open for writing");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw Error(tmp.string() + ": write failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(path.string() + ": cannot replace file");
    }
}

Dataset parse_dataset(std::string_view text, std::string_view source)
{
    auto table = parse_table(text, source);
    if (table.header.size() < 2) {
        throw DataError(std::string(source) + ": need at least one input column and a target column");
    }
    if (table.rows.size() < 2) {
        throw DataError(std::string(source) + ": insufficient data, " + std::to_string(table.rows.size()) +
                        " data row(s); at least 2 required");
    }
    Dataset data;
    data.variable_names.assign(table.header.begin(), table.header.end() - 1);
    for (auto& row : table.rows) {
        data.targets.push_back(row.back());
        row.pop_back();
        data.inputs.push_back(std::move(row));
    }
    return data;
}

Dataset load_dataset(const std::filesystem::path& path) { return parse_dataset(read_file(path), path.string()); }

TestTable load_test_table(const std::filesystem::path& path, std::size_t variable_count)
{
    const auto source = path.string();
    auto table = parse_table(read_file(path), source);
    const std::size_t width = table.header.size();
    if (width != variable_count && width != variable_count + 1) {
        throw DataError(source + ": " + std::to_string(width) + " columns, but the model has " +
                        std::to_string(variable_count) + " variables");
    }
    TestTable out;
    out.columns = table.header;
    if (width == variable_count + 1) {
        out.targets.emplace();
    }
    for (auto& row : table.rows) {
        if (out.targets) {
            out.targets->push_back(row.back());
            row.pop_back();
        }
        out.inputs.push_back(std::move(row));
    }
    return out;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path)
{
    std::string text;
    for (const auto& name : data.variable_names) {
        text += name + ",";
    }
    text += "target\n";
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (double v : data.inputs[i]) {
            text += format_real(v) + ",";
        }
        text += format_real(data.targets[i]) + "\n";
    }
    write_file_atomic(path, text);
}

FunctionSet parse_functions(std::string_view text, std::string_view source)
{
    FunctionSet set;
    std::size_t line_no = 0;
    for (auto raw : split_lines(text)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        const std::string where = std::string(source) + ": line " + std::to_string(line_no);
        if (fields.size() != 2) {
            throw DataError(where + ": expected 'symbol,arity'");
        }
        const std::string symbol(trim(fields[0]));
        const auto arity_text = trim(fields[1]);
        int arity = 0;
        const auto [ptr, ec] = std::from_chars(arity_text.data(), arity_text.data() + arity_text.size(), arity);
        if (ec != std::errc{} || ptr != arity_text.data() + arity_text.size()) {
            throw ParseError(where + ": arity '" + std::string(arity_text) + "' is not an integer", line_no, 2);
        }
        if (arity != 1 && arity != 2) {
            throw DataError(where + ": arity of '" + symbol + "' must be 1 or 2, got " + std::to_string(arity));
        }
        if (!is_known_symbol(symbol)) {
            throw DataError(where + ": unknown function symbol '" + symbol + "'");
        }
        auto op = lookup_operator(symbol, arity);
        if (!op) {
            throw DataError(where + ": function '" + symbol + "' does not take " + std::to_string(arity) +
                            " argument(s)");
        }
        (arity == 2 ? set.binary : set.unary).push_back(*op);
    }
    return set;
}

FunctionSet load_functions(const std::filesystem::path& path)
{
    return parse_functions(read_file(path), path.string());
}

std::vector<double> parse_constants(std::string_view text, std::string_view source)
{
    std::vector<double> out;
    std::size_t entry = 0;
    std::size_t line_no = 0;
    for (auto raw : split_lines(text)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) {
            continue;
        }
        for (const auto& field : split_csv(line)) {
            ++entry;
            const auto value = parse_real(field);
            if (!value) {
                throw ParseError(std::string(source) + ": entry " + std::to_string(entry) + ": non-numeric value '" +
                                     std::string(trim(field)) + "'",
                                 line_no, entry);
            }
            if (!std::isfinite(*value)) {
                throw DataError(std::string(source) + ": entry " + std::to_string(entry) + ": non-finite value");
            }
            out.push_back(*value);
        }
    }
    return out;
}

std::vector<double> load_constants(const std::filesystem::path& path)
{
    return parse_constants(read_file(path), path.string());
}

GpParams parse_params(std::string_view text, GpParams base, std::string_view source)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParameterError(std::string(source) + ": " + e.what());
    }
    return params_from_json(j, base, source);
}

GpParams load_params(const std::filesystem::path& path, GpParams base)
{
    return parse_params(read_file(path), base, path.string());
}

std::string params_to_json(const GpParams& params) { return params_json(params).dump(2) + "\n"; }

std::string snapshot_text(const RunState& state)
{
    json j;
    j["format"] = "stacksr-snapshot";
    j["version"] = kSnapshotVersion;
    j["params"] = params_json(state.params);

    json prims;
    prims["variables"] = state.pset.variables();
    prims["constants"] = state.pset.constants();
    prims["binary"] = json::array();
    for (const auto& op : state.pset.binary_ops()) {
        prims["binary"].push_back(op.symbol);
    }
    prims["unary"] = json::array();
    for (const auto& op : state.pset.unary_ops()) {
        prims["unary"].push_back(op.symbol);
    }
    j["primitives"] = prims;

    j["dataset"] = {
        {"variables", state.data.variable_names},
        {"inputs", state.data.inputs},
        {"targets", state.data.targets},
    };

    j["population"] = json::array();
    for (const auto& g : state.population) {
        j["population"].push_back(genome_json(g));
    }
    j["archive"] = json::array();
    for (const auto& g : state.archive) {
        j["archive"].push_back(genome_json(g));
    }
    j["generation"] = state.generation;
    j["rng"] = state.rng.state();
    j["records"] = json::array();
    for (const auto& r : state.records) {
        j["records"].push_back(record_json(r));
    }
    return j.dump(1) + "\n";
}

RunState parse_snapshot(std::string_view text, std::string_view source)
{
    const std::string where(source);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw CorruptFileError(where + ": unreadable snapshot (" + e.what() + ")");
    }

    std::string field = "format";
    try {
        if (!j.is_object() || j.value("format", "") != "stacksr-snapshot") {
            throw CorruptFileError(where + ": format: not a snapshot file");
        }
        field = "version";
        const int version = j.at("version").get<int>();
        if (version != kSnapshotVersion) {
            throw CorruptFileError(where + ": version: snapshot version " + std::to_string(version) +
                                   " is not supported (expected " + std::to_string(kSnapshotVersion) + ")");
        }

        RunState state;
        field = "params";
        state.params = params_from_json(j.at("params"), GpParams{}, where);
        check_params(state.params);

        field = "primitives";
        const auto& prims = j.at("primitives");
        state.pset = PrimitiveSet(prims.at("variables").get<std::vector<std::string>>(),
                                  prims.at("constants").get<std::vector<double>>(),
                                  operators_from_json(prims.at("binary"), 2, "primitives.binary"),
                                  operators_from_json(prims.at("unary"), 1, "primitives.unary"));

        field = "dataset";
        const auto& ds = j.at("dataset");
        ds.at("variables").get_to(state.data.variable_names);
        ds.at("inputs").get_to(state.data.inputs);
        ds.at("targets").get_to(state.data.targets);
        check_dataset(state.data);
        if (state.data.variables() != state.pset.variable_count()) {
            throw CorruptFileError(where + ": dataset: variable count differs from primitive set");
        }

        field = "population";
        const auto& pop = j.at("population");
        for (std::size_t i = 0; i < pop.size(); ++i) {
            state.population.push_back(
                genome_from_json(pop[i], "population[" + std::to_string(i) + "]", state.params, state.pset));
        }
        if (state.population.size() != state.params.population_size) {
            throw CorruptFileError(where + ": population: holds " + std::to_string(state.population.size()) +
                                   " genomes, population_size is " + std::to_string(state.params.population_size));
        }

        field = "archive";
        const auto& arc = j.at("archive");
        for (std::size_t i = 0; i < arc.size(); ++i) {
            state.archive.push_back(
                genome_from_json(arc[i], "archive[" + std::to_string(i) + "]", state.params, state.pset));
        }
        if (state.archive.empty() || state.archive.size() > state.params.selection.archive_size) {
            throw CorruptFileError(where + ": archive: size " + std::to_string(state.archive.size()) +
                                   " outside [1, archive_size]");
        }
        for (std::size_t i = 1; i < state.archive.size(); ++i) {
            if (!archive_before(state.archive[i - 1], state.archive[i])) {
                throw CorruptFileError(where + ": archive: entries not strictly ordered at index " +
                                       std::to_string(i));
            }
        }

        field = "generation";
        j.at("generation").get_to(state.generation);
        if (state.generation > state.params.generations) {
            throw CorruptFileError(where + ": generation: exceeds configured generations");
        }

        field = "rng";
        state.rng.restore(j.at("rng").get<std::string>());

        field = "records";
        const auto& recs = j.at("records");
        for (std::size_t i = 0; i < recs.size(); ++i) {
            state.records.push_back(record_from_json(recs[i], "records[" + std::to_string(i) + "]"));
        }
        if (state.records.size() != state.generation + 1) {
            throw CorruptFileError(where + ": records: expected " + std::to_string(state.generation + 1) +
                                   " records, found " + std::to_string(state.records.size()));
        }
        return state;
    } catch (const CorruptFileError&) {
        throw;
    } catch (const json::exception& e) {
        throw CorruptFileError(where + ": " + field + ": " + e.what());
    } catch (const Error& e) {
        throw CorruptFileError(where + ": " + field + ": " + e.what());
    }
}

void save_state(const RunState& state, const std::filesystem::path& path)
{
    write_file_atomic(path, snapshot_text(state));
}

RunState load_state(const std::filesystem::path& path)
{
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw CorruptFileError(e.what());
    }
    return parse_snapshot(text, path.string());
}

std::string stats_csv(const std::vector<GenerationRecord>& records)
{
    std::string out = "generation,best_adj,best_size,archive_mean_adj,archive_mean_nodes,best_so_far_expr,"
                      "best_so_far_size,mae,nmse,r,best_so_far_adj\n";
    for (const auto& r : records) {
        out += std::to_string(r.generation) + "," + format_real(r.best_adjusted) + "," + std::to_string(r.best_size) +
               "," + format_real(r.archive_mean_adjusted) + "," + format_real(r.archive_mean_nodes) + "," +
               quote_csv(r.best_so_far_expr) + "," + std::to_string(r.best_so_far_size) + "," + format_real(r.mae) +
               "," + format_optional(r.nmse) + "," + format_optional(r.r) + "," +
               format_real(r.best_so_far_adjusted) + "\n";
    }
    return out;
}

void write_stats_csv(const std::vector<GenerationRecord>& records, const std::filesystem::path& path)
{
    if (records.empty()) {
        throw ParameterError("no generation records to write");
    }
    write_file_atomic(path, stats_csv(records));
}

std::vector<GenerationRecord> parse_stats_csv(std::string_view text, std::string_view source)
{
    const std::string where(source);
    std::vector<GenerationRecord> records;
    bool have_header = false;
    std::size_t line_no = 0;
    for (auto raw : split_lines(text)) {
        ++line_no;
        if (trim(raw).empty()) {
            continue;
        }
        const auto f = split_csv(raw);
        if (!have_header) {
            if (f.size() != 11 || f[0] != "generation") {
                throw DataError(where + ": not a statistics file (unexpected header)");
            }
            have_header = true;
            continue;
        }
        if (f.size() != 11) {
            throw DataError(where + ": row " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                            " columns, expected 11");
        }
        const auto real = [&](std::size_t c) {
            const auto v = parse_real(f[c]);
            if (!v) {
                throw ParseError(where + ": row " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                     ": non-numeric cell '" + f[c] + "'",
                                 line_no, c + 1);
            }
            return *v;
        };
        const auto count = [&](std::size_t c) {
            const double v = real(c);
            if (!(v >= 0.0) || v != std::floor(v)) {
                throw ParseError(where + ": row " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                     ": expected a count",
                                 line_no, c + 1);
            }
            return static_cast<std::size_t>(v);
        };
        const auto optional_real = [&](std::size_t c) -> std::optional<double> {
            const double v = real(c);
            if (std::isnan(v)) {
                return std::nullopt;
            }
            return v;
        };
        GenerationRecord r;
        r.generation = count(0);
        r.best_adjusted = real(1);
        r.best_size = count(2);
        r.archive_mean_adjusted = real(3);
        r.archive_mean_nodes = real(4);
        r.best_so_far_expr = f[5];
        r.best_so_far_size = count(6);
        r.mae = real(7);
        r.nmse = optional_real(8);
        r.r = optional_real(9);
        r.best_so_far_adjusted = real(10);
        records.push_back(std::move(r));
    }
    if (!have_header) {
        throw DataError(where + ": empty statistics file");
    }
    return records;
}

void append_population_log(const RunState& state, std::ostream& out)
{
    out << "Generation " << state.generation << "\n";
    out << "  Population\n";
    for (const auto& g : state.population) {
        out << "    " << render_log(g, state.pset) << "\n";
    }
    out << "  Archive\n";
    for (const auto& g : state.archive) {
        out << "    " << render_log(g, state.pset) << "\n";
    }
}

void write_population_log(const RunState& state, const std::filesystem::path& path)
{
    std::ostringstream out;
    append_population_log(state, out);
    write_file_atomic(path, out.str());
}

} // namespace stacksr
