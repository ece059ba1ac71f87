#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stacksr/engine.hpp"
#include "stacksr/evaluator.hpp"
#include "stacksr/primitives.hpp"

namespace stacksr {

inline constexpr int kSnapshotVersion = 1;

// CSV with a header row; the last column is the target, the others are
// inputs in order. Throws ParseError (with 1-based row/column) on bad cells,
// DataError on ragged rows or fewer than two data rows.
Dataset load_dataset(const std::filesystem::path& path);
Dataset parse_dataset(std::string_view text, std::string_view source = "<memory>");

// Test table for prediction: header plus rows of either V inputs or V inputs
// and a target.
struct TestTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> inputs;
    std::optional<std::vector<double>> targets;
};
TestTable load_test_table(const std::filesystem::path& path, std::size_t variable_count);

struct FunctionSet {
    std::vector<Operator> binary;
    std::vector<Operator> unary;
};

// Lines "symbol,arity"; order of appearance fixes token ids within each arity.
FunctionSet load_functions(const std::filesystem::path& path);
FunctionSet parse_functions(std::string_view text, std::string_view source = "<memory>");

// One comma-separated line of finite reals; an empty file means no constants.
std::vector<double> load_constants(const std::filesystem::path& path);
std::vector<double> parse_constants(std::string_view text, std::string_view source = "<memory>");

// Writes a dataset so that load_dataset reads back identical values.
void save_dataset(const Dataset& data, const std::filesystem::path& path);

// JSON parameter file. Keys not present keep the values in `base`.
GpParams load_params(const std::filesystem::path& path, GpParams base = {});
GpParams parse_params(std::string_view text, GpParams base = {}, std::string_view source = "<memory>");
std::string params_to_json(const GpParams& params);

// Versioned canonical-text snapshot of a complete run state.
std::string snapshot_text(const RunState& state);
RunState parse_snapshot(std::string_view text, std::string_view source = "<memory>");
void save_state(const RunState& state, const std::filesystem::path& path);
RunState load_state(const std::filesystem::path& path);

// One row per generation. Reals use the shortest exact decimal form; the
// expression column is always quoted.
std::string stats_csv(const std::vector<GenerationRecord>& records);
void write_stats_csv(const std::vector<GenerationRecord>& records, const std::filesystem::path& path);
std::vector<GenerationRecord> parse_stats_csv(std::string_view text, std::string_view source = "<memory>");

// "Generation N" block with Population and Archive sections.
void append_population_log(const RunState& state, std::ostream& out);
void write_population_log(const RunState& state, const std::filesystem::path& path);

// Write to a temporary sibling, then rename over the destination.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

} // namespace stacksr
