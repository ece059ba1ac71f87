#include "stacksr/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "stacksr/error.hpp"

namespace stacksr {

std::string_view to_string(InitialPopulation type)
{
    switch (type) {
    case InitialPopulation::random: return "random";
    case InitialPopulation::semantically_diverse: return "semantically_diverse";
    }
    return "";
}

InitialPopulation parse_initial_population(std::string_view text)
{
    for (auto t : {InitialPopulation::random, InitialPopulation::semantically_diverse}) {
        if (to_string(t) == text) {
            return t;
        }
    }
    throw ParameterError("unknown initial population type '" + std::string(text) + "'");
}

void check_params(const GpParams& params)
{
    const auto rate_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (params.min_length < 1 || params.max_length < params.min_length) {
        throw ParameterError("min_length/max_length: need 0 < min_length <= max_length");
    }
    if (params.population_size < 2) {
        throw ParameterError("population_size: must be at least 2");
    }
    if (!rate_ok(params.mutation_rate)) {
        throw ParameterError("mutation_rate: must lie in [0, 1]");
    }
    if (!rate_ok(params.crossover_rate)) {
        throw ParameterError("crossover_rate: must lie in [0, 1]");
    }
    if (params.generations_per_cascade < 1 ||
        (params.generations > 0 && params.generations_per_cascade > params.generations)) {
        throw ParameterError("generations_per_cascade: must lie in [1, generations]");
    }
    check_selection_config(params.selection);
    check_variation_params(variation_params(params));
}

VariationParams variation_params(const GpParams& params)
{
    VariationParams v;
    v.crossover_type = params.crossover_type;
    v.mutation_type = params.mutation_type;
    v.max_crossover_trials = params.max_crossover_trials;
    v.max_mutation_trials = params.max_mutation_trials;
    v.operator_mutate_frequency = params.operator_mutate_frequency;
    v.semantic_sensitivity = params.semantic_sensitivity;
    v.limits = LengthLimits{params.min_length, params.max_length};
    return v;
}

std::vector<std::int64_t> semantic_key(std::span<const double> outputs)
{
    std::vector<std::int64_t> key;
    key.reserve(outputs.size());
    for (double v : outputs) {
        double rounded = std::isfinite(v) ? std::round(v / kSemanticTolerance) : v;
        if (std::isnan(rounded)) {
            rounded = std::numeric_limits<double>::quiet_NaN();
        } else if (rounded == 0.0) {
            rounded = 0.0; // fold -0 into +0
        }
        key.push_back(std::bit_cast<std::int64_t>(rounded));
    }
    return key;
}

std::vector<Genome> semantically_diverse_population(const PrimitiveSet& pset, const GpParams& params,
                                                    const Dataset& data, Rng& rng)
{
    if (data.rows() == 0) {
        throw DataError("semantically diverse initialization needs a non-empty dataset");
    }
    std::vector<Genome> population;
    population.reserve(params.population_size);
    std::set<std::vector<std::int64_t>> seen;
    int rejections = 0;
    while (population.size() < params.population_size) {
        Genome candidate = random_genome(pset, params.min_length, params.max_length, rng);
        auto key = semantic_key(semantics(candidate.expressed(), data, pset));
        const bool fresh = !seen.contains(key);
        if (fresh || rejections >= kDiversityRejectionCap) {
            seen.insert(std::move(key));
            population.push_back(std::move(candidate));
            rejections = 0;
        } else {
            ++rejections;
        }
    }
    return population;
}

namespace {

std::vector<Genome> initial_population(const GpParams& params, const Dataset& data, const PrimitiveSet& pset,
                                       Rng& rng)
{
    if (params.initial_population == InitialPopulation::semantically_diverse) {
        return semantically_diverse_population(pset, params, data, rng);
    }
    std::vector<Genome> population;
    population.reserve(params.population_size);
    for (std::size_t i = 0; i < params.population_size; ++i) {
        population.push_back(random_genome(pset, params.min_length, params.max_length, rng));
    }
    return population;
}

const Genome& best_of(std::span<const Genome> genomes)
{
    return *std::min_element(genomes.begin(), genomes.end(), archive_before);
}

const Genome& pick_parent(const RunState& state, Rng& rng)
{
    const auto& cfg = state.params.selection;
    if (choose_pool(state.population, state.archive, cfg, rng) == PoolChoice::archive) {
        return state.archive[select(state.archive, cfg, rng)];
    }
    return state.population[select(state.population, cfg, rng)];
}

} // namespace

GenerationRecord make_record(const RunState& state)
{
    GenerationRecord rec;
    rec.generation = state.generation;
    const auto& best = best_of(state.population);
    rec.best_adjusted = best.adjusted();
    rec.best_size = best.valid_length;

    double adj = 0.0;
    double nodes = 0.0;
    for (const auto& g : state.archive) {
        adj += g.adjusted();
        nodes += static_cast<double>(g.valid_length);
    }
    const auto n = static_cast<double>(state.archive.size());
    rec.archive_mean_adjusted = adj / n;
    rec.archive_mean_nodes = nodes / n;

    const auto& elite = state.archive.front();
    rec.best_so_far_expr = render_infix(elite, state.pset);
    rec.best_so_far_size = elite.valid_length;
    rec.best_so_far_adjusted = elite.adjusted();
    const auto report = fitness_report(elite, state.data, state.pset);
    rec.mae = report.metrics.mae;
    rec.nmse = report.metrics.nmse;
    rec.r = report.metrics.r;
    return rec;
}

RunState init_run(const GpParams& params, const Dataset& data, const PrimitiveSet& pset)
{
    check_params(params);
    check_dataset(data);
    if (data.variables() != pset.variable_count()) {
        throw DataError("dataset has " + std::to_string(data.variables()) + " input columns but the primitive set has " +
                        std::to_string(pset.variable_count()) + " variables");
    }
    RunState state;
    state.params = params;
    state.pset = pset;
    state.data = data;
    state.rng = Rng(params.seed);
    state.population = initial_population(params, data, pset, state.rng);
    evaluate_population(state.population, state.data, state.pset);
    state.archive = update_archive({}, state.population, params.selection);
    state.records.push_back(make_record(state));
    return state;
}

void step_generation(RunState& state)
{
    const auto& params = state.params;
    const auto vparams = variation_params(params);
    const auto& pset = state.pset;
    auto& rng = state.rng;
    const auto box = params.interval_arithmetic ? input_box(state.data) : std::vector<Interval>{};

    // Mutation coin flip, then interval screening against the originating parent.
    const auto finish = [&](Genome child, const Genome& parent) {
        if (rng.bernoulli(params.mutation_rate)) {
            child = mutate(child, rng, vparams, pset);
        }
        if (params.interval_arithmetic && child != parent && !interval_feasible(child, box, pset)) {
            return parent;
        }
        return child;
    };

    std::vector<Genome> next;
    next.reserve(params.population_size);
    while (next.size() < params.population_size) {
        if (rng.bernoulli(params.crossover_rate)) {
            const Genome& p1 = pick_parent(state, rng);
            const Genome& p2 = pick_parent(state, rng);
            auto [c1, c2] = crossover(p1, p2, state.data, rng, vparams, pset);
            next.push_back(finish(std::move(c1), p1));
            if (next.size() < params.population_size) {
                next.push_back(finish(std::move(c2), p2));
            }
        } else {
            const Genome& p = pick_parent(state, rng);
            next.push_back(finish(p, p));
        }
    }
    evaluate_population(next, state.data, pset);
    state.population = std::move(next);

    auto subtrees = extract_subtrees(best_of(state.population), params.min_length, pset, rng);
    evaluate_population(subtrees, state.data, pset);

    std::vector<Genome> candidates = state.population;
    candidates.insert(candidates.end(), std::make_move_iterator(subtrees.begin()),
                      std::make_move_iterator(subtrees.end()));
    state.archive = update_archive(state.archive, candidates, params.selection);

    ++state.generation;
    state.records.push_back(make_record(state));
}

bool cascade_due(const RunState& state)
{
    return state.generation > 0 && state.generation < state.params.generations &&
           state.generation % state.params.generations_per_cascade == 0;
}

void cascade_boundary(RunState& state)
{
    auto fresh = initial_population(state.params, state.data, state.pset, state.rng);
    const std::size_t keep = std::min(state.archive.size(), fresh.size());
    std::copy_n(state.archive.begin(), keep, fresh.begin());
    evaluate_population(fresh, state.data, state.pset);
    state.population = std::move(fresh);
}

void continue_run(RunState& state, const GenerationObserver& observer)
{
    check_params(state.params);
    while (state.generation < state.params.generations) {
        if (cascade_due(state)) {
            cascade_boundary(state);
        }
        step_generation(state);
        if (observer) {
            observer(state);
        }
    }
}

RunState run(const GpParams& params, const Dataset& data, const PrimitiveSet& pset, const GenerationObserver& observer)
{
    RunState state = init_run(params, data, pset);
    if (observer) {
        observer(state);
    }
    continue_run(state, observer);
    return state;
}

std::vector<double> predict_one_step(const Genome& g, std::span<const std::vector<double>> rows,
                                     const PrimitiveSet& pset)
{
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        out.push_back(eval_postfix(g, row, pset));
    }
    return out;
}

MultiStepPrediction predict_multi_step(const Genome& g, std::span<const double> seed_window, std::size_t horizon,
                                       const PrimitiveSet& pset)
{
    if (horizon < 1) {
        throw ParameterError("horizon must be at least 1");
    }
    if (seed_window.size() != pset.variable_count()) {
        throw ParameterError("seed window has " + std::to_string(seed_window.size()) + " values, expected " +
                             std::to_string(pset.variable_count()));
    }
    MultiStepPrediction out;
    std::vector<double> window(seed_window.begin(), seed_window.end());
    for (std::size_t t = 0; t < horizon; ++t) {
        const double y = eval_postfix(g, window, pset);
        if (!std::isfinite(y)) {
            out.truncated = true;
            break;
        }
        out.values.push_back(y);
        std::rotate(window.rbegin(), window.rbegin() + 1, window.rend());
        window.front() = y;
    }
    return out;
}

} // namespace stacksr
