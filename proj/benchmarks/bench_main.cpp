// Microbenchmarks for the hot paths: the OpenMP table builder against its
// serial reference, the exhaustive search, and model export.
#include <benchmark/benchmark.h>

#include <greenplan/export.hpp>
#include <greenplan/instance.hpp>
#include <greenplan/milp.hpp>
#include <greenplan/solver.hpp>
#include <greenplan/tables.hpp>

#include "test_config.hpp"

using namespace greenplan;

namespace {

PlanningInstance load(const char* name) {
    return load_instance(std::string(GREENPLAN_INSTANCE_DIR) + "/" + name);
}

void BM_tables_parallel(benchmark::State& state, const char* name) {
    const auto inst = load(name);
    for (auto _ : state) benchmark::DoNotOptimize(build_tables(inst));
}

void BM_tables_serial(benchmark::State& state, const char* name) {
    const auto inst = load(name);
    for (auto _ : state) benchmark::DoNotOptimize(build_tables_serial(inst));
}

void BM_enumerate(benchmark::State& state, const char* name, const char* scenario) {
    const auto inst = load(name);
    const auto tables = build_tables(inst);
    const auto model = build_model(inst, tables, ScenarioSpec::from_id(scenario));
    for (auto _ : state) benchmark::DoNotOptimize(solve_enumerate(model, 1 << 20));
}

void BM_write_lp(benchmark::State& state, const char* name) {
    const auto inst = load(name);
    const auto tables = build_tables(inst);
    const auto model = build_model(inst, tables, ScenarioSpec::from_id("S+Z"));
    for (auto _ : state) benchmark::DoNotOptimize(write_lp(model));
}

void BM_build_model(benchmark::State& state, const char* name) {
    const auto inst = load(name);
    const auto tables = build_tables(inst);
    for (auto _ : state)
        benchmark::DoNotOptimize(build_model(inst, tables, ScenarioSpec::from_id("S+Z")));
}

} // namespace

BENCHMARK_CAPTURE(BM_tables_parallel, micro1, "micro1.json")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_tables_serial, micro1, "micro1.json")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_tables_parallel, p1, "p1-like.json")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_tables_serial, p1, "p1-like.json")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_tables_parallel, p2, "p2-like.json")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_tables_serial, p2, "p2-like.json")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_enumerate, micro2_sz, "micro2.json", "S+Z")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_enumerate, micro1_sz, "micro1.json", "S+Z")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_build_model, p1, "p1-like.json")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_write_lp, p1, "p1-like.json")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
