// Serial vs OpenMP enumeration kernels over a 2^20 assignment space.

#include <benchmark/benchmark.h>

#include "ffg/enumeration.hpp"

namespace {

using namespace ffg;

struct Fixture {
    std::vector<VarDecl> decls;
    std::set<std::string> vars;
    Condition late;   // only the all-true assignment, i.e. the last index
    Condition dense;  // about half the space

    Fixture() {
        std::vector<Atom> all;
        for (int i = 0; i < 20; ++i) {
            std::string v = "b" + std::to_string(i);
            decls.push_back(VarDecl::boolean(v));
            vars.insert(v);
            all.push_back(eq(v, "true"));
        }
        late = Condition::all_of(all);
        dense = Condition::parse("b0 == true || b1 == true && b2 == false");
    }
};

const Fixture& fx() {
    static Fixture f;
    return f;
}

template <bool Parallel>
void BM_FindWitness(benchmark::State& st) {
    kernels::AssignmentSpace space(fx().decls, fx().vars);
    auto must = kernels::compile(fx().late, space);
    for (auto _ : st) {
        auto w = Parallel ? kernels::find_witness_parallel(space, must, nullptr)
                          : kernels::find_witness_serial(space, must, nullptr);
        benchmark::DoNotOptimize(w);
    }
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(space.size()));
}

template <bool Parallel>
void BM_CountModels(benchmark::State& st) {
    kernels::AssignmentSpace space(fx().decls, fx().vars);
    auto cond = kernels::compile(fx().dense, space);
    for (auto _ : st) {
        auto n = Parallel ? kernels::count_models_parallel(space, cond) : kernels::count_models_serial(space, cond);
        benchmark::DoNotOptimize(n);
    }
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(space.size()));
}

}  // namespace

BENCHMARK(BM_FindWitness<false>)->Name("find_witness/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FindWitness<true>)->Name("find_witness/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountModels<false>)->Name("count_models/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountModels<true>)->Name("count_models/parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
