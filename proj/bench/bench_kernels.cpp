#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "credal/engine.hpp"
#include "credal/geometry.hpp"
#include "credal/network_io.hpp"
#include "credal/random_network.hpp"

using namespace credal;

namespace {

// Argument 0 selects the serial reference, 1 the OpenMP kernel.
Execution mode(const benchmark::State& state) { return state.range(0) == 0 ? Execution::serial : Execution::parallel; }

void label(benchmark::State& state) {
    state.SetLabel(state.range(0) == 0 ? "serial" : "parallel, " + std::to_string(available_threads()) + " threads");
}

const CredalNetwork& figure1() {
    static const CredalNetwork net = load_network_file(std::string(CREDAL_DATA_DIR) + "/figure1.json");
    return net;
}

Query figure1_query() {
    const auto& net = figure1();
    for (VarId v = 0; v < net.size(); ++v)
        if (net.variable(v).name == "F")
            return Query{v, {}};
    throw std::runtime_error("figure1.json has no F");
}

// Points on the probability simplex, half of them mixtures of the others.
PointSet mixed_points(std::size_t dim, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> expo(1.0);
    std::vector<std::vector<double>> pts;
    for (std::size_t i = 0; i < count / 2; ++i) {
        std::vector<double> p(dim);
        double sum = 0.0;
        for (auto& x : p)
            sum += x = expo(rng);
        for (auto& x : p)
            x /= sum;
        pts.push_back(std::move(p));
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (pts.size() < count) {
        const auto& a = pts[rng() % (count / 2)];
        const auto& b = pts[rng() % (count / 2)];
        const double t = unit(rng);
        std::vector<double> p(dim);
        for (std::size_t k = 0; k < dim; ++k)
            p[k] = t * a[k] + (1.0 - t) * b[k];
        pts.push_back(std::move(p));
    }
    return PointSet(dim, pts);
}

void BM_Enumerate(benchmark::State& state) {
    EngineOptions opts;
    opts.exec = mode(state);
    const auto q = figure1_query();
    for (auto _ : state)
        benchmark::DoNotOptimize(enumerate_strong_extension(figure1(), q, opts));
    label(state);
}
BENCHMARK(BM_Enumerate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_SeparableVE(benchmark::State& state) {
    EngineOptions opts;
    opts.exec = mode(state);
    const auto q = figure1_query();
    for (auto _ : state)
        benchmark::DoNotOptimize(separable_ve(figure1(), q, opts));
    label(state);
}
BENCHMARK(BM_SeparableVE)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Redundancy(benchmark::State& state) {
    const auto pts = mixed_points(6, static_cast<std::size_t>(state.range(1)), 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(redundancy_eliminate_indices(pts, kLpTol, mode(state)));
    label(state);
}
BENCHMARK(BM_Redundancy)->ArgsProduct({{0, 1}, {64, 256, 1024}})->Unit(benchmark::kMillisecond);

void BM_RedundancyNaive(benchmark::State& state) {
    const auto pts = mixed_points(6, static_cast<std::size_t>(state.range(0)), 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(redundancy_eliminate_naive(pts));
}
BENCHMARK(BM_RedundancyNaive)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

// Work should grow linearly with the number of nodes.
void BM_BinaryPolytree(benchmark::State& state) {
    RandomNetworkOptions o;
    o.nodes = static_cast<std::size_t>(state.range(0));
    o.polytree = true;
    o.binary = true;
    o.max_vertices = 2;
    o.max_parents = 2;
    o.seed = 11;
    const auto net = random_network(o);
    Query q{0, {}};
    for (VarId v = 1; v < net.size(); ++v)
        if (net.dag().children(v).empty() && v % 2 == 0)
            q.evidence[v] = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(binary_polytree_bounds(net, q));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BinaryPolytree)->RangeMultiplier(2)->Range(8, 1024)->Complexity(benchmark::oN);

} // namespace

BENCHMARK_MAIN();
