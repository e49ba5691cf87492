#include <benchmark/benchmark.h>

#include <random>

#include "wavegrasp/rng.hpp"
#include "wavegrasp/sac.hpp"
#include "wavegrasp/sim.hpp"
#include "wavegrasp/wave.hpp"

namespace wg = wavegrasp;

namespace {

wg::nn::Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, wg::Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  wg::nn::Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

void BM_CriticForward(benchmark::State& state) {
  wg::Rng rng(1);
  const auto net = wg::nn::Mlp::random({35, 256, 256, 256, 1}, rng);
  const auto x = random_matrix(35, state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x, nullptr));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CriticForward)->Arg(1)->Arg(64)->Arg(256);

void BM_CriticForwardBackward(benchmark::State& state) {
  wg::Rng rng(2);
  const auto net = wg::nn::Mlp::random({35, 256, 256, 256, 1}, rng);
  const auto x = random_matrix(35, state.range(0), rng);
  const wg::nn::Matrix g = wg::nn::Matrix::Ones(1, state.range(0));
  auto grads = net.zero_gradients();
  for (auto _ : state) {
    wg::nn::ForwardCache cache;
    net.forward(x, &cache);
    benchmark::DoNotOptimize(net.backward(cache, g, &grads, true));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CriticForwardBackward)->Arg(64)->Arg(256);

void BM_SacUpdate(benchmark::State& state) {
  wg::sac::SacConfig cfg;
  wg::Rng rng(3);
  wg::sac::SacAgent agent(cfg, rng);
  wg::sac::ReplayBuffer buffer(4096);
  wg::sim::Environment env(wg::sim::EnvConfig{});
  auto obs = env.reset(4, wg::wave::calm());
  while (buffer.size() < 4096) {
    const auto a = agent.select_action(obs, wg::sac::ActionMode::kStochastic, rng);
    const auto step = env.step(a);
    buffer.push({obs, a.values(), step.reward, step.observation, step.terminated});
    obs = env.active() ? step.observation : env.reset(rng(), wg::wave::calm());
  }
  const auto batch = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(agent.update(buffer, batch, rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SacUpdate)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_EnvStep(benchmark::State& state) {
  wg::sim::Environment env(wg::sim::EnvConfig{});
  env.reset(5, wg::wave::preset(static_cast<int>(state.range(0))));
  const wg::sim::ActionCommand a(0.1, -0.2, 0.3, 0.05, 0.5);
  for (auto _ : state) {
    if (!env.active()) env.reset(5, wg::wave::preset(static_cast<int>(state.range(0))));
    benchmark::DoNotOptimize(env.step(a));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EnvStep)->Arg(0)->Arg(2);

void BM_ActorAct(benchmark::State& state) {
  wg::sac::SacConfig cfg;
  wg::Rng rng(6);
  wg::sac::SacAgent agent(cfg, rng);
  wg::sim::Environment env(wg::sim::EnvConfig{});
  const auto obs = env.reset(7, wg::wave::calm());
  for (auto _ : state) benchmark::DoNotOptimize(agent.select_action(obs, wg::sac::ActionMode::kDeterministic, rng));
}
BENCHMARK(BM_ActorAct);

}  // namespace

BENCHMARK_MAIN();
