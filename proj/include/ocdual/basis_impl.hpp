#pragma once

#include <thread>
#include <vector>

namespace ocdual {

template <typename T, typename PerElement, typename Reduce>
T quadrature_map_reduce(const TimeGrid& grid, int num_threads,
                        PerElement per_element, T init, Reduce reduce) {
  const int K = grid.num_elements();
  std::vector<T> slots(K, init);
  if (num_threads <= 1 || K < 2 * num_threads) {
    for (int e = 0; e < K; ++e) slots[e] = per_element(e);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(num_threads);
    for (int w = 0; w < num_threads; ++w) {
      workers.emplace_back([&, w]() {
        for (int e = w; e < K; e += num_threads) slots[e] = per_element(e);
      });
    }
    for (auto& th : workers) th.join();
  }
  T acc = init;
  for (int e = 0; e < K; ++e) acc = reduce(acc, slots[e]);
  return acc;
}

}  // namespace ocdual
