#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace ghznet {

/// Runs fold(acc, round_id) for every id in [0, rounds), split across workers
/// in contiguous chunks. Each worker folds into its own accumulator from
/// make_acc(); partial accumulators are handed to merge in chunk order, so
/// the combined result does not depend on thread scheduling.
template <class Acc, class MakeAcc, class Fold, class Merge>
void parallel_rounds(std::uint64_t rounds, int workers, MakeAcc make_acc, Fold fold, Merge merge) {
    if (rounds == 0) return;
    const std::uint64_t n_workers =
        std::max<std::uint64_t>(1, std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(workers, 1)), rounds));

    if (n_workers == 1) {
        Acc acc = make_acc();
        for (std::uint64_t id = 0; id < rounds; ++id) fold(acc, id);
        merge(std::move(acc));
        return;
    }

    std::vector<std::optional<Acc>> parts(n_workers);
    std::vector<std::exception_ptr> errors(n_workers);
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    const std::uint64_t chunk = rounds / n_workers;
    const std::uint64_t remainder = rounds % n_workers;
    std::uint64_t start = 0;
    for (std::uint64_t i = 0; i < n_workers; ++i) {
        const std::uint64_t len = chunk + (i < remainder ? 1 : 0);
        threads.emplace_back([&, i, start, len] {
            try {
                Acc acc = make_acc();
                for (std::uint64_t id = start; id < start + len; ++id) fold(acc, id);
                parts[i] = std::move(acc);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
        start += len;
    }
    for (auto& t : threads) t.join();
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
    for (auto& part : parts) merge(std::move(*part));
}

} // namespace ghznet
