// Batched sample() evaluation. The serial kernel is the reference; the OpenMP
// kernel must return identical solutions for identical jobs.
#pragma once

#include <span>
#include <vector>

#include "shortkit/inference.hpp"

namespace shortkit {

struct SampleJob {
    const Prior* prior = nullptr;           // nullptr = empty prior
    std::uint64_t seed = 0;                 // seeds the job's own Rng
    const CostAssignment* costs = nullptr;  // nullptr = the batch default
};

std::vector<Solution> sample_batch_serial(const GoalModel& model, std::span<const SampleJob> jobs,
                                          const CostAssignment& costs,
                                          const SampleOptions& opt = {});
std::vector<Solution> sample_batch_parallel(const GoalModel& model,
                                            std::span<const SampleJob> jobs,
                                            const CostAssignment& costs,
                                            const SampleOptions& opt = {});

// Chooses the parallel kernel when more than one thread is available.
std::vector<Solution> sample_batch(const GoalModel& model, std::span<const SampleJob> jobs,
                                   const CostAssignment& costs, const SampleOptions& opt = {});

int max_threads();

}  // namespace shortkit
